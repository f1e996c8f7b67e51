use super::resolve::{resolve_region, resolve_size, ResolveError};
use super::{ImageRequest, SizeKind, SizeSpec};
use crate::limits::ServerLimits;
use crate::pipeline::ImageInfo;

/// Canonical `{identifier}/{region}/{size}/{rotation}/{quality}.{format}` for a
/// request against an image of the given dimensions.
///
/// Region renders as `full` or pixel `x,y,w,h`; size renders as `max` when it
/// equals the extracted region and `w,h` (with `^` when larger) otherwise.
/// Requests that resolve to the same pixels share one canonical path.
pub fn canonical_path(
    req: &ImageRequest,
    full_w: u32,
    full_h: u32,
    limits: &ServerLimits,
) -> Result<String, ResolveError> {
    let rect = resolve_region(req.region, full_w, full_h)?;
    let (w, h) = resolve_size(req.size, rect, limits)?;
    let region = if rect.is_full(full_w, full_h) {
        "full".to_string()
    } else {
        format!("{},{},{},{}", rect.x, rect.y, rect.w, rect.h)
    };
    let size = if (w, h) == (rect.w, rect.h) {
        SizeSpec::MAX
    } else {
        SizeSpec { kind: SizeKind::Exact { w, h }, upscale: w > rect.w || h > rect.h }
    };
    let canonical = ImageRequest { size, ..req.clone() };
    Ok(format!(
        "{}/{region}/{size}/{}/{}.{}",
        super::base::encode_identifier(&canonical.identifier),
        canonical.rotation,
        canonical.quality.as_str(),
        canonical.format.extension()
    ))
}

/// Absolute canonical URI: `{info.id}/{region}/{size}/{rotation}/{quality}.{format}`.
pub fn canonical_form(req: &ImageRequest, info: &ImageInfo) -> Result<String, ResolveError> {
    let path = canonical_path(req, info.width, info.height, &info.limits())?;
    let params = path.split_once('/').map(|(_, p)| p).unwrap_or(&path);
    Ok(format!("{}/{params}", info.id))
}
