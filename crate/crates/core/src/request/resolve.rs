use thiserror::Error;

use super::{Region, SizeKind, SizeSpec};
use crate::limits::ServerLimits;

/// A resolved region in source pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Rect { x, y, w, h }
    }

    pub fn is_full(&self, full_w: u32, full_h: u32) -> bool {
        *self == Rect::new(0, 0, full_w, full_h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("region does not intersect the {full_w}x{full_h} image")]
    RegionOutOfBounds { full_w: u32, full_h: u32 },
    #[error("region resolves to zero pixels on the {full_w}x{full_h} image")]
    EmptyRegion { full_w: u32, full_h: u32 },
    #[error("image has zero extent")]
    EmptyImage,
}

/// Failure to resolve a request against concrete image dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Size(#[from] SizeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SizeError {
    #[error("requested {w}x{h} exceeds the {region_w}x{region_h} region without `^`")]
    UpscaleForbidden { w: u32, h: u32, region_w: u32, region_h: u32 },
    #[error("requested {w}x{h} exceeds server limits")]
    ExceedsServerLimits { w: u32, h: u32 },
    #[error("size resolves to zero pixels")]
    ZeroSize,
}

/// Resolves a region against full-image dimensions.
///
/// Percent offsets floor, percent extents round half up. Regions that
/// partially overlap the image are clamped to it.
pub fn resolve_region(region: Region, full_w: u32, full_h: u32) -> Result<Rect, RegionError> {
    if full_w == 0 || full_h == 0 {
        return Err(RegionError::EmptyImage);
    }
    let (x, y, w, h): (u64, u64, u64, u64) = match region {
        Region::Full => return Ok(Rect::new(0, 0, full_w, full_h)),
        Region::Square => {
            let side = full_w.min(full_h);
            return Ok(Rect::new((full_w - side) / 2, (full_h - side) / 2, side, side));
        }
        Region::Absolute { x, y, w, h } => (x.into(), y.into(), w.into(), h.into()),
        Region::Percent { x, y, w, h } => (
            x.percent_of_floor(full_w),
            y.percent_of_floor(full_h),
            w.percent_of_round(full_w),
            h.percent_of_round(full_h),
        ),
    };
    if x >= u64::from(full_w) || y >= u64::from(full_h) {
        return Err(RegionError::RegionOutOfBounds { full_w, full_h });
    }
    if w == 0 || h == 0 {
        return Err(RegionError::EmptyRegion { full_w, full_h });
    }
    let w = w.min(u64::from(full_w) - x);
    let h = h.min(u64::from(full_h) - y);
    Ok(Rect::new(x as u32, y as u32, w as u32, h as u32))
}

/// `round_half_up(a * b / c)` in integers.
fn mul_div_round(a: u32, b: u32, c: u32) -> u64 {
    let num = u128::from(a) * u128::from(b);
    let den = u128::from(c);
    ((2 * num + den) / (2 * den)) as u64
}

fn to_u32(v: u64) -> Result<u32, SizeError> {
    u32::try_from(v).map_err(|_| SizeError::ExceedsServerLimits { w: u32::MAX, h: u32::MAX })
}

/// Largest aspect-preserving size of `w`x`h` inside the limits. Without
/// `allow_growth` the result never exceeds `w`x`h`.
fn fit_to_limits(w: u32, h: u32, limits: &ServerLimits, allow_growth: bool) -> (u32, u32) {
    let max_w = f64::from(limits.max_width);
    let max_h = f64::from(limits.effective_max_height());
    let (wf, hf) = (f64::from(w), f64::from(h));
    let mut scale = (max_w / wf).min(max_h / hf);
    let area_scale = (limits.max_area as f64 / (wf * hf)).sqrt();
    scale = scale.min(area_scale);
    if !allow_growth {
        scale = scale.min(1.0);
    }
    if scale == 1.0 {
        return (w, h);
    }
    let mut out_w = ((wf * scale).floor() as u32).max(1);
    let mut out_h = ((hf * scale).floor() as u32).max(1);
    // floor keeps the result inside every limit; nudge only if float error overshoots
    while !limits.permits(out_w, out_h) && out_w > 1 && out_h > 1 {
        out_w -= 1;
        out_h = ((u64::from(out_w) * u64::from(h)) / u64::from(w)).max(1) as u32;
    }
    (out_w, out_h)
}

/// Resolves a size against an extracted region.
///
/// `max` is scaled down to the server limits; every other form is rejected
/// with `ExceedsServerLimits` when its result is over the limits.
pub fn resolve_size(size: SizeSpec, region: Rect, limits: &ServerLimits) -> Result<(u32, u32), SizeError> {
    let (rw, rh) = (region.w, region.h);
    if rw == 0 || rh == 0 {
        return Err(SizeError::ZeroSize);
    }
    let (w, h) = match size.kind {
        SizeKind::Max => return Ok(fit_to_limits(rw, rh, limits, size.upscale)),
        SizeKind::WidthOnly { w } => (u64::from(w), mul_div_round(w, rh, rw).max(1)),
        SizeKind::HeightOnly { h } => (mul_div_round(h, rw, rh).max(1), u64::from(h)),
        SizeKind::Percent { n } => (n.percent_of_round(rw).max(1), n.percent_of_round(rh).max(1)),
        SizeKind::Exact { w, h } => (u64::from(w), u64::from(h)),
        SizeKind::BestFit { w, h } => {
            // compare w/rw against h/rh without division
            let width_bound = u64::from(w) * u64::from(rh) <= u64::from(h) * u64::from(rw);
            let (bw, bh) = if width_bound {
                (u64::from(w), mul_div_round(w, rh, rw).max(1))
            } else {
                (mul_div_round(h, rw, rh).max(1), u64::from(h))
            };
            if !size.upscale && (bw > u64::from(rw) || bh > u64::from(rh)) {
                (u64::from(rw), u64::from(rh))
            } else {
                (bw, bh)
            }
        }
    };
    let (w, h) = (to_u32(w)?, to_u32(h)?);
    if !size.upscale && (w > rw || h > rh) {
        return Err(SizeError::UpscaleForbidden { w, h, region_w: rw, region_h: rh });
    }
    if !limits.permits(w, h) {
        return Err(SizeError::ExceedsServerLimits { w, h });
    }
    Ok((w, h))
}
