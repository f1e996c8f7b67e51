//! Executes resolved image requests: region, size, rotation, quality, format,
//! strictly in that order.

mod cache;
mod encode;
mod info;
mod raster;
mod transform;

use thiserror::Error;

pub use cache::ImageCache;
pub use encode::{encode, JPEG_QUALITY};
pub use info::{
    info_for, info_for_dimensions, scale_factors, tile_grid, ImageInfo, SizeEntry, TileEntry, TileRef,
    IMAGE_CONTEXT, IMAGE_PROTOCOL, IMAGE_SERVICE_TYPE,
};
pub use raster::{Raster, SourceFormat, SourceImage};
pub use transform::{
    apply_quality, crop, luma, mirror, resize, rotate_arbitrary, rotate_quarter, rotated_bounds,
    ResampleKernel, BITONAL_THRESHOLD,
};

use crate::limits::ServerLimits;
use crate::request::{resolve_region, resolve_size, Format, ImageRequest, ResolveError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("cannot encode {format}: {detail}")]
    UnsupportedFormatEncode { format: &'static str, detail: String },
    #[error("cannot decode source image: {0}")]
    Decode(String),
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PipelineOptions {
    pub kernel: ResampleKernel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedImage {
    pub bytes: Vec<u8>,
    pub format: Format,
    pub width: u32,
    pub height: u32,
}

impl EncodedImage {
    pub fn media_type(&self) -> &'static str {
        self.format.media_type()
    }
}

const WHITE: [u8; 4] = [255, 255, 255, 255];
const TRANSPARENT: [u8; 4] = [0, 0, 0, 0];

/// Applies region, size, rotation and quality, returning the raster that
/// would be encoded.
pub fn render(
    req: &ImageRequest,
    src: &SourceImage,
    limits: &ServerLimits,
    options: &PipelineOptions,
) -> Result<Raster, PipelineError> {
    let rect = resolve_region(req.region, src.width(), src.height()).map_err(ResolveError::from)?;
    let (w, h) = resolve_size(req.size, rect, limits).map_err(ResolveError::from)?;

    let mut raster = crop(&src.raster, rect);
    raster = resize(&raster, w, h, options.kernel);
    if req.rotation.mirrored {
        raster = mirror(&raster);
    }
    raster = match req.rotation.quarter_turns() {
        Some(turns) => rotate_quarter(&raster, turns),
        None => {
            let transparent = req.format.supports_alpha();
            let background = if transparent { TRANSPARENT } else { WHITE };
            rotate_arbitrary(&raster, req.rotation.degrees().to_f64(), background, transparent)
        }
    };
    Ok(apply_quality(raster, req.quality))
}

pub fn execute_with(
    req: &ImageRequest,
    src: &SourceImage,
    limits: &ServerLimits,
    options: &PipelineOptions,
) -> Result<EncodedImage, PipelineError> {
    let raster = render(req, src, limits, options)?;
    Ok(EncodedImage {
        bytes: encode(&raster, req.format)?,
        format: req.format,
        width: raster.width(),
        height: raster.height(),
    })
}

/// Executes a request with the default (bilinear) kernel.
pub fn execute(req: &ImageRequest, src: &SourceImage, limits: &ServerLimits) -> Result<EncodedImage, PipelineError> {
    execute_with(req, src, limits, &PipelineOptions::default())
}
