use std::io::Cursor;

use image::codecs::gif::GifEncoder;
use image::codecs::jpeg::JpegEncoder;
use image::codecs::png::PngEncoder;
use image::codecs::tiff::TiffEncoder;
use image::codecs::webp::WebPEncoder;
use image::{ExtendedColorType, ImageEncoder};

use super::raster::Raster;
use super::PipelineError;
use crate::request::Format;

pub const JPEG_QUALITY: u8 = 90;

fn color_type(r: &Raster) -> ExtendedColorType {
    if r.has_alpha() {
        ExtendedColorType::Rgba8
    } else {
        ExtendedColorType::Rgb8
    }
}

pub fn encode(raster: &Raster, format: Format) -> Result<Vec<u8>, PipelineError> {
    let err = |e: image::ImageError| PipelineError::UnsupportedFormatEncode {
        format: format.extension(),
        detail: e.to_string(),
    };
    let mut out = Vec::new();
    let (w, h) = (raster.width(), raster.height());
    match format {
        Format::Jpg => {
            let rgb = raster.to_rgb_over_white();
            JpegEncoder::new_with_quality(&mut out, JPEG_QUALITY)
                .write_image(rgb.data(), w, h, ExtendedColorType::Rgb8)
                .map_err(err)?;
        }
        Format::Png => {
            PngEncoder::new(&mut out)
                .write_image(raster.data(), w, h, color_type(raster))
                .map_err(err)?;
        }
        Format::Tif => {
            TiffEncoder::new(Cursor::new(&mut out))
                .write_image(raster.data(), w, h, color_type(raster))
                .map_err(err)?;
        }
        Format::Gif => {
            let rgba = raster.to_rgba();
            GifEncoder::new(&mut out)
                .encode(rgba.data(), w, h, ExtendedColorType::Rgba8)
                .map_err(err)?;
        }
        Format::Webp => {
            WebPEncoder::new_lossless(&mut out)
                .write_image(raster.data(), w, h, color_type(raster))
                .map_err(err)?;
        }
    }
    Ok(out)
}
