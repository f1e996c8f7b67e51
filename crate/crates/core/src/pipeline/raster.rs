use image::{DynamicImage, ImageFormat};

use super::PipelineError;

/// Interleaved 8-bit raster with 3 (RGB) or 4 (RGBA) channels, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl Raster {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self, PipelineError> {
        if width == 0 || height == 0 {
            return Err(PipelineError::InvalidRaster("zero extent".into()));
        }
        if channels != 3 && channels != 4 {
            return Err(PipelineError::InvalidRaster(format!("{channels} channels")));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(PipelineError::InvalidRaster(format!(
                "{}x{}x{} needs {expected} bytes, got {}",
                width,
                height,
                channels,
                data.len()
            )));
        }
        Ok(Raster { width, height, channels, data })
    }

    /// A raster filled by `f(x, y)`.
    pub fn from_fn(width: u32, height: u32, channels: u8, mut f: impl FnMut(u32, u32) -> [u8; 4]) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * channels as usize);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y)[..channels as usize]);
            }
        }
        Raster { width, height, channels, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn has_alpha(&self) -> bool {
        self.channels == 4
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize
    }

    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let at = self.offset(x, y);
        &self.data[at..at + self.channels as usize]
    }

    /// Pixel widened to RGBA (opaque when the raster has no alpha).
    pub fn rgba(&self, x: u32, y: u32) -> [u8; 4] {
        let p = self.pixel(x, y);
        [p[0], p[1], p[2], if self.channels == 4 { p[3] } else { 255 }]
    }

    pub fn to_rgba(&self) -> Raster {
        if self.channels == 4 {
            return self.clone();
        }
        Raster::from_fn(self.width, self.height, 4, |x, y| self.rgba(x, y))
    }

    /// Drops alpha by compositing over white.
    pub fn to_rgb_over_white(&self) -> Raster {
        if self.channels == 3 {
            return self.clone();
        }
        Raster::from_fn(self.width, self.height, 3, |x, y| {
            let [r, g, b, a] = self.rgba(x, y);
            let over = |c: u8| -> u8 {
                let (c, a) = (u32::from(c), u32::from(a));
                ((c * a + 255 * (255 - a) + 127) / 255) as u8
            };
            [over(r), over(g), over(b), 255]
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Png,
    Jpeg,
    Tiff,
    /// Raster constructed in memory.
    Raw,
}

/// A decoded source image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceImage {
    pub raster: Raster,
    pub source_format: SourceFormat,
}

impl SourceImage {
    pub fn from_raster(raster: Raster) -> Self {
        SourceImage { raster, source_format: SourceFormat::Raw }
    }

    pub fn width(&self) -> u32 {
        self.raster.width()
    }

    pub fn height(&self) -> u32 {
        self.raster.height()
    }

    /// Decodes PNG, JPEG or TIFF bytes.
    pub fn decode(bytes: &[u8]) -> Result<Self, PipelineError> {
        let format = image::guess_format(bytes).map_err(|e| PipelineError::Decode(e.to_string()))?;
        let source_format = match format {
            ImageFormat::Png => SourceFormat::Png,
            ImageFormat::Jpeg => SourceFormat::Jpeg,
            ImageFormat::Tiff => SourceFormat::Tiff,
            other => return Err(PipelineError::Decode(format!("unsupported source format {other:?}"))),
        };
        let decoded = image::load_from_memory_with_format(bytes, format)
            .map_err(|e| PipelineError::Decode(e.to_string()))?;
        Ok(SourceImage { raster: from_dynamic(decoded)?, source_format })
    }
}

fn from_dynamic(img: DynamicImage) -> Result<Raster, PipelineError> {
    let (w, h) = (img.width(), img.height());
    if img.color().has_alpha() {
        Raster::new(w, h, 4, img.into_rgba8().into_raw())
    } else {
        Raster::new(w, h, 3, img.into_rgb8().into_raw())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inconsistent_length() {
        assert!(Raster::new(2, 2, 3, vec![0; 11]).is_err());
        assert!(Raster::new(0, 2, 3, vec![]).is_err());
        assert!(Raster::new(2, 2, 2, vec![0; 8]).is_err());
        assert!(Raster::new(2, 2, 4, vec![0; 16]).is_ok());
    }

    #[test]
    fn composite_over_white() {
        let r = Raster::new(1, 1, 4, vec![0, 0, 0, 0]).unwrap();
        assert_eq!(r.to_rgb_over_white().data(), &[255, 255, 255]);
        let r = Raster::new(1, 1, 4, vec![10, 20, 30, 255]).unwrap();
        assert_eq!(r.to_rgb_over_white().data(), &[10, 20, 30]);
    }

    #[test]
    fn decodes_png_bytes() {
        let img = image::RgbImage::from_fn(3, 2, |x, y| image::Rgb([x as u8, y as u8, 7]));
        let mut bytes = Vec::new();
        img.write_to(&mut std::io::Cursor::new(&mut bytes), ImageFormat::Png).unwrap();
        let src = SourceImage::decode(&bytes).unwrap();
        assert_eq!((src.width(), src.height()), (3, 2));
        assert_eq!(src.source_format, SourceFormat::Png);
        assert_eq!(src.raster.pixel(2, 1), &[2, 1, 7]);
        assert!(SourceImage::decode(b"not an image").is_err());
    }
}
