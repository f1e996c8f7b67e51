use serde::{Deserialize, Serialize};

use super::raster::SourceImage;
use crate::limits::{ComplianceLevel, ServerLimits, TileConfig};
use crate::request::{BaseUri, Format, ImageRequest, Quality, Rect, Region, Rotation, SizeKind, SizeSpec};

pub const IMAGE_CONTEXT: &str = "http://iiif.io/api/image/3/context.json";
pub const IMAGE_PROTOCOL: &str = "http://iiif.io/api/image";
pub const IMAGE_SERVICE_TYPE: &str = "ImageService3";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeEntry {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TileEntry {
    pub width: u32,
    pub height: u32,
    pub scale_factors: Vec<u32>,
}

/// The image information document (`info.json`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ImageInfo {
    #[serde(rename = "@context")]
    pub context: String,
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub protocol: String,
    pub profile: String,
    pub width: u32,
    pub height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_height: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_area: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<SizeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tiles: Vec<TileEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_qualities: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_formats: Vec<String>,
}

impl ImageInfo {
    /// Limits advertised by this document; absent keys mean unbounded.
    pub fn limits(&self) -> ServerLimits {
        ServerLimits {
            max_width: self.max_width.unwrap_or(u32::MAX),
            max_height: self.max_height,
            max_area: self.max_area.unwrap_or(u64::MAX),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("info serializes")
    }
}

/// Power-of-two scale factors from 1 until the whole image fits one tile.
pub fn scale_factors(width: u32, height: u32, tile: TileConfig) -> Vec<u32> {
    let mut factors = vec![1u32];
    let mut f = 1u32;
    while width.div_ceil(f) > tile.width || height.div_ceil(f) > tile.height {
        f = match f.checked_mul(2) {
            Some(next) => next,
            None => break,
        };
        factors.push(f);
    }
    factors
}

/// Size at scale factor `f`: the long edge is `ceil(long / f)`, the short edge
/// follows the aspect ratio rounded half up.
fn derived_size(width: u32, height: u32, f: u32) -> SizeEntry {
    let scale_other = |long: u32, short: u32| -> (u32, u32) {
        let l = long.div_ceil(f);
        let s = ((2 * u64::from(l) * u64::from(short) + u64::from(long)) / (2 * u64::from(long))).max(1);
        (l, s as u32)
    };
    if width >= height {
        let (w, h) = scale_other(width, height);
        SizeEntry { width: w, height: h }
    } else {
        let (h, w) = scale_other(height, width);
        SizeEntry { width: w, height: h }
    }
}

pub fn info_for(src: &SourceImage, base: &BaseUri, limits: &ServerLimits, tile: TileConfig) -> ImageInfo {
    info_for_dimensions(src.width(), src.height(), base, limits, tile, ComplianceLevel::default())
}

pub fn info_for_dimensions(
    width: u32,
    height: u32,
    base: &BaseUri,
    limits: &ServerLimits,
    tile: TileConfig,
    level: ComplianceLevel,
) -> ImageInfo {
    let factors = scale_factors(width, height, tile);
    let sizes = factors
        .iter()
        .rev()
        .filter(|&&f| f > 1)
        .map(|&f| derived_size(width, height, f))
        .collect();
    ImageInfo {
        context: IMAGE_CONTEXT.to_string(),
        id: base.to_string(),
        kind: IMAGE_SERVICE_TYPE.to_string(),
        protocol: IMAGE_PROTOCOL.to_string(),
        profile: level.as_str().to_string(),
        width,
        height,
        max_width: Some(limits.max_width),
        max_height: limits.max_height,
        max_area: Some(limits.max_area),
        sizes,
        tiles: vec![TileEntry { width: tile.width, height: tile.height, scale_factors: factors }],
        extra_qualities: ["color", "gray", "bitonal"].map(String::from).to_vec(),
        extra_formats: ["tif", "gif", "webp"].map(String::from).to_vec(),
    }
}

/// One tile of the pyramid: the source region and the scale factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileRef {
    pub scale_factor: u32,
    pub region: Rect,
}

impl TileRef {
    pub fn request(&self, identifier: &str, format: Format) -> ImageRequest {
        let Rect { x, y, w, h } = self.region;
        ImageRequest {
            identifier: identifier.to_string(),
            region: Region::Absolute { x, y, w, h },
            size: SizeSpec::new(SizeKind::Exact {
                w: w.div_ceil(self.scale_factor),
                h: h.div_ceil(self.scale_factor),
            }),
            rotation: Rotation::NONE,
            quality: Quality::Default,
            format,
        }
    }
}

/// Every tile implied by the `tiles` entries of an information document.
pub fn tile_grid(info: &ImageInfo) -> Vec<TileRef> {
    let mut out = Vec::new();
    for tile in &info.tiles {
        for &f in &tile.scale_factors {
            let step_w = tile.width.saturating_mul(f);
            let step_h = tile.height.saturating_mul(f);
            let mut y = 0;
            while y < info.height {
                let h = step_h.min(info.height - y);
                let mut x = 0;
                while x < info.width {
                    let w = step_w.min(info.width - x);
                    out.push(TileRef { scale_factor: f, region: Rect::new(x, y, w, h) });
                    x += w;
                }
                y += h;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Raster;
    use crate::request::{Scheme, ServiceRoot};

    /// Number of factors needed: 1 + ceil(log2(max(w/tw, h/th))), by search.
    fn factor_count_oracle(w: u32, h: u32, tw: u32, th: u32) -> usize {
        let ratio = (f64::from(w) / f64::from(tw)).max(f64::from(h) / f64::from(th));
        let mut k = 0;
        while 2f64.powi(k) < ratio {
            k += 1;
        }
        k as usize + 1
    }

    fn base() -> BaseUri {
        ServiceRoot::new(Scheme::Https, "example.org", Some("iiif")).base_for("img1")
    }

    #[test]
    fn scale_factor_examples() {
        assert_eq!(scale_factors(100, 80, TileConfig::square(64)), vec![1, 2]);
        assert_eq!(scale_factors(64, 64, TileConfig::square(64)), vec![1]);
        assert_eq!(scale_factors(6000, 4000, TileConfig::default()), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn scale_factors_match_log_oracle() {
        for w in (1..3000).step_by(37) {
            for h in (1..3000).step_by(53) {
                for t in [64, 256, 512] {
                    let f = scale_factors(w, h, TileConfig::square(t));
                    assert_eq!(f.len(), factor_count_oracle(w, h, t, t), "{w}x{h} tile {t}");
                    assert!(f.windows(2).all(|p| p[1] == 2 * p[0]));
                    assert_eq!(f[0], 1);
                }
            }
        }
    }

    #[test]
    fn info_reports_source_dimensions() {
        let src = SourceImage::from_raster(Raster::from_fn(100, 80, 3, |_, _| [0, 0, 0, 255]));
        let info = info_for(&src, &base(), &ServerLimits::default(), TileConfig::square(64));
        assert_eq!((info.width, info.height), (100, 80));
        assert_eq!(info.tiles[0].scale_factors, vec![1, 2]);
        assert_eq!(info.sizes, vec![SizeEntry { width: 50, height: 40 }]);
        assert_eq!(info.id, "https://example.org/iiif/img1");
    }

    #[test]
    fn context_is_first_key() {
        let info = info_for_dimensions(10, 10, &base(), &ServerLimits::default(), TileConfig::default(), ComplianceLevel::Level2);
        let json = info.to_json();
        assert!(json.trim_start().starts_with("{\n  \"@context\": \"http://iiif.io/api/image/3/context.json\""));
        assert!(json.contains("\"type\": \"ImageService3\""));
        let back: ImageInfo = serde_json::from_str(&json).unwrap();
        assert_eq!(back, info);
    }

    #[test]
    fn sizes_preserve_aspect() {
        for (w, h) in [(6000, 4000), (1001, 333), (7, 5000)] {
            let info = info_for_dimensions(w, h, &base(), &ServerLimits::default(), TileConfig::square(256), ComplianceLevel::Level2);
            for s in &info.sizes {
                let exact_h = f64::from(s.width) * f64::from(h) / f64::from(w);
                let exact_w = f64::from(s.height) * f64::from(w) / f64::from(h);
                let err_h = (f64::from(s.height) - exact_h).abs();
                let err_w = (f64::from(s.width) - exact_w).abs();
                assert!(err_h <= 1.0 || err_w <= 1.0, "{w}x{h} -> {s:?}");
            }
        }
    }

    #[test]
    fn tiles_cover_each_pixel_once_per_factor() {
        for (w, h) in [(100, 80), (513, 1025), (64, 64), (1, 300)] {
            let info = info_for_dimensions(w, h, &base(), &ServerLimits::default(), TileConfig::square(64), ComplianceLevel::Level2);
            let grid = tile_grid(&info);
            for &f in &info.tiles[0].scale_factors {
                let mut hits = vec![0u8; (w * h) as usize];
                for t in grid.iter().filter(|t| t.scale_factor == f) {
                    for y in t.region.y..t.region.y + t.region.h {
                        for x in t.region.x..t.region.x + t.region.w {
                            hits[(y * w + x) as usize] += 1;
                        }
                    }
                }
                assert!(hits.iter().all(|&c| c == 1), "{w}x{h} factor {f}");
            }
        }
    }
}
