//! Image API 3.0 request grammar: parsing, pixel resolution and canonical URIs.
//!
//! A request path has the shape
//! `{identifier}/{region}/{size}/{rotation}/{quality}.{format}`; the base URI
//! in front of it is `{scheme}://{server}{/prefix}/{identifier}`.

mod base;
mod canonical;
mod decimal;
mod parse;
mod resolve;

use std::fmt;

pub use base::{decode_segment, encode_identifier, BaseUri, BaseUriError, Scheme, ServiceRoot};
pub use canonical::{canonical_form, canonical_path};
pub use decimal::Decimal;
pub use parse::{parse_image_request, ParseError};
pub use resolve::{resolve_region, resolve_size, Rect, RegionError, ResolveError, SizeError};

/// The `region` parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Full,
    Square,
    Absolute { x: u32, y: u32, w: u32, h: u32 },
    Percent { x: Decimal, y: Decimal, w: Decimal, h: Decimal },
}

/// Shape of the `size` parameter, without the upscale flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SizeKind {
    Max,
    WidthOnly { w: u32 },
    HeightOnly { h: u32 },
    Percent { n: Decimal },
    Exact { w: u32, h: u32 },
    BestFit { w: u32, h: u32 },
}

/// The `size` parameter: a shape plus the `^` upscale flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SizeSpec {
    pub kind: SizeKind,
    pub upscale: bool,
}

impl SizeSpec {
    pub const MAX: SizeSpec = SizeSpec { kind: SizeKind::Max, upscale: false };

    pub fn new(kind: SizeKind) -> Self {
        SizeSpec { kind, upscale: false }
    }

    pub fn upscaled(kind: SizeKind) -> Self {
        SizeSpec { kind, upscale: true }
    }
}

/// The `rotation` parameter. Degrees are kept in `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rotation {
    degrees: Decimal,
    pub mirrored: bool,
}

impl Rotation {
    pub const NONE: Rotation = Rotation { degrees: Decimal::ZERO, mirrored: false };

    /// Returns `None` for angles above 360; exactly 360 maps to 0.
    pub fn new(degrees: Decimal, mirrored: bool) -> Option<Self> {
        match degrees.cmp_int(360) {
            std::cmp::Ordering::Greater => None,
            std::cmp::Ordering::Equal => Some(Rotation { degrees: Decimal::ZERO, mirrored }),
            std::cmp::Ordering::Less => Some(Rotation { degrees, mirrored }),
        }
    }

    pub fn degrees(self) -> Decimal {
        self.degrees
    }

    /// Number of clockwise quarter turns when the angle is a multiple of 90.
    pub fn quarter_turns(self) -> Option<u8> {
        if self.degrees.scale() != 0 || !self.degrees.units().is_multiple_of(90) {
            return None;
        }
        Some((self.degrees.units() / 90) as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quality {
    Color,
    Gray,
    Bitonal,
    Default,
}

impl Quality {
    pub const ALL: [Quality; 4] = [Quality::Color, Quality::Gray, Quality::Bitonal, Quality::Default];

    pub fn as_str(self) -> &'static str {
        match self {
            Quality::Color => "color",
            Quality::Gray => "gray",
            Quality::Bitonal => "bitonal",
            Quality::Default => "default",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        Quality::ALL.into_iter().find(|q| q.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Jpg,
    Png,
    Tif,
    Gif,
    Webp,
}

impl Format {
    pub const ALL: [Format; 5] = [Format::Jpg, Format::Png, Format::Tif, Format::Gif, Format::Webp];

    pub fn extension(self) -> &'static str {
        match self {
            Format::Jpg => "jpg",
            Format::Png => "png",
            Format::Tif => "tif",
            Format::Gif => "gif",
            Format::Webp => "webp",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            Format::Jpg => "image/jpeg",
            Format::Png => "image/png",
            Format::Tif => "image/tiff",
            Format::Gif => "image/gif",
            Format::Webp => "image/webp",
        }
    }

    pub fn from_extension(s: &str) -> Option<Self> {
        Format::ALL.into_iter().find(|f| f.extension() == s)
    }

    pub fn supports_alpha(self) -> bool {
        !matches!(self, Format::Jpg)
    }

    /// Formats whose encoding reproduces pixels exactly.
    pub fn is_lossless(self) -> bool {
        matches!(self, Format::Png | Format::Tif | Format::Webp)
    }
}

/// A fully typed image request. `identifier` holds the decoded identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImageRequest {
    pub identifier: String,
    pub region: Region,
    pub size: SizeSpec,
    pub rotation: Rotation,
    pub quality: Quality,
    pub format: Format,
}

impl ImageRequest {
    /// `{identifier}/full/max/0/default.{format}`
    pub fn full(identifier: impl Into<String>, format: Format) -> Self {
        ImageRequest {
            identifier: identifier.into(),
            region: Region::Full,
            size: SizeSpec::MAX,
            rotation: Rotation::NONE,
            quality: Quality::Default,
            format,
        }
    }

    /// The four parameter segments, `{region}/{size}/{rotation}/{quality}.{format}`.
    pub fn params_path(&self) -> String {
        format!(
            "{}/{}/{}/{}.{}",
            self.region,
            self.size,
            self.rotation,
            self.quality.as_str(),
            self.format.extension()
        )
    }
}

/// Renders the request path with the identifier percent-encoded, so that
/// `parse_image_request(&req.to_string()) == Ok(req)`.
impl fmt::Display for ImageRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", base::encode_identifier(&self.identifier), self.params_path())
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Full => f.write_str("full"),
            Region::Square => f.write_str("square"),
            Region::Absolute { x, y, w, h } => write!(f, "{x},{y},{w},{h}"),
            Region::Percent { x, y, w, h } => write!(f, "pct:{x},{y},{w},{h}"),
        }
    }
}

impl fmt::Display for SizeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.upscale {
            f.write_str("^")?;
        }
        match self.kind {
            SizeKind::Max => f.write_str("max"),
            SizeKind::WidthOnly { w } => write!(f, "{w},"),
            SizeKind::HeightOnly { h } => write!(f, ",{h}"),
            SizeKind::Percent { n } => write!(f, "pct:{n}"),
            SizeKind::Exact { w, h } => write!(f, "{w},{h}"),
            SizeKind::BestFit { w, h } => write!(f, "!{w},{h}"),
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mirrored {
            f.write_str("!")?;
        }
        write!(f, "{}", self.degrees)
    }
}
