use thiserror::Error;

use super::base::decode_segment;
use super::{Decimal, Format, ImageRequest, Quality, Region, Rotation, SizeKind, SizeSpec};

/// A rejected request path. Every variant names the offending segment.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// `found` counts `quality` and `format` separately, so a well-formed path has 6.
    #[error("expected 6 segments {{identifier}}/{{region}}/{{size}}/{{rotation}}/{{quality}}.{{format}}, found {found}")]
    WrongSegmentCount { found: usize },
    #[error("malformed identifier segment `{0}`")]
    MalformedIdentifier(String),
    #[error("malformed region segment `{0}`")]
    MalformedRegion(String),
    #[error("malformed size segment `{0}`")]
    MalformedSize(String),
    #[error("malformed rotation segment `{0}`")]
    MalformedRotation(String),
    #[error("unknown quality `{0}`")]
    UnknownQuality(String),
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
}

impl ParseError {
    /// Name of the grammar segment that failed.
    pub fn segment(&self) -> &'static str {
        match self {
            ParseError::WrongSegmentCount { .. } => "path",
            ParseError::MalformedIdentifier(_) => "identifier",
            ParseError::MalformedRegion(_) => "region",
            ParseError::MalformedSize(_) => "size",
            ParseError::MalformedRotation(_) => "rotation",
            ParseError::UnknownQuality(_) => "quality",
            ParseError::UnknownFormat(_) => "format",
        }
    }

    /// The raw token that failed, when there is one.
    pub fn token(&self) -> Option<&str> {
        match self {
            ParseError::WrongSegmentCount { .. } => None,
            ParseError::MalformedIdentifier(s)
            | ParseError::MalformedRegion(s)
            | ParseError::MalformedSize(s)
            | ParseError::MalformedRotation(s)
            | ParseError::UnknownQuality(s)
            | ParseError::UnknownFormat(s) => Some(s),
        }
    }
}

/// Parses `{identifier}/{region}/{size}/{rotation}/{quality}.{format}`.
///
/// The path is split on `/` before each segment is percent-decoded, so an
/// identifier containing `%2F` stays a single segment.
pub fn parse_image_request(path: &str) -> Result<ImageRequest, ParseError> {
    let segments: Vec<&str> = path.split('/').collect();
    let dotted = segments.last().is_some_and(|last| last.contains('.'));
    if segments.len() != 5 || !dotted {
        return Err(ParseError::WrongSegmentCount { found: segments.len() + usize::from(dotted) });
    }
    let mut decoded = Vec::with_capacity(5);
    for (i, raw) in segments.iter().enumerate() {
        match decode_segment(raw) {
            Some(s) => decoded.push(s),
            None => return Err(error_for_position(i, raw)),
        }
    }
    parse_segments(&decoded[0], &decoded[1], &decoded[2], &decoded[3], &decoded[4])
}

fn error_for_position(i: usize, raw: &str) -> ParseError {
    let raw = raw.to_string();
    match i {
        0 => ParseError::MalformedIdentifier(raw),
        1 => ParseError::MalformedRegion(raw),
        2 => ParseError::MalformedSize(raw),
        3 => ParseError::MalformedRotation(raw),
        _ => ParseError::UnknownQuality(raw),
    }
}

/// Parses already-split, already-decoded segments.
pub(crate) fn parse_segments(
    identifier: &str,
    region: &str,
    size: &str,
    rotation: &str,
    quality_format: &str,
) -> Result<ImageRequest, ParseError> {
    if identifier.is_empty() {
        return Err(ParseError::MalformedIdentifier(identifier.to_string()));
    }
    let (quality, format) = quality_format
        .rsplit_once('.')
        .ok_or(ParseError::WrongSegmentCount { found: 5 })?;
    let region = parse_region(region).ok_or_else(|| ParseError::MalformedRegion(region.into()))?;
    let size = parse_size(size).ok_or_else(|| ParseError::MalformedSize(size.into()))?;
    let rotation =
        parse_rotation(rotation).ok_or_else(|| ParseError::MalformedRotation(rotation.into()))?;
    let quality =
        Quality::from_token(quality).ok_or_else(|| ParseError::UnknownQuality(quality.into()))?;
    let format =
        Format::from_extension(format).ok_or_else(|| ParseError::UnknownFormat(format.into()))?;
    Ok(ImageRequest {
        identifier: identifier.to_string(),
        region,
        size,
        rotation,
        quality,
        format,
    })
}

fn parse_uint(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_positive(s: &str) -> Option<u32> {
    parse_uint(s).filter(|&v| v > 0)
}

fn split4(s: &str) -> Option<[&str; 4]> {
    let mut it = s.split(',');
    let out = [it.next()?, it.next()?, it.next()?, it.next()?];
    it.next().is_none().then_some(out)
}

pub(crate) fn parse_region(s: &str) -> Option<Region> {
    match s {
        "full" => return Some(Region::Full),
        "square" => return Some(Region::Square),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("pct:") {
        let [x, y, w, h] = split4(rest)?;
        let (x, y, w, h) =
            (Decimal::parse(x)?, Decimal::parse(y)?, Decimal::parse(w)?, Decimal::parse(h)?);
        if w.is_zero() || h.is_zero() || x.cmp_int(100).is_ge() || y.cmp_int(100).is_ge() {
            return None;
        }
        return Some(Region::Percent { x, y, w, h });
    }
    let [x, y, w, h] = split4(s)?;
    Some(Region::Absolute {
        x: parse_uint(x)?,
        y: parse_uint(y)?,
        w: parse_positive(w)?,
        h: parse_positive(h)?,
    })
}

pub(crate) fn parse_size(s: &str) -> Option<SizeSpec> {
    let (upscale, body) = match s.strip_prefix('^') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let kind = if body == "max" {
        SizeKind::Max
    } else if let Some(n) = body.strip_prefix("pct:") {
        let n = Decimal::parse(n).filter(|n| !n.is_zero())?;
        SizeKind::Percent { n }
    } else if let Some(rest) = body.strip_prefix('!') {
        let (w, h) = rest.split_once(',')?;
        SizeKind::BestFit { w: parse_positive(w)?, h: parse_positive(h)? }
    } else {
        match body.split_once(',')? {
            ("", h) => SizeKind::HeightOnly { h: parse_positive(h)? },
            (w, "") => SizeKind::WidthOnly { w: parse_positive(w)? },
            (w, h) => SizeKind::Exact { w: parse_positive(w)?, h: parse_positive(h)? },
        }
    };
    Some(SizeSpec { kind, upscale })
}

pub(crate) fn parse_rotation(s: &str) -> Option<Rotation> {
    let (mirrored, body) = match s.strip_prefix('!') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    Rotation::new(Decimal::parse(body)?, mirrored)
}
