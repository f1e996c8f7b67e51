//! Pixel operations applied by the pipeline.

use serde::{Deserialize, Serialize};

use super::raster::Raster;
use crate::request::{Quality, Rect};

/// Resampling kernel used for scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleKernel {
    Nearest,
    #[default]
    Bilinear,
}

pub fn crop(src: &Raster, rect: Rect) -> Raster {
    if rect.is_full(src.width(), src.height()) {
        return src.clone();
    }
    Raster::from_fn(rect.w, rect.h, src.channels(), |x, y| src.rgba(rect.x + x, rect.y + y))
}

/// Source sample position for destination index `d` along one axis, as a
/// lower index plus the weight (out of `den`) of the next index.
///
/// Pixel centers are aligned: `src = (d + 0.5) * s / t - 0.5`, clamped to the
/// edge pixels.
fn bilinear_axis(d: u32, src_len: u32, dst_len: u32) -> (u32, u32, u64, u64) {
    let den = 2 * u64::from(dst_len);
    let num = (2 * i64::from(d) + 1) * i64::from(src_len) - i64::from(dst_len);
    if num <= 0 {
        return (0, 0, 0, den);
    }
    let num = num as u64;
    let lo = (num / den) as u32;
    let frac = num % den;
    if lo >= src_len - 1 {
        return (src_len - 1, src_len - 1, 0, den);
    }
    (lo, lo + 1, frac, den)
}

fn nearest_axis(d: u32, src_len: u32, dst_len: u32) -> u32 {
    let pos = (2 * u64::from(d) + 1) * u64::from(src_len) / (2 * u64::from(dst_len));
    (pos as u32).min(src_len - 1)
}

/// Scales to `w`x`h`. Weights are exact integers and the result rounds half
/// up, so output is reproducible bit for bit.
pub fn resize(src: &Raster, w: u32, h: u32, kernel: ResampleKernel) -> Raster {
    if (w, h) == (src.width(), src.height()) {
        return src.clone();
    }
    let (sw, sh) = (src.width(), src.height());
    let ch = src.channels() as usize;
    match kernel {
        ResampleKernel::Nearest => Raster::from_fn(w, h, src.channels(), |x, y| {
            src.rgba(nearest_axis(x, sw, w), nearest_axis(y, sh, h))
        }),
        ResampleKernel::Bilinear => {
            let cols: Vec<_> = (0..w).map(|x| bilinear_axis(x, sw, w)).collect();
            let rows: Vec<_> = (0..h).map(|y| bilinear_axis(y, sh, h)).collect();
            Raster::from_fn(w, h, src.channels(), |x, y| {
                let (x0, x1, fx, dx) = cols[x as usize];
                let (y0, y1, fy, dy) = rows[y as usize];
                let taps = [
                    (x0, y0, (dx - fx) * (dy - fy)),
                    (x1, y0, fx * (dy - fy)),
                    (x0, y1, (dx - fx) * fy),
                    (x1, y1, fx * fy),
                ];
                let den = dx * dy;
                let mut out = [0u8; 4];
                for (c, slot) in out.iter_mut().enumerate().take(ch) {
                    let sum: u64 = taps
                        .iter()
                        .map(|&(tx, ty, wgt)| u64::from(src.pixel(tx, ty)[c]) * wgt)
                        .sum();
                    *slot = ((2 * sum + den) / (2 * den)) as u8;
                }
                out
            })
        }
    }
}

pub fn mirror(src: &Raster) -> Raster {
    let w = src.width();
    Raster::from_fn(w, src.height(), src.channels(), |x, y| src.rgba(w - 1 - x, y))
}

/// Rotates clockwise by `turns` quarter turns.
pub fn rotate_quarter(src: &Raster, turns: u8) -> Raster {
    let (w, h) = (src.width(), src.height());
    match turns % 4 {
        0 => src.clone(),
        1 => Raster::from_fn(h, w, src.channels(), |x, y| src.rgba(y, h - 1 - x)),
        2 => Raster::from_fn(w, h, src.channels(), |x, y| src.rgba(w - 1 - x, h - 1 - y)),
        _ => Raster::from_fn(h, w, src.channels(), |x, y| src.rgba(w - 1 - y, x)),
    }
}

/// Dimensions of the box enclosing a `w`x`h` raster rotated by `degrees`.
pub fn rotated_bounds(w: u32, h: u32, degrees: f64) -> (u32, u32) {
    let (sin, cos) = degrees.to_radians().sin_cos();
    let (wf, hf) = (f64::from(w), f64::from(h));
    let bw = (wf * cos.abs() + hf * sin.abs()).round().max(1.0) as u32;
    let bh = (wf * sin.abs() + hf * cos.abs()).round().max(1.0) as u32;
    (bw, bh)
}

/// Rotates clockwise by an arbitrary angle, expanding the canvas to the
/// rotated bounding box. Uncovered pixels take `background`; samples are
/// nearest-neighbour. With `transparent` the output carries alpha.
pub fn rotate_arbitrary(src: &Raster, degrees: f64, background: [u8; 4], transparent: bool) -> Raster {
    let (w, h) = (src.width(), src.height());
    let (bw, bh) = rotated_bounds(w, h, degrees);
    let (sin, cos) = degrees.to_radians().sin_cos();
    let (scx, scy) = (f64::from(w) / 2.0, f64::from(h) / 2.0);
    let (dcx, dcy) = (f64::from(bw) / 2.0, f64::from(bh) / 2.0);
    let channels = if transparent { 4 } else { src.channels() };
    Raster::from_fn(bw, bh, channels, |x, y| {
        let ox = f64::from(x) + 0.5 - dcx;
        let oy = f64::from(y) + 0.5 - dcy;
        let sx = (ox * cos + oy * sin + scx).floor();
        let sy = (-ox * sin + oy * cos + scy).floor();
        if sx >= 0.0 && sy >= 0.0 && sx < f64::from(w) && sy < f64::from(h) {
            src.rgba(sx as u32, sy as u32)
        } else {
            background
        }
    })
}

/// Rec. 601 luma in integer arithmetic.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b) + 500) / 1000) as u8
}

pub const BITONAL_THRESHOLD: u8 = 128;

pub fn apply_quality(src: Raster, quality: Quality) -> Raster {
    let map: fn([u8; 4]) -> [u8; 4] = match quality {
        Quality::Default | Quality::Color => return src,
        Quality::Gray => |[r, g, b, a]| {
            let l = luma(r, g, b);
            [l, l, l, a]
        },
        Quality::Bitonal => |[r, g, b, a]| {
            let v = if luma(r, g, b) >= BITONAL_THRESHOLD { 255 } else { 0 };
            [v, v, v, a]
        },
    };
    Raster::from_fn(src.width(), src.height(), src.channels(), |x, y| map(src.rgba(x, y)))
}
