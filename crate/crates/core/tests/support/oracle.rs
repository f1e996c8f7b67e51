//! Brute-force per-pixel reference for region, size, rotation and quality,
//! in exact rational arithmetic and plain nested loops.

#![allow(dead_code)]

use iiif_core::pipeline::{execute_with, PipelineOptions, Raster, ResampleKernel, SourceImage};
use iiif_core::request::parse_image_request;
use iiif_core::ServerLimits;
use num_rational::Ratio;

type Q = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub w: usize,
    pub h: usize,
    pub px: Vec<[u8; 4]>,
}

impl Grid {
    pub fn from_fn(w: usize, h: usize, f: impl Fn(usize, usize) -> [u8; 4]) -> Grid {
        let mut px = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                px.push(f(x, y));
            }
        }
        Grid { w, h, px }
    }

    /// Every pixel distinct for grids up to 16x16.
    pub fn distinct(w: usize, h: usize) -> Grid {
        Grid::from_fn(w, h, |x, y| {
            let i = (y * 16 + x) as u8;
            [i, 255 - i, i.wrapping_mul(37).wrapping_add(11), 255]
        })
    }

    pub fn at(&self, x: usize, y: usize) -> [u8; 4] {
        self.px[y * self.w + x]
    }

    pub fn to_raster(&self) -> Raster {
        Raster::from_fn(self.w as u32, self.h as u32, 3, |x, y| self.at(x as usize, y as usize))
    }
}

fn round_half_up(q: Q) -> i64 {
    (q + Q::new(1, 2)).floor().to_integer()
}

#[derive(Debug, Clone, Copy)]
pub enum RegionCase {
    Full,
    Square,
    Pixels(usize, usize, usize, usize),
    Percent(i64, i64, i64, i64),
}

impl RegionCase {
    pub fn token(self) -> String {
        match self {
            RegionCase::Full => "full".into(),
            RegionCase::Square => "square".into(),
            RegionCase::Pixels(x, y, w, h) => format!("{x},{y},{w},{h}"),
            RegionCase::Percent(x, y, w, h) => format!("pct:{x},{y},{w},{h}"),
        }
    }

    /// `(x, y, w, h)` inside a `fw`x`fh` image, or `None` when empty.
    pub fn rect(self, fw: usize, fh: usize) -> Option<(usize, usize, usize, usize)> {
        let (x, y, w, h) = match self {
            RegionCase::Full => return Some((0, 0, fw, fh)),
            RegionCase::Square => {
                let side = fw.min(fh);
                // margins differ by at most one, the extra pixel on the right/bottom
                let pick = |full: usize| (0..=full - side).find(|&o| (full - side - o) >= o && full - side - o - o <= 1);
                return Some((pick(fw)?, pick(fh)?, side, side));
            }
            RegionCase::Pixels(x, y, w, h) => (x, y, w, h),
            RegionCase::Percent(px, py, pw, ph) => {
                let of = |p: i64, full: usize| Q::new(p, 100) * Q::from_integer(full as i64);
                (
                    of(px, fw).floor().to_integer() as usize,
                    of(py, fh).floor().to_integer() as usize,
                    round_half_up(of(pw, fw)) as usize,
                    round_half_up(of(ph, fh)) as usize,
                )
            }
        };
        if x >= fw || y >= fh || w == 0 || h == 0 {
            return None;
        }
        Some((x, y, w.min(fw - x), h.min(fh - y)))
    }
}

pub fn crop(g: &Grid, (x0, y0, w, h): (usize, usize, usize, usize)) -> Grid {
    Grid::from_fn(w, h, |x, y| g.at(x0 + x, y0 + y))
}

pub fn resize(g: &Grid, tw: usize, th: usize, kernel: ResampleKernel) -> Grid {
    // source position of a destination pixel centre, in source pixel units
    let centre = |d: usize, s: usize, t: usize| Q::new(2 * d as i64 + 1, 2) * Q::new(s as i64, t as i64);
    match kernel {
        ResampleKernel::Nearest => Grid::from_fn(tw, th, |x, y| {
            let sx = (centre(x, g.w, tw).floor().to_integer() as usize).min(g.w - 1);
            let sy = (centre(y, g.h, th).floor().to_integer() as usize).min(g.h - 1);
            g.at(sx, sy)
        }),
        ResampleKernel::Bilinear => {
            // (lower index, upper index, weight of upper)
            let axis = |d: usize, s: usize, t: usize| -> (usize, usize, Q) {
                let p = centre(d, s, t) - Q::new(1, 2);
                if p <= Q::from_integer(0) {
                    return (0, 0, Q::from_integer(0));
                }
                let lo = p.floor().to_integer() as usize;
                if lo >= s - 1 {
                    return (s - 1, s - 1, Q::from_integer(0));
                }
                (lo, lo + 1, p - p.floor())
            };
            Grid::from_fn(tw, th, |x, y| {
                let (x0, x1, fx) = axis(x, g.w, tw);
                let (y0, y1, fy) = axis(y, g.h, th);
                let one = Q::from_integer(1);
                let mut out = [0u8; 4];
                for (c, slot) in out.iter_mut().enumerate() {
                    let v = |xx: usize, yy: usize| Q::from_integer(i64::from(g.at(xx, yy)[c]));
                    let sum = v(x0, y0) * (one - fx) * (one - fy)
                        + v(x1, y0) * fx * (one - fy)
                        + v(x0, y1) * (one - fx) * fy
                        + v(x1, y1) * fx * fy;
                    *slot = round_half_up(sum) as u8;
                }
                out
            })
        }
    }
}

pub fn mirror(g: &Grid) -> Grid {
    let mut px = g.px.clone();
    for row in px.chunks_mut(g.w) {
        row.reverse();
    }
    Grid { px, ..g.clone() }
}

/// Clockwise rotation by a multiple of 90, by scattering each source pixel
/// to its destination.
pub fn rotate(g: &Grid, degrees: u32) -> Grid {
    let mut out = g.clone();
    for _ in 0..(degrees / 90) % 4 {
        let (w, h) = (out.w, out.h);
        let mut px = vec![[0u8; 4]; w * h];
        for y in 0..h {
            for x in 0..w {
                // new width is h; (x, y) lands at column h-1-y, row x
                px[x * h + (h - 1 - y)] = out.at(x, y);
            }
        }
        out = Grid { w: h, h: w, px };
    }
    out
}

pub fn luma(p: [u8; 4]) -> u8 {
    let q = Q::new(299 * i64::from(p[0]) + 587 * i64::from(p[1]) + 114 * i64::from(p[2]), 1000);
    round_half_up(q) as u8
}

pub fn quality(g: &Grid, q: &str) -> Grid {
    match q {
        "gray" => Grid::from_fn(g.w, g.h, |x, y| {
            let l = luma(g.at(x, y));
            [l, l, l, 255]
        }),
        "bitonal" => Grid::from_fn(g.w, g.h, |x, y| {
            let v = if luma(g.at(x, y)) >= 128 { 255 } else { 0 };
            [v, v, v, 255]
        }),
        _ => g.clone(),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Scale {
    Max,
    Down(usize),
    Up(usize),
}

/// Size tokens for a scale against a `rw`x`rh` region, with the expected
/// output dimensions. Downscales only apply when the factor divides evenly.
pub fn size_tokens(scale: Scale, rw: usize, rh: usize) -> Vec<(String, usize, usize)> {
    match scale {
        Scale::Max => vec![("max".into(), rw, rh)],
        Scale::Down(k) if rw.is_multiple_of(k) && rh.is_multiple_of(k) => {
            let (w, h) = (rw / k, rh / k);
            let mut v = vec![
                (format!("{w},{h}"), w, h),
                (format!("{w},"), w, h),
                (format!(",{h}"), w, h),
                (format!("!{w},{h}"), w, h),
            ];
            if 100 % k == 0 {
                v.push((format!("pct:{}", 100 / k), w, h));
            }
            v
        }
        Scale::Down(_) => Vec::new(),
        Scale::Up(k) => {
            let (w, h) = (rw * k, rh * k);
            vec![(format!("^{w},{h}"), w, h), (format!("^{w},"), w, h), (format!("^pct:{}", 100 * k), w, h)]
        }
    }
}

#[derive(Debug, Clone)]
pub struct Case {
    pub source: Grid,
    pub path: String,
    pub kernel: ResampleKernel,
    pub expected: Grid,
}

pub const REGIONS: [RegionCase; 6] = [
    RegionCase::Full,
    RegionCase::Square,
    RegionCase::Pixels(2, 1, 4, 4),
    RegionCase::Pixels(3, 2, 40, 40),
    RegionCase::Percent(25, 25, 50, 50),
    RegionCase::Percent(0, 50, 100, 50),
];
pub const SCALES: [Scale; 4] = [Scale::Max, Scale::Down(2), Scale::Up(2), Scale::Up(3)];
pub const ROTATIONS: [&str; 8] = ["0", "90", "180", "270", "!0", "!90", "!180", "!270"];
pub const QUALITIES: [&str; 4] = ["default", "color", "gray", "bitonal"];

/// The full grid of cases over several source shapes and both kernels.
pub fn cases() -> Vec<Case> {
    let mut out = Vec::new();
    for (w, h) in [(16, 16), (12, 8), (7, 5)] {
        let source = Grid::distinct(w, h);
        for region in REGIONS {
            let Some(rect) = region.rect(w, h) else { continue };
            let cropped = crop(&source, rect);
            for scale in SCALES {
                for (size, tw, th) in size_tokens(scale, rect.2, rect.3) {
                    for kernel in [ResampleKernel::Nearest, ResampleKernel::Bilinear] {
                        let resized = resize(&cropped, tw, th, kernel);
                        for rot in ROTATIONS {
                            let (mirrored, deg) = match rot.strip_prefix('!') {
                                Some(d) => (true, d),
                                None => (false, rot),
                            };
                            let flipped = if mirrored { mirror(&resized) } else { resized.clone() };
                            let rotated = rotate(&flipped, deg.parse().unwrap());
                            for q in QUALITIES {
                                out.push(Case {
                                    source: source.clone(),
                                    path: format!("x/{}/{size}/{rot}/{q}.png", region.token()),
                                    kernel,
                                    expected: quality(&rotated, q),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Runs one case through the pipeline and decodes the PNG it produces.
pub fn check(case: &Case) -> Result<(), String> {
    let req = parse_image_request(&case.path).map_err(|e| format!("{}: {e}", case.path))?;
    let src = SourceImage::from_raster(case.source.to_raster());
    let opts = PipelineOptions { kernel: case.kernel };
    let enc = execute_with(&req, &src, &ServerLimits::default(), &opts).map_err(|e| format!("{}: {e}", case.path))?;
    let img = image::load_from_memory(&enc.bytes).map_err(|e| e.to_string())?.to_rgba8();
    let got = Grid::from_fn(img.width() as usize, img.height() as usize, |x, y| img.get_pixel(x as u32, y as u32).0);
    if got == case.expected {
        Ok(())
    } else {
        let diff = got.px.iter().zip(&case.expected.px).position(|(a, b)| a != b);
        Err(format!(
            "{} ({:?}): got {}x{}, want {}x{}, first differing pixel {:?}",
            case.path, case.kernel, got.w, got.h, case.expected.w, case.expected.h, diff
        ))
    }
}
