//! Escape-time images of dynamical and parameter planes with ray overlays,
//! written as binary PPM.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::angle::Angle;
use crate::cubic::{CubicMap, RayTrace, C};
use crate::error::{Error, Result};

pub const ESCAPE_RADIUS: f64 = 1e6;
pub const MAX_ITER: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB triples, top row first.
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Image {
        Image { width, height, pixels: vec![0; 3 * width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> io::Result<Image> {
        let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header is not ASCII"))?);
        }
        pos += 1;
        if fields[0] != "P6" || fields[3] != "255" {
            return Err(bad("not a P6 image with maxval 255"));
        }
        let width: usize = fields[1].parse().map_err(|_| bad("bad width"))?;
        let height: usize = fields[2].parse().map_err(|_| bad("bad height"))?;
        let payload = bytes.get(pos..).ok_or_else(|| bad("missing payload"))?;
        if payload.len() != 3 * width * height {
            return Err(bad("payload size does not match header"));
        }
        Ok(Image { width, height, pixels: payload.to_vec() })
    }
}

pub fn write_ppm(img: &Image, path: &Path) -> io::Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&img.to_ppm())?;
    f.flush()
}

pub fn read_ppm(path: &Path) -> io::Result<Image> {
    Image::from_ppm(&fs::read(path)?)
}

/// A view of the plane; the vertical extent follows from the aspect ratio
/// of the image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub center: C,
    pub half_width: f64,
}

impl Window {
    pub fn new(center: C, half_width: f64) -> Result<Window> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!("half width must be positive, got {half_width}")));
        }
        Ok(Window { center, half_width })
    }

    /// Center of pixel `(x, y)`. Offsets are symmetric about the window
    /// center, so `a -> -a` maps pixel centers onto pixel centers.
    pub fn point(&self, x: usize, y: usize, width: usize, height: usize) -> C {
        let scale = self.half_width / width as f64;
        let re = (2.0 * x as f64 + 1.0 - width as f64) * scale;
        let im = -(2.0 * y as f64 + 1.0 - height as f64) * scale;
        self.center + C::new(re, im)
    }

    /// Continuous pixel coordinates of `z`.
    pub fn to_pixel(&self, z: C, width: usize, height: usize) -> (f64, f64) {
        let scale = self.half_width / width as f64;
        let d = z - self.center;
        ((d.re / scale + width as f64 - 1.0) / 2.0, (-d.im / scale + height as f64 - 1.0) / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Palette {
    pub interior: [u8; 3],
    /// Exterior colors cycled by smoothed escape time.
    pub bands: Vec<[u8; 3]>,
    pub band_width: f64,
    /// Overlay colors, one per ray cycle.
    pub rays: Vec<[u8; 3]>,
}

impl Default for Palette {
    fn default() -> Palette {
        Palette {
            interior: [0, 0, 0],
            bands: vec![[255, 255, 255], [205, 215, 235], [120, 140, 190], [205, 215, 235]],
            band_width: 6.0,
            rays: vec![[220, 30, 30], [20, 140, 40], [30, 60, 220], [200, 120, 0], [150, 30, 170], [0, 150, 160]],
        }
    }
}

impl Palette {
    fn exterior(&self, smooth: f64) -> [u8; 3] {
        let u = (smooth / self.band_width).rem_euclid(self.bands.len() as f64);
        let i = u.floor() as usize % self.bands.len();
        let j = (i + 1) % self.bands.len();
        let f = u - u.floor();
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
        [
            mix(self.bands[i][0], self.bands[j][0]),
            mix(self.bands[i][1], self.bands[j][1]),
            mix(self.bands[i][2], self.bands[j][2]),
        ]
    }

    fn ray(&self, angle: &Angle) -> [u8; 3] {
        let (pre, per) = angle.preperiod_period(3);
        let mut x = angle.clone();
        for _ in 0..pre {
            x = x.mul(3);
        }
        let mut least = x.clone();
        for _ in 1..per {
            x = x.mul(3);
            least = least.min(x.clone());
        }
        let key = (least.num() + least.den()) % self.rays.len();
        let key: usize = key.to_string().parse().expect("small");
        self.rays[key]
    }
}

/// Smoothed escape time of `z` under `p`, or `None` if it stays bounded for
/// `MAX_ITER` steps.
fn escape_time(p: &CubicMap, z: C) -> Option<f64> {
    let mut w = z;
    for n in 0..MAX_ITER {
        let r = w.norm();
        if r > ESCAPE_RADIUS {
            return Some(n as f64 + 1.0 - (r.ln() / ESCAPE_RADIUS.ln()).ln() / 3f64.ln());
        }
        w = p.eval(w);
    }
    None
}

fn render_rows(width: usize, height: usize, pixel: impl Fn(usize, usize) -> [u8; 3] + Sync) -> Image {
    let mut img = Image::new(width, height);
    if width == 0 {
        return img;
    }
    img.pixels.par_chunks_mut(3 * width).enumerate().for_each(|(y, row)| {
        for x in 0..width {
            row[3 * x..3 * x + 3].copy_from_slice(&pixel(x, y));
        }
    });
    img
}

/// Clips the segment to `[lo, hi]^2` in pixel space.
fn clip(p: (f64, f64), q: (f64, f64), w: f64, h: f64) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (num, den) in [(p.0 + 0.5, -dx), (w - 0.5 - p.0, dx), (p.1 + 0.5, -dy), (h - 0.5 - p.1, dy)] {
        if den == 0.0 {
            if num < 0.0 {
                return None;
            }
        } else {
            let r = num / -den;
            if den < 0.0 {
                t1 = t1.min(r);
            } else {
                t0 = t0.max(r);
            }
        }
    }
    (t0 <= t1).then_some(((p.0 + t0 * dx, p.1 + t0 * dy), (p.0 + t1 * dx, p.1 + t1 * dy)))
}

fn draw_polyline(img: &mut Image, win: &Window, points: &[C], rgb: [u8; 3]) {
    let (w, h) = (img.width, img.height);
    for seg in points.windows(2) {
        let p = win.to_pixel(seg[0], w, h);
        let q = win.to_pixel(seg[1], w, h);
        if !(p.0.is_finite() && p.1.is_finite() && q.0.is_finite() && q.1.is_finite()) {
            continue;
        }
        let Some((p, q)) = clip(p, q, w as f64, h as f64) else { continue };
        let (x0, y0) = (p.0.round() as i64, p.1.round() as i64);
        let (x1, y1) = (q.0.round() as i64, q.1.round() as i64);
        // Bresenham
        let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
                img.set(x as usize, y as usize, rgb);
            }
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }
}

fn draw_overlays(img: &mut Image, win: &Window, overlays: &[RayTrace], palette: &Palette) {
    for tr in overlays {
        let mut pts: Vec<C> = tr.points.iter().map(|p| p.z).collect();
        if let Some(l) = tr.landing {
            pts.push(l);
        }
        draw_polyline(img, win, &pts, palette.ray(&tr.angle));
    }
}

/// Filled Julia set of `p`: escape-time bands outside, `palette.interior`
/// for orbits bounded over `MAX_ITER` steps, overlays drawn last.
pub fn render_julia(
    p: &CubicMap,
    win: &Window,
    res: (usize, usize),
    overlays: &[RayTrace],
    palette: &Palette,
) -> Image {
    let (w, h) = res;
    let mut img = render_rows(w, h, |x, y| match escape_time(p, win.point(x, y, w, h)) {
        Some(s) => palette.exterior(s),
        None => palette.interior,
    });
    draw_overlays(&mut img, win, overlays, palette);
    img
}

/// The `a`-plane of the lemon family colored by the escape time of the free
/// critical point `-2a`; bounded parameters form the connectedness locus.
pub fn render_param_lemon(win: &Window, res: (usize, usize), overlays: &[RayTrace], palette: &Palette) -> Image {
    let (w, h) = res;
    let mut img = render_rows(w, h, |x, y| {
        let a = win.point(x, y, w, h);
        match escape_time(&CubicMap::lemon(a), -2.0 * a) {
            Some(s) => palette.exterior(s),
            None => palette.interior,
        }
    });
    draw_overlays(&mut img, win, overlays, palette);
    img
}
