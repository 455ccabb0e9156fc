//! Geometric transforms by inverse mapping: every output pixel centre is
//! mapped back into the source image and sampled there.
//!
//! Pixel centres sit at integer coordinates. Rotation is about the image
//! centre `((w−1)/2, (h−1)/2)`; positive angles turn the picture clockwise
//! as displayed (y axis pointing down).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Real;

const EDGE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Interpolation {
    Nearest,
    #[default]
    Bilinear,
}

impl FromStr for Interpolation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(Interpolation::Nearest),
            "bilinear" => Ok(Interpolation::Bilinear),
            other => Err(Error::param(
                "interp",
                format!("`{other}` (expected `nearest` or `bilinear`)"),
            )),
        }
    }
}

impl fmt::Display for Interpolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interpolation::Nearest => "nearest",
            Interpolation::Bilinear => "bilinear",
        })
    }
}

/// What an inverse-mapped coordinate outside the source reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Border {
    Zero,
    Clamp,
}

/// Output-to-input affine map
/// `(x, y) ↦ (a11·x + a12·y + tx, a21·x + a22·y + ty)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    a11: f64,
    a12: f64,
    tx: f64,
    a21: f64,
    a22: f64,
    ty: f64,
}

impl AffineMap {
    /// Rejects maps whose linear part has `|det| <= 1e-12`.
    pub fn new(a11: f64, a12: f64, tx: f64, a21: f64, a22: f64, ty: f64) -> Result<Self> {
        let m = AffineMap {
            a11,
            a12,
            tx,
            a21,
            a22,
            ty,
        };
        if [a11, a12, tx, a21, a22, ty].iter().any(|v| !v.is_finite()) {
            return Err(Error::param("map", "entries must be finite"));
        }
        let det = m.determinant();
        if det.abs() <= 1e-12 {
            return Err(Error::SingularMap(det));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        AffineMap::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0).unwrap()
    }

    /// Row-major `[a11, a12, tx, a21, a22, ty]`.
    pub fn from_row_major(m: [f64; 6]) -> Result<Self> {
        AffineMap::new(m[0], m[1], m[2], m[3], m[4], m[5])
    }

    pub fn to_row_major(&self) -> [f64; 6] {
        [self.a11, self.a12, self.tx, self.a21, self.a22, self.ty]
    }

    pub fn determinant(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.a11 * x + self.a12 * y + self.tx,
            self.a21 * x + self.a22 * y + self.ty,
        )
    }
}

/// `(sin, cos)` of an angle in degrees, exact at multiples of 90°.
pub fn sin_cos_degrees(degrees: f64) -> (f64, f64) {
    let d = degrees.rem_euclid(360.0);
    if d == 0.0 {
        (0.0, 1.0)
    } else if d == 90.0 {
        (1.0, 0.0)
    } else if d == 180.0 {
        (0.0, -1.0)
    } else if d == 270.0 {
        (-1.0, 0.0)
    } else {
        d.to_radians().sin_cos()
    }
}

/// Canvas holding a `w × h` image rotated by `degrees`:
/// `ceil(w|cos| + h|sin|) × ceil(w|sin| + h|cos|)`.
pub fn rotated_dimensions(width: usize, height: usize, degrees: f64) -> (usize, usize) {
    let (s, c) = sin_cos_degrees(degrees);
    let (w, h) = (width as f64, height as f64);
    let fit = |v: f64| ((v - EDGE_EPS).ceil() as usize).max(1);
    (fit(w * c.abs() + h * s.abs()), fit(w * s.abs() + h * c.abs()))
}

/// Inverse map used by [`rotate`] for a `width × height` source.
pub fn rotation_map(width: usize, height: usize, degrees: f64) -> AffineMap {
    let (s, c) = sin_cos_degrees(degrees);
    let (out_w, out_h) = rotated_dimensions(width, height, degrees);
    let (cxi, cyi) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
    let (cxo, cyo) = ((out_w as f64 - 1.0) / 2.0, (out_h as f64 - 1.0) / 2.0);
    AffineMap::new(c, s, cxi - c * cxo - s * cyo, -s, c, cyi + s * cxo - c * cyo)
        .expect("rotations are never singular")
}

fn sample<T: Real>(img: &Image<T>, sx: f64, sy: f64, interp: Interpolation, border: Border) -> T {
    let (w, h) = (img.width() as f64, img.height() as f64);
    let inside = |v: f64, n: f64| v >= -EDGE_EPS && v <= n - 1.0 + EDGE_EPS;
    match interp {
        Interpolation::Nearest => {
            let (ix, iy) = (sx.round(), sy.round());
            if ix >= 0.0 && ix < w && iy >= 0.0 && iy < h {
                img.get(ix as usize, iy as usize)
            } else if border == Border::Clamp {
                img.get_clamped(ix as isize, iy as isize)
            } else {
                T::zero()
            }
        }
        Interpolation::Bilinear => {
            if border == Border::Zero && !(inside(sx, w) && inside(sy, h)) {
                return T::zero();
            }
            let sx = sx.clamp(0.0, w - 1.0);
            let sy = sy.clamp(0.0, h - 1.0);
            let (x0, y0) = (sx.floor(), sy.floor());
            let (fx, fy) = (T::lit(sx - x0), T::lit(sy - y0));
            let (x0, y0) = (x0 as usize, y0 as usize);
            let x1 = (x0 + 1).min(img.width() - 1);
            let y1 = (y0 + 1).min(img.height() - 1);
            let (v00, v10) = (img.get(x0, y0), img.get(x1, y0));
            let (v01, v11) = (img.get(x0, y1), img.get(x1, y1));
            let top = v00 + fx * (v10 - v00);
            let bottom = v01 + fx * (v11 - v01);
            top + fy * (bottom - top)
        }
    }
}

fn warp<T: Real>(
    img: &Image<T>,
    map: &AffineMap,
    out_w: usize,
    out_h: usize,
    interp: Interpolation,
    border: Border,
) -> Image<T> {
    Image::from_fn(out_w, out_h, |x, y| {
        let (sx, sy) = map.apply(x as f64, y as f64);
        sample(img, sx, sy, interp, border)
    })
}

/// Samples `img` at `map·(x, y, 1)` for every pixel of an `out_w × out_h`
/// canvas; coordinates outside the source read 0.
pub fn affine_warp<T: Real>(
    img: &Image<T>,
    map: &AffineMap,
    out_w: usize,
    out_h: usize,
    interp: Interpolation,
) -> Result<Image<T>> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::param("size", "output dimensions must be at least 1"));
    }
    AffineMap::new(map.a11, map.a12, map.tx, map.a21, map.a22, map.ty)?;
    Ok(warp(img, map, out_w, out_h, interp, Border::Zero))
}

/// Rotation about the image centre onto the bounding-box canvas, with black
/// corners.
pub fn rotate<T: Real>(img: &Image<T>, degrees: f64, interp: Interpolation) -> Result<Image<T>> {
    if !degrees.is_finite() {
        return Err(Error::param("degrees", "must be finite"));
    }
    let (out_w, out_h) = rotated_dimensions(img.width(), img.height(), degrees);
    let map = rotation_map(img.width(), img.height(), degrees);
    Ok(warp(img, &map, out_w, out_h, interp, Border::Zero))
}

/// Uniform scaling to `round(factor · w) × round(factor · h)`.
///
/// Pixel areas are aligned (`sx = (x + ½)·w/W − ½`) and the border is
/// replicated rather than zero-filled.
pub fn zoom<T: Real>(img: &Image<T>, factor: f64, interp: Interpolation) -> Result<Image<T>> {
    if !factor.is_finite() || factor <= 0.0 {
        return Err(Error::param("factor", format!("{factor} must be positive and finite")));
    }
    let out_w = (factor * img.width() as f64).round() as usize;
    let out_h = (factor * img.height() as f64).round() as usize;
    if out_w == 0 || out_h == 0 {
        return Err(Error::param(
            "factor",
            format!("{factor} shrinks {}x{} to nothing", img.width(), img.height()),
        ));
    }
    let kx = img.width() as f64 / out_w as f64;
    let ky = img.height() as f64 / out_h as f64;
    let map = AffineMap::new(kx, 0.0, 0.5 * kx - 0.5, 0.0, ky, 0.5 * ky - 0.5)?;
    Ok(warp(img, &map, out_w, out_h, interp, Border::Clamp))
}
