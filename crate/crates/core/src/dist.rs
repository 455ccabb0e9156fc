//! Exact Euclidean distance transforms.
//!
//! Distances are measured between pixel centres on the unit grid, from each
//! pixel to the nearest background (`false`) pixel. The exact transform is
//! the two-pass separable method of Meijster, Roerdink and Hesselink: a 1D
//! scan per column followed by a lower envelope of parabolas per row, all in
//! integer arithmetic.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Real;
use crate::BinaryImage;

/// Nearest-site map: squared distances plus, for every pixel, the linear
/// index of one nearest site.
pub(crate) struct FeatureTransform {
    pub squared: Image<u64>,
    pub nearest: Vec<usize>,
}

/// Column pass: for every pixel, the row of the nearest site in the same
/// column, or `None` if the column has no site.
fn nearest_in_columns(sites: &[bool], width: usize, height: usize) -> Vec<Option<u32>> {
    let mut above: Vec<Option<u32>> = vec![None; width * height];
    let mut last: Vec<Option<u32>> = vec![None; width];
    for y in 0..height {
        for x in 0..width {
            if sites[y * width + x] {
                last[x] = Some(y as u32);
            }
            above[y * width + x] = last[x];
        }
    }
    let mut next: Vec<Option<u32>> = vec![None; width];
    for y in (0..height).rev() {
        for (x, below) in next.iter_mut().enumerate() {
            let i = y * width + x;
            if sites[i] {
                *below = Some(y as u32);
            }
            above[i] = match (above[i], *below) {
                (Some(a), Some(b)) => Some(if y as u32 - a <= b - y as u32 { a } else { b }),
                (a, b) => a.or(b),
            };
        }
    }
    above
}

/// Lower envelope along one row. `g2[u]` is the squared column distance at
/// column `u` (`None` when the column holds no site); writes the squared
/// distance and nearest column for each pixel of the row.
fn envelope_row(g2: &[Option<i64>], out_sq: &mut [u64], out_col: &mut [usize]) {
    let m = g2.len();
    let f = |x: i64, i: usize| -> i64 {
        let d = x - i as i64;
        d * d + g2[i].expect("envelope holds finite columns only")
    };
    // Breakpoint: first x at which column v's parabola is at most column u's.
    let sep = |u: usize, v: usize| -> i64 {
        let (ui, vi) = (u as i64, v as i64);
        let num = vi * vi - ui * ui + g2[v].unwrap() - g2[u].unwrap();
        num.div_euclid(2 * (vi - ui))
    };
    let mut s: Vec<usize> = Vec::with_capacity(m);
    let mut t: Vec<i64> = Vec::with_capacity(m);
    for u in (0..m).filter(|&u| g2[u].is_some()) {
        while let (Some(&sq), Some(&tq)) = (s.last(), t.last()) {
            if f(tq, sq) > f(tq, u) {
                s.pop();
                t.pop();
            } else {
                break;
            }
        }
        match s.last() {
            None => {
                s.push(u);
                t.push(0);
            }
            Some(&sq) => {
                let w = 1 + sep(sq, u);
                if w < m as i64 {
                    s.push(u);
                    t.push(w);
                }
            }
        }
    }
    let mut q = s.len() - 1;
    for x in (0..m).rev() {
        out_sq[x] = f(x as i64, s[q]) as u64;
        out_col[x] = s[q];
        if q > 0 && x as i64 == t[q] {
            q -= 1;
        }
    }
}

/// Exact nearest-site transform of the `true` pixels of `sites`.
///
/// Returns `None` when there is no site at all.
pub(crate) fn feature_transform(sites: &BinaryImage) -> Option<FeatureTransform> {
    let (w, h) = sites.dimensions();
    if !sites.iter().any(|&s| s) {
        return None;
    }
    let rows = nearest_in_columns(sites.as_slice(), w, h);
    let mut squared = Image::filled(w, h, 0u64);
    let mut cols = vec![0usize; w * h];
    squared
        .as_mut_slice()
        .par_chunks_mut(w)
        .zip(cols.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (sq, col))| {
            let g2: Vec<Option<i64>> = rows[y * w..(y + 1) * w]
                .iter()
                .map(|r| r.map(|r| (r as i64 - y as i64).pow(2)))
                .collect();
            envelope_row(&g2, sq, col);
        });
    let nearest = cols
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let row = rows[(i / w) * w + x].expect("chosen column holds a site");
            row as usize * w + x
        })
        .collect();
    Some(FeatureTransform { squared, nearest })
}

/// Squared distance from every pixel to the nearest background pixel, as
/// exact integers.
pub fn edt_squared(mask: &BinaryImage) -> Result<Image<u64>> {
    feature_transform(&mask.complement())
        .map(|ft| ft.squared)
        .ok_or(Error::NoBackground)
}

/// Euclidean distance to the nearest background pixel.
pub fn edt<T: Real>(mask: &BinaryImage) -> Result<Image<T>> {
    Ok(edt_squared(mask)?.map(|&d| T::lit((d as f64).sqrt())))
}

/// Distance transform that only resolves distances up to `dmax`; farther
/// pixels read exactly `dmax`.
///
/// Work per pixel is proportional to `dmax`, so small limits are cheap. A
/// mask with no background at all saturates everywhere.
pub fn edt_limited<T: Real>(mask: &BinaryImage, dmax: T) -> Result<Image<T>> {
    if !dmax.is_finite() || dmax <= T::zero() {
        return Err(Error::param("dmax", format!("{dmax} must be positive and finite")));
    }
    let (w, h) = mask.dimensions();
    let limit = dmax.to_f64_lossy();
    let reach = (limit.floor() as usize).min(w.max(h));
    let cap = reach + 1;

    // Column distances, capped at reach + 1.
    let mut col = vec![cap; w * h];
    for x in 0..w {
        let mut run = cap;
        for y in 0..h {
            run = if mask.get(x, y) { (run + 1).min(cap) } else { 0 };
            col[y * w + x] = run;
        }
        let mut run = cap;
        for y in (0..h).rev() {
            run = if mask.get(x, y) { (run + 1).min(cap) } else { 0 };
            let c = &mut col[y * w + x];
            *c = (*c).min(run);
        }
    }

    let mut out = Image::filled(w, h, dmax);
    out.as_mut_slice()
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(y, row)| {
            let g = &col[y * w..(y + 1) * w];
            for (x, o) in row.iter_mut().enumerate() {
                let lo = x.saturating_sub(reach);
                let hi = (x + reach).min(w - 1);
                let best = (lo..=hi)
                    .filter(|&u| g[u] <= reach)
                    .map(|u| ((u as i64 - x as i64).pow(2) + (g[u] as i64).pow(2)) as u64)
                    .min();
                if let Some(sq) = best {
                    if sq as f64 <= limit * limit {
                        *o = T::lit((sq as f64).sqrt());
                    }
                }
            }
        });
    Ok(out)
}

/// Squared distances as 16-bit samples, saturating at 65535. Also returns
/// how many pixels saturated.
pub fn squared_to_gray16(squared: &Image<u64>) -> (Image<u16>, usize) {
    let clamped = squared.iter().filter(|&&d| d > u64::from(u16::MAX)).count();
    (squared.map(|&d| d.min(u64::from(u16::MAX)) as u16), clamped)
}
