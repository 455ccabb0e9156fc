//! Spatial filters: separable Gaussian blur, square-window median and Sobel
//! edge detection. Every filter replicates the border pixels.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Real;
use crate::BinaryImage;

/// Sampled Gaussian truncated at `3σ` and renormalized to unit sum.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianKernel<T> {
    sigma: T,
    taps: Vec<T>,
}

impl<T: Real> GaussianKernel<T> {
    pub fn new(sigma: T) -> Result<Self> {
        if !sigma.is_finite() || sigma <= T::zero() {
            return Err(Error::param("sigma", format!("{sigma} must be positive and finite")));
        }
        let s = sigma.to_f64_lossy();
        let radius = (3.0 * s).ceil() as usize;
        let raw: Vec<f64> = (0..=2 * radius)
            .map(|i| {
                let d = i as f64 - radius as f64;
                (-d * d / (2.0 * s * s)).exp()
            })
            .collect();
        let sum: f64 = raw.iter().sum();
        let taps = raw.iter().map(|&v| T::lit(v / sum)).collect();
        Ok(GaussianKernel { sigma, taps })
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.taps.len() / 2
    }

    pub fn taps(&self) -> &[T] {
        &self.taps
    }
}

/// One pass of the 1D convolution along rows of `src`.
///
/// Written as `v + Σ k·(neighbour − v)` so that a locally constant signal is
/// reproduced bit for bit.
fn convolve_rows<T: Real>(src: &Image<T>, taps: &[T]) -> Image<T> {
    let (w, h) = src.dimensions();
    let r = (taps.len() / 2) as isize;
    let mut out = src.clone();
    out.as_mut_slice()
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(y, row_out)| {
            let row = src.row(y);
            for (x, o) in row_out.iter_mut().enumerate() {
                let centre = row[x];
                let mut acc = T::zero();
                for (i, &k) in taps.iter().enumerate() {
                    let sx = (x as isize + i as isize - r).clamp(0, w as isize - 1) as usize;
                    acc += k * (row[sx] - centre);
                }
                *o = centre + acc;
            }
        });
    debug_assert_eq!(out.height(), h);
    out
}

/// Same as [`convolve_rows`] but along columns.
fn convolve_cols<T: Real>(src: &Image<T>, taps: &[T]) -> Image<T> {
    let (w, h) = src.dimensions();
    let r = (taps.len() / 2) as isize;
    let mut out = src.clone();
    out.as_mut_slice()
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(y, row_out)| {
            for (x, o) in row_out.iter_mut().enumerate() {
                let centre = src.get(x, y);
                let mut acc = T::zero();
                for (i, &k) in taps.iter().enumerate() {
                    let sy = (y as isize + i as isize - r).clamp(0, h as isize - 1) as usize;
                    acc += k * (src.get(x, sy) - centre);
                }
                *o = centre + acc;
            }
        });
    out
}

/// Separable Gaussian blur, horizontal pass then vertical pass.
pub fn gaussian_blur<T: Real>(img: &Image<T>, sigma: T) -> Result<Image<T>> {
    let kernel = GaussianKernel::new(sigma)?;
    let tmp = convolve_rows(img, kernel.taps());
    Ok(convolve_cols(&tmp, kernel.taps()))
}

/// Lower median: the `⌈n/2⌉`-th order statistic (for even `n`, the lower of the
/// two middle values).
pub(crate) fn lower_median<T: Real>(values: &mut [T]) -> T {
    let mid = (values.len() - 1) / 2;
    let (_, m, _) = values.select_nth_unstable_by(mid, |a, b| {
        a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
    });
    *m
}

/// Median over the `(2r+1)×(2r+1)` window centred on each pixel.
pub fn median_filter<T: Real>(img: &Image<T>, radius: usize) -> Image<T> {
    if radius == 0 {
        return img.clone();
    }
    let w = img.width();
    let r = radius as isize;
    let side = 2 * radius + 1;
    let mut out = img.clone();
    out.as_mut_slice()
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(y, row_out)| {
            let mut window = Vec::with_capacity(side * side);
            for (x, o) in row_out.iter_mut().enumerate() {
                window.clear();
                for dy in -r..=r {
                    for dx in -r..=r {
                        window.push(img.get_clamped(x as isize + dx, y as isize + dy));
                    }
                }
                *o = lower_median(&mut window);
            }
        });
    out
}

/// Sobel gradient magnitude `sqrt(gx² + gy²)` with
/// `gx = [[-1,0,1],[-2,0,2],[-1,0,1]]` and `gy = gxᵀ`.
pub fn sobel_magnitude<T: Real>(img: &Image<T>) -> Image<T> {
    let two = T::lit(2.0);
    Image::from_fn(img.width(), img.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        let p = |dx: isize, dy: isize| img.get_clamped(x + dx, y + dy);
        let gx = (p(1, -1) + two * p(1, 0) + p(1, 1)) - (p(-1, -1) + two * p(-1, 0) + p(-1, 1));
        let gy = (p(-1, 1) + two * p(0, 1) + p(1, 1)) - (p(-1, -1) + two * p(0, -1) + p(1, -1));
        (gx * gx + gy * gy).sqrt()
    })
}

/// Edge mask: pixels whose Sobel magnitude is at least `t` times the maximum
/// magnitude. A flat image has no edges.
pub fn sobel_edges<T: Real>(img: &Image<T>, t: T) -> Result<BinaryImage> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::param("threshold", format!("{t} is outside [0, 1]")));
    }
    let mag = sobel_magnitude(img);
    let gmax = mag.iter().fold(T::zero(), |m, &v| m.max(v));
    if gmax <= T::zero() {
        return Ok(mag.map(|_| false));
    }
    Ok(mag.map(|&g| g / gmax >= t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_shape() {
        for sigma in [0.3, 1.0, 2.0, 2.5, 7.1] {
            let k = GaussianKernel::new(sigma).unwrap();
            let n = k.taps().len();
            assert_eq!(n, 2 * (3.0f64 * sigma).ceil() as usize + 1);
            assert!((k.taps().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..n {
                assert_eq!(k.taps()[i], k.taps()[n - 1 - i]);
                assert!(k.taps()[i] >= 0.0);
            }
        }
        assert!(GaussianKernel::new(0.0f64).is_err());
        assert!(GaussianKernel::new(-1.0f64).is_err());
        assert!(GaussianKernel::new(f64::NAN).is_err());
    }

    #[test]
    fn blur_keeps_constants_exactly() {
        for c in [0.0, 0.1, 0.37, 1.0, 123.456] {
            let img = Image::filled(9, 7, c);
            let out = gaussian_blur(&img, 2.0).unwrap();
            assert!(out.iter().all(|&v| v == c));
        }
    }

    #[test]
    fn impulse_response_matches_sampled_gaussian() {
        let n = 31;
        let c = n / 2;
        let img = Image::from_fn(n, n, |x, y| if x == c && y == c { 1.0 } else { 0.0 });
        let out = gaussian_blur(&img, 2.0).unwrap();
        let peak = out.get(c, c);
        for dy in -6i32..=6 {
            for dx in -6i32..=6 {
                let expected = (-((dx * dx + dy * dy) as f64) / 8.0).exp();
                let got = out.get((c as i32 + dx) as usize, (c as i32 + dy) as usize) / peak;
                assert!((got - expected).abs() / expected < 1e-3, "({dx},{dy}) {got} vs {expected}");
            }
        }
        // nothing beyond the truncation radius
        assert_eq!(out.get(c + 7, c), 0.0);
    }

    #[test]
    fn blur_preserves_mean_with_constant_margin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let img = Image::from_fn(40, 40, |x, y| {
            if (10..30).contains(&x) && (10..30).contains(&y) {
                rng.gen::<f64>()
            } else {
                0.0
            }
        });
        let out = gaussian_blur(&img, 2.0).unwrap();
        let mean = |i: &Image<f64>| i.iter().sum::<f64>() / i.len() as f64;
        assert!((mean(&img) - mean(&out)).abs() < 1e-6);
    }

    #[test]
    fn blur_commutes_with_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let img = Image::from_fn(23, 17, |_, _| rng.gen::<f64>());
        let a = gaussian_blur(&img.transpose(), 1.5).unwrap().transpose();
        let b = gaussian_blur(&img, 1.5).unwrap();
        for (p, q) in a.iter().zip(b.iter()) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn median_removes_isolated_outlier() {
        let mut img = Image::filled(9, 9, 0.25);
        img.set(4, 4, 1.0);
        let out = median_filter(&img, 2);
        assert!(out.iter().all(|&v| v == 0.25));
    }

    #[test]
    fn median_matches_brute_force_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let img = Image::from_fn(12, 9, |_, _| rng.gen_range(0..5) as f64 / 4.0);
        for r in 0..=3usize {
            let out = median_filter(&img, r);
            for y in 0..img.height() {
                for x in 0..img.width() {
                    let mut win = Vec::new();
                    for dy in -(r as isize)..=r as isize {
                        for dx in -(r as isize)..=r as isize {
                            win.push(img.get_clamped(x as isize + dx, y as isize + dy));
                        }
                    }
                    win.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    assert_eq!(out.get(x, y), win[(win.len() - 1) / 2]);
                }
            }
        }
    }

    #[test]
    fn even_count_median_takes_lower_middle() {
        let mut v = vec![4.0, 1.0, 3.0, 2.0];
        assert_eq!(lower_median(&mut v), 2.0);
        let mut v = vec![5.0f32, 1.0, 3.0];
        assert_eq!(lower_median(&mut v), 3.0);
    }

    #[test]
    fn sobel_on_flat_image_is_empty() {
        let img = Image::filled(8, 8, 0.6);
        for t in [0.0, 0.15, 1.0] {
            assert_eq!(sobel_edges(&img, t).unwrap().count_ones(), 0);
        }
    }

    #[test]
    fn sobel_vertical_step_gives_two_columns() {
        // gx = 4 on both sides of the step, 0 elsewhere; gy = 0 everywhere
        let img = Image::from_fn(8, 6, |x, _| if x < 4 { 0.0 } else { 1.0 });
        let mag = sobel_magnitude(&img);
        for y in 0..6 {
            for x in 0..8 {
                let expected = if x == 3 || x == 4 { 4.0 } else { 0.0 };
                assert_eq!(mag.get(x, y), expected);
            }
        }
        let edges = sobel_edges(&img, 0.15).unwrap();
        assert_eq!(edges, mag.map(|&g| g > 0.0));
        assert!(sobel_edges(&img, 1.5).is_err());
    }
}
