//! Deterministic synthetic test images: a noisy letter `A`, overlapping
//! cell-like discs and smoothed noise. Same seed, same image.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::filter::gaussian_blur;
use crate::image::Image;
use crate::point::normalize;

fn distance_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (vx, vy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * vx + (p.1 - a.1) * vy) / (vx * vx + vy * vy)).clamp(0.0, 1.0);
    let (cx, cy) = (a.0 + t * vx, a.1 + t * vy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// 64×64 dark capital `A` on a white background with uniform noise of
/// amplitude 0.25.
pub fn glyph_a(seed: u64) -> Image<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let apex = (32.0, 8.0);
    let left = (12.0, 56.0);
    let right = (52.0, 56.0);
    let bar_y = 38.0;
    let leg_x = |foot: (f64, f64)| apex.0 + (bar_y - apex.1) / (foot.1 - apex.1) * (foot.0 - apex.0);
    let bar = ((leg_x(left), bar_y), (leg_x(right), bar_y));
    Image::from_fn(64, 64, |x, y| {
        let p = (x as f64, y as f64);
        let stroke = distance_to_segment(p, apex, left) <= 3.5
            || distance_to_segment(p, apex, right) <= 3.5
            || distance_to_segment(p, bar.0, bar.1) <= 2.5;
        let base: f64 = if stroke { 0.0 } else { 1.0 };
        (base + rng.gen_range(-0.25..0.25)).clamp(0.0, 1.0)
    })
}

/// Dark discs of `radius` at `centres` on a bright background, with mild
/// noise that keeps the background above 0.9 and the discs below 0.5.
pub fn discs(width: usize, height: usize, centres: &[(f64, f64)], radius: f64, seed: u64) -> Image<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(width, height, |x, y| {
        let inside = centres
            .iter()
            .any(|&(cx, cy)| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= radius * radius);
        let noise = rng.gen_range(-0.04..0.04);
        if inside {
            0.35 + noise
        } else {
            0.96 + noise
        }
    })
}

/// Two discs of radius 20 whose centres are 30 pixels apart.
pub fn two_cells(seed: u64) -> Image<f64> {
    discs(100, 70, &[(35.0, 35.0), (65.0, 35.0)], 20.0, seed)
}

/// One disc of radius 20.
pub fn one_cell(seed: u64) -> Image<f64> {
    discs(70, 70, &[(35.0, 35.0)], 20.0, seed)
}

/// Uniform noise blurred with `sigma` and stretched to `[0, 1]`.
pub fn smoothed_noise(width: usize, height: usize, sigma: f64, seed: u64) -> Image<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Image::from_fn(width, height, |_, _| rng.gen::<f64>());
    normalize(&gaussian_blur(&noise, sigma).expect("sigma is positive"))
}
