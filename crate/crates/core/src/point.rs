//! Pointwise operators: grayscale conversion, normalization, thresholding,
//! inversion, bit-depth promotion, masking and histogram equalization.

use crate::error::{Error, Result};
use crate::image::{Image, TruecolorImage};
use crate::scalar::Real;
use crate::BinaryImage;

const GRAY16_MAX: f64 = 65535.0;

/// Luma of a truecolor image, `round(0.299 R + 0.587 G + 0.114 B)`.
///
/// Evaluated in integer arithmetic (weights in thousandths, round half up),
/// so equal channels map to themselves exactly.
pub fn to_gray(img: &TruecolorImage) -> Image<u16> {
    let mut out = img.red.clone();
    for ((o, &g), &b) in out
        .as_mut_slice()
        .iter_mut()
        .zip(img.green.as_slice())
        .zip(img.blue.as_slice())
    {
        let y = 299 * u64::from(*o) + 587 * u64::from(g) + 114 * u64::from(b);
        *o = ((y + 500) / 1000).min(65535) as u16;
    }
    out
}

/// Affine rescale to `[0, 1]`: the minimum maps to 0 and the maximum to 1.
/// A constant image maps to all zeros.
pub fn normalize<T: Real>(img: &Image<T>) -> Image<T> {
    let (lo, hi) = min_max(img);
    let range = hi - lo;
    if range <= T::zero() {
        return img.map(|_| T::zero());
    }
    img.map(|&x| (x - lo) / range)
}

pub(crate) fn min_max<T: Real>(img: &Image<T>) -> (T, T) {
    img.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

/// Binary mask of samples `>= t` after clamping samples to `[0, 1]`.
pub fn threshold<T: Real>(img: &Image<T>, t: T) -> Result<BinaryImage> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::param("threshold", format!("{t} is outside [0, 1]")));
    }
    Ok(img.map(|&x| x.max(T::zero()).min(T::one()) >= t))
}

/// `1 − x` per sample.
pub fn invert<T: Real>(img: &Image<T>) -> Image<T> {
    img.map(|&x| T::one() - x)
}

/// Complement of a binary mask, the `1 − c` of a 0/1 image.
pub fn invert_mask(mask: &BinaryImage) -> BinaryImage {
    mask.complement()
}

/// Promotes 8-bit samples to 16 bits by the factor 257 (255 ↦ 65535).
pub fn scale8to16(img: &Image<u8>) -> Image<u16> {
    img.map(|&v| u16::from(v) * 257)
}

/// Elementwise product with a 0/1 mask; masked-out pixels become exactly zero.
pub fn mask_multiply<T: Real>(img: &Image<T>, mask: &BinaryImage) -> Result<Image<T>> {
    img.zip_map(mask, |&x, &m| if m { x } else { T::zero() })
}

/// Histogram equalization over 65536 bins.
///
/// `out = round(65535 · (cdf(v) − cdf_min) / (1 − cdf_min))` where `cdf_min`
/// is the CDF at the darkest occupied level. Constant images are returned
/// unchanged.
pub fn equalize(img: &Image<u16>) -> Image<u16> {
    let mut hist = vec![0u64; 65536];
    for &v in img.iter() {
        hist[v as usize] += 1;
    }
    let total = img.len() as u64;
    let Some(first) = hist.iter().position(|&c| c > 0) else {
        return img.clone();
    };
    let cdf_min_count = hist[first];
    if cdf_min_count == total {
        return img.clone();
    }
    // Counts stay integral until the final division.
    let denom = (total - cdf_min_count) as f64;
    let mut lut = vec![0u16; 65536];
    let mut running = 0u64;
    for (v, &c) in hist.iter().enumerate() {
        running += c;
        if c > 0 {
            let num = (running - cdf_min_count) as f64;
            lut[v] = (GRAY16_MAX * num / denom).round() as u16;
        }
    }
    img.map(|&v| lut[v as usize])
}

/// `v / 65535` per sample.
pub fn gray16_to_real<T: Real>(img: &Image<u16>) -> Image<T> {
    let scale = T::lit(GRAY16_MAX);
    img.map(|&v| T::from_u16(v).unwrap() / scale)
}

/// `round(x · 65535)` after clamping to `[0, 1]`; non-finite samples map to 0.
pub fn real_to_gray16<T: Real>(img: &Image<T>) -> Image<u16> {
    img.map(|&x| {
        let x = x.to_f64_lossy();
        if x.is_finite() {
            (x.clamp(0.0, 1.0) * GRAY16_MAX).round() as u16
        } else {
            0
        }
    })
}

pub fn binary_to_real<T: Real>(mask: &BinaryImage) -> Image<T> {
    mask.map(|&b| if b { T::one() } else { T::zero() })
}

pub fn binary_to_gray16(mask: &BinaryImage) -> Image<u16> {
    mask.map(|&b| if b { 65535 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real(w: usize, h: usize, v: &[f64]) -> Image<f64> {
        Image::from_vec(w, h, v.to_vec()).unwrap()
    }

    fn tc(r: u16, g: u16, b: u16) -> TruecolorImage {
        TruecolorImage::new(
            Image::filled(1, 1, r),
            Image::filled(1, 1, g),
            Image::filled(1, 1, b),
        )
        .unwrap()
    }

    #[test]
    fn gray_of_equal_channels_is_identity() {
        for v in [0u16, 1, 2, 255, 256, 32767, 40000, 65534, 65535] {
            assert_eq!(to_gray(&tc(v, v, v)).get(0, 0), v);
        }
    }

    #[test]
    fn gray_of_pure_red() {
        // round(0.299 * 65535) = round(19594.965)
        assert_eq!(to_gray(&tc(65535, 0, 0)).get(0, 0), 19595);
        assert_eq!(to_gray(&tc(0, 0, 0)).get(0, 0), 0);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&real(3, 1, &[2.0, 3.0, 4.0])).as_slice(), &[0.0, 0.5, 1.0]);
        assert_eq!(normalize(&real(2, 1, &[7.0, 7.0])).as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn threshold_is_inclusive_and_checks_range() {
        let img = real(2, 1, &[0.80, 0.79]);
        assert_eq!(threshold(&img, 0.8).unwrap().as_slice(), &[true, false]);
        assert!(threshold(&img, 1.2).is_err());
        assert!(threshold(&img, -0.1).is_err());
        assert!(threshold(&img, f64::NAN).is_err());
        // out-of-range samples are clamped first
        let wide = real(2, 1, &[1.7, -3.0]);
        assert_eq!(threshold(&wide, 1.0).unwrap().as_slice(), &[true, false]);
    }

    #[test]
    fn invert_examples() {
        assert_eq!(invert(&real(2, 1, &[0.0, 0.0])).as_slice(), &[1.0, 1.0]);
        assert!((invert(&real(1, 1, &[0.3])).get(0, 0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn scale8to16_examples() {
        let img = Image::from_vec(3, 1, vec![255u8, 0, 1]).unwrap();
        assert_eq!(scale8to16(&img).as_slice(), &[65535, 0, 257]);
    }

    #[test]
    fn mask_multiply_zeroes_background() {
        let img = real(2, 2, &[-0.5, 0.25, 0.75, 1.0]);
        let ones = Image::filled(2, 2, true);
        let zeros = Image::filled(2, 2, false);
        assert_eq!(mask_multiply(&img, &ones).unwrap(), img);
        let z = mask_multiply(&img, &zeros).unwrap();
        assert!(z.iter().all(|&v| v == 0.0 && v.is_sign_positive()));
        assert!(mask_multiply(&img, &Image::filled(3, 1, true)).is_err());
    }

    #[test]
    fn equalize_degenerate_and_two_level() {
        let flat = Image::filled(4, 4, 1234u16);
        assert_eq!(equalize(&flat), flat);
        // cdf(0) = 1/2 = cdf_min, cdf(65535) = 1 -> 0 and 65535
        let two = Image::from_fn(4, 4, |x, _| if x < 2 { 0u16 } else { 65535 });
        assert_eq!(equalize(&two), two);
    }

    #[test]
    fn equalize_uniform_ramp_is_near_identity() {
        // 256 distinct levels, one pixel each: cdf is linear in the level.
        let ramp = Image::from_fn(16, 16, |x, y| ((y * 16 + x) * 257) as u16);
        let eq = equalize(&ramp);
        for (a, b) in ramp.iter().zip(eq.iter()) {
            assert!((i32::from(*a) - i32::from(*b)).abs() <= 1, "{a} -> {b}");
        }
    }

    #[test]
    fn gray16_real_conversion_roundtrips() {
        let img = Image::from_fn(256, 256, |x, y| (y * 256 + x) as u16);
        assert_eq!(real_to_gray16(&gray16_to_real::<f64>(&img)), img);
        assert_eq!(real_to_gray16(&gray16_to_real::<f32>(&img)), img);
    }

    proptest! {
        #[test]
        fn threshold_mask_shrinks_as_t_grows(
            v in proptest::collection::vec(-0.2f64..1.2, 16),
            t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0,
        ) {
            let img = real(4, 4, &v);
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let a = threshold(&img, lo).unwrap();
            let b = threshold(&img, hi).unwrap();
            prop_assert!(b.is_subset_of(&a));
        }

        #[test]
        fn normalize_is_idempotent(v in proptest::collection::vec(-1e3f64..1e3, 12)) {
            let img = real(4, 3, &v);
            let n1 = normalize(&img);
            prop_assert_eq!(normalize(&n1), n1);
        }

        #[test]
        fn invert_is_an_involution(v in proptest::collection::vec(0.0f64..=1.0, 12)) {
            let img = real(3, 4, &v);
            let back = invert(&invert(&img));
            for (a, b) in img.iter().zip(back.iter()) {
                prop_assert!((a - b).abs() <= f64::EPSILON);
            }
        }

        #[test]
        fn scale8to16_preserves_order(a: u8, b: u8) {
            let img = Image::from_vec(2, 1, vec![a, b]).unwrap();
            let s = scale8to16(&img);
            prop_assert_eq!(a.cmp(&b), s.get(0, 0).cmp(&s.get(1, 0)));
        }

        #[test]
        fn equalize_is_monotone(v in proptest::collection::vec(any::<u16>(), 30)) {
            let img = Image::from_vec(6, 5, v).unwrap();
            let eq = equalize(&img);
            for (i, &a) in img.iter().enumerate() {
                for (j, &b) in img.iter().enumerate() {
                    if a <= b {
                        prop_assert!(eq.as_slice()[i] <= eq.as_slice()[j]);
                    }
                }
            }
        }
    }
}
