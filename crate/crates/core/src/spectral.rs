//! One-dimensional discrete Fourier transform.
//!
//! `X[k] = Σⱼ x[j]·exp(s·2πi·jk/n)` where the sign `s` is chosen by the
//! caller. The positive-sign transform also divides by `n`, so transforming
//! with `-1` and then `+1` returns the input.

use std::f64::consts::PI;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sign of the exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    /// `-1`: the forward transform.
    Negative,
    /// `+1`: the inverse transform, scaled by `1/n`.
    Positive,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Positive => 1.0,
        }
    }
}

impl TryFrom<i32> for Sign {
    type Error = Error;

    fn try_from(s: i32) -> Result<Self> {
        match s {
            -1 => Ok(Sign::Negative),
            1 => Ok(Sign::Positive),
            other => Err(Error::param("sign", format!("{other} (expected -1 or +1)"))),
        }
    }
}

fn twiddle<T: Real>(sign: Sign, k: usize, n: usize) -> Complex<T> {
    let angle = sign.value() * 2.0 * PI * k as f64 / n as f64;
    Complex::new(T::lit(angle.cos()), T::lit(angle.sin()))
}

fn scale<T: Real>(mut x: Vec<Complex<T>>, sign: Sign) -> Vec<Complex<T>> {
    if sign == Sign::Positive {
        let n = T::lit(x.len() as f64);
        for v in &mut x {
            *v /= n;
        }
    }
    x
}

/// Direct `O(n²)` evaluation of the transform, any length.
pub fn dft<T: Real>(x: &[Complex<T>], sign: Sign) -> Result<Vec<Complex<T>>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::param("x", "the input vector is empty"));
    }
    let out = (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * twiddle::<T>(sign, (j * k) % n, n))
                .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
        })
        .collect();
    Ok(scale(out, sign))
}

/// Iterative radix-2 transform.
///
/// Lengths that are not a power of two are evaluated by [`dft`] instead,
/// with a warning in the log.
pub fn fft<T: Real>(x: &[Complex<T>], sign: Sign) -> Result<Vec<Complex<T>>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::param("x", "the input vector is empty"));
    }
    if !n.is_power_of_two() {
        log::warn!("fft: length {n} is not a power of two, using the O(n^2) transform");
        return dft(x, sign);
    }
    let bits = n.trailing_zeros();
    let mut a: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); n];
    for (i, &v) in x.iter().enumerate() {
        let r = if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) };
        a[r] = v;
    }
    let roots: Vec<Complex<T>> = (0..n / 2).map(|k| twiddle(sign, k, n)).collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let u = a[start + k];
                let v = a[start + k + len / 2] * roots[k * stride];
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
        len *= 2;
    }
    Ok(scale(a, sign))
}

/// Rotates right by `floor(n/2)`, moving bin 0 to the centre.
pub fn fftshift<T: Clone>(x: &[T]) -> Vec<T> {
    let mut v = x.to_vec();
    v.rotate_right(x.len() / 2);
    v
}

/// The three-cosine demonstration signal on `a = 1..=32`:
/// `cos(a/10) + cos(a/2) + cos(a/6)`, returned with its components.
#[derive(Clone, Debug, PartialEq)]
pub struct ToneSignal {
    pub a: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub c3: Vec<f64>,
    pub c: Vec<f64>,
}

impl ToneSignal {
    pub fn new() -> Self {
        let a: Vec<f64> = (1..=32).map(f64::from).collect();
        let c1: Vec<f64> = a.iter().map(|v| (v / 10.0).cos()).collect();
        let c2: Vec<f64> = a.iter().map(|v| (v / 2.0).cos()).collect();
        let c3: Vec<f64> = a.iter().map(|v| (v / 6.0).cos()).collect();
        let c = (0..a.len()).map(|i| c1[i] + c2[i] + c3[i]).collect();
        ToneSignal { a, c1, c2, c3, c }
    }
}

impl Default for ToneSignal {
    fn default() -> Self {
        Self::new()
    }
}

pub fn to_complex<T: Real>(x: &[T]) -> Vec<Complex<T>> {
    x.iter().map(|&v| Complex::new(v, T::zero())).collect()
}
