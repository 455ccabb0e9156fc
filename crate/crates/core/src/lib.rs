//! Image processing toolkit: codecs, point operations, filters, geometric
//! transforms, exact Euclidean distance transforms, disc morphology,
//! multiscale skeletons, watershed segmentation and a small FFT.
//!
//! Real-valued operators are generic over [`Real`] (`f32` or `f64`). Images
//! are row-major [`Image`] grids; the aliases below name the common sample
//! types.
//!
//! ```
//! use sipkit::{dist, BinaryImage, Image};
//!
//! let mask: BinaryImage = Image::from_fn(6, 6, |x, y| (x, y) != (0, 0));
//! assert_eq!(dist::edt_squared(&mask)?.get(3, 4), 25);
//! # Ok::<(), sipkit::Error>(())
//! ```

pub mod codec;
pub mod dist;
mod error;
pub mod filter;
pub mod fixtures;
pub mod geom;
mod image;
pub mod morph;
pub mod pipeline;
pub mod point;
mod scalar;
pub mod seg;
pub mod spectral;

pub use error::{Error, Result};
pub use image::{ColorMap, Image, IndexedImage, TruecolorImage};
pub use scalar::Real;

pub use num_complex::Complex;

/// Mask image: `true` is foreground.
pub type BinaryImage = Image<bool>;
/// Stored grayscale samples, 0–65535.
pub type Gray16Image = Image<u16>;
/// Region identifiers `1..=n`.
pub type LabelImage = Image<u32>;
pub type RealImage64 = Image<f64>;
pub type RealImage32 = Image<f32>;
pub type Complex64 = Complex<f64>;
