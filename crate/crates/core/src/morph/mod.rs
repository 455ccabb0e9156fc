//! Binary morphology with exact disc structuring elements, connectivity
//! analysis and the multiscale skeleton.
//!
//! The disc of radius `r` is the digital disc `{(dx, dy) : dx² + dy² ≤ r²}`.

mod skeleton;
pub mod topology;

pub use skeleton::{skeleton, SkeletonField};

use crate::dist::edt_squared;
use crate::error::{Error, Result};
use crate::BinaryImage;

fn check_radius(r: f64) -> Result<u64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::param("radius", format!("{r} must be non-negative and finite")));
    }
    Ok((r * r).floor() as u64)
}

/// Pixels within distance `r` of the foreground.
pub fn dilate_disc(mask: &BinaryImage, r: f64) -> Result<BinaryImage> {
    let r2 = check_radius(r)?;
    // distance to the foreground = distance transform of the complement
    match edt_squared(&mask.complement()) {
        Ok(d) => Ok(d.map(|&v| v <= r2)),
        Err(Error::NoBackground) => Ok(mask.clone()),
        Err(e) => Err(e),
    }
}

/// Erosion, defined as the dual of [`dilate_disc`].
pub fn erode_disc(mask: &BinaryImage, r: f64) -> Result<BinaryImage> {
    Ok(dilate_disc(&mask.complement(), r)?.complement())
}
