//! Watershed segmentation by flooding from regional minima.
//!
//! Inputs are quantized to 256 levels (`floor(255·x)` on `[0, 1]`-clamped
//! samples) before any comparison, and 8-connectivity is used throughout.

use std::collections::VecDeque;

use crate::image::Image;
use crate::morph::topology::Connectivity;
use crate::scalar::Real;
use crate::{BinaryImage, LabelImage};

const NEIGHBOURS: Connectivity = Connectivity::Eight;

/// `floor(255 · clamp(x, 0, 1))`; NaN maps to 0.
pub fn quantize<T: Real>(img: &Image<T>) -> Image<u8> {
    img.map(|&v| {
        let v = v.to_f64_lossy();
        if v.is_nan() {
            0
        } else {
            (v.clamp(0.0, 1.0) * 255.0).floor() as u8
        }
    })
}

fn neighbours(w: usize, h: usize, i: usize) -> impl Iterator<Item = usize> {
    let (x, y) = ((i % w) as isize, (i / w) as isize);
    NEIGHBOURS.offsets().iter().filter_map(move |&(dx, dy)| {
        let (nx, ny) = (x + dx, y + dy);
        (nx >= 0 && ny >= 0 && nx < w as isize && ny < h as isize).then(|| ny as usize * w + nx as usize)
    })
}

/// Labels each regional minimum plateau `1..=n` in raster order of its
/// first pixel; other pixels get 0.
fn minima_labels(levels: &Image<u8>) -> (Image<u32>, u32) {
    let (w, h) = levels.dimensions();
    let lv = levels.as_slice();
    let mut plateau = vec![usize::MAX; w * h];
    let mut labels = vec![0u32; w * h];
    let mut n = 0;
    let mut members = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if plateau[start] != usize::MAX {
            continue;
        }
        plateau[start] = start;
        members.clear();
        queue.push_back(start);
        let mut is_minimum = true;
        while let Some(i) = queue.pop_front() {
            members.push(i);
            for j in neighbours(w, h, i) {
                if lv[j] < lv[i] {
                    is_minimum = false;
                } else if lv[j] == lv[i] && plateau[j] == usize::MAX {
                    plateau[j] = start;
                    queue.push_back(j);
                }
            }
        }
        if is_minimum {
            n += 1;
            for &i in &members {
                labels[i] = n;
            }
        }
    }
    (Image::from_vec(w, h, labels).expect("same dimensions"), n)
}

/// Marks every pixel that belongs to a regional minimum of the quantized
/// image: an 8-connected plateau with no strictly lower 8-neighbour.
pub fn regional_minima<T: Real>(img: &Image<T>) -> BinaryImage {
    minima_labels(&quantize(img)).0.map(|&l| l != 0)
}

/// Number of regional minima of the quantized image.
pub fn count_regional_minima<T: Real>(img: &Image<T>) -> usize {
    minima_labels(&quantize(img)).1 as usize
}

/// Floods the quantized image from its regional minima.
///
/// Pixels are processed in order of level, first-in first-out within a
/// level, and take the label of the basin that reaches them first. Every
/// pixel ends up labelled; there are no dividing-line pixels. Labels run
/// `1..=n` with `n` the number of regional minima.
pub fn watershed<T: Real>(img: &Image<T>) -> LabelImage {
    let levels = quantize(img);
    let (w, h) = levels.dimensions();
    let lv = levels.as_slice();
    let (seeds, _) = minima_labels(&levels);
    let mut labels = seeds.into_vec();
    let mut queued: Vec<bool> = labels.iter().map(|&l| l != 0).collect();
    let mut buckets: Vec<VecDeque<usize>> = vec![VecDeque::new(); 256];
    for (i, &l) in labels.iter().enumerate() {
        if l != 0 {
            buckets[lv[i] as usize].push_back(i);
        }
    }
    let mut level = 0usize;
    while level < 256 {
        let Some(i) = buckets[level].pop_front() else {
            level += 1;
            continue;
        };
        for j in neighbours(w, h, i) {
            if !queued[j] {
                queued[j] = true;
                labels[j] = labels[i];
                buckets[(lv[j] as usize).max(level)].push_back(j);
            }
        }
    }
    Image::from_vec(w, h, labels).expect("same dimensions")
}

/// Objects in a watershed labelling: the number of regions less one for the
/// background basin.
pub fn count_objects(labels: &LabelImage) -> usize {
    labels.iter().copied().max().unwrap_or(0).saturating_sub(1) as usize
}
