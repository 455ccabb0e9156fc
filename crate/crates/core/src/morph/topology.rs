//! Connected components, hole counting and thinness checks for binary masks.

use std::collections::VecDeque;

use crate::image::Image;
use crate::BinaryImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(1, 0), (0, 1), (-1, 0), (0, -1)],
            Connectivity::Eight => &[
                (1, 0),
                (1, 1),
                (0, 1),
                (-1, 1),
                (-1, 0),
                (-1, -1),
                (0, -1),
                (1, -1),
            ],
        }
    }
}

/// Labels the `true` pixels of `mask` by connected component, `1..=n` in
/// raster order of each component's first pixel; `false` pixels get 0.
pub fn label_components(mask: &BinaryImage, conn: Connectivity) -> (Image<u32>, u32) {
    let (w, h) = mask.dimensions();
    let mut labels = Image::filled(w, h, 0u32);
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask.as_slice()[start] || labels.as_slice()[start] != 0 {
            continue;
        }
        next += 1;
        labels.as_mut_slice()[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for &(dx, dy) in conn.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if mask.as_slice()[j] && labels.as_slice()[j] == 0 {
                    labels.as_mut_slice()[j] = next;
                    queue.push_back(j);
                }
            }
        }
    }
    (labels, next)
}

pub fn count_components(mask: &BinaryImage, conn: Connectivity) -> usize {
    label_components(mask, conn).1 as usize
}

/// Number of 4-connected background regions not connected to the outside
/// of the image (the foreground taken with 8-connectivity).
pub fn count_holes(mask: &BinaryImage) -> usize {
    let bg = mask.padded(1, false).complement();
    count_components(&bg, Connectivity::Four) - 1
}

/// Whether any 2×2 block is entirely `true`.
pub fn has_full_2x2_block(mask: &BinaryImage) -> bool {
    let (w, h) = mask.dimensions();
    (0..h.saturating_sub(1)).any(|y| {
        (0..w - 1).any(|x| {
            mask.get(x, y) && mask.get(x + 1, y) && mask.get(x, y + 1) && mask.get(x + 1, y + 1)
        })
    })
}
