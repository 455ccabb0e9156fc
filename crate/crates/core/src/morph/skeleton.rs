//! Multiscale skeleton by contour-label propagation.
//!
//! Every border between a foreground component and an adjacent background
//! region is traced once and its pixels are numbered by arc position. The
//! exact feature transform then carries those labels to every foreground
//! pixel. Where two neighbouring pixels inherit labels that lie far apart
//! along the contour, the shape has a skeleton branch whose importance is
//! that arc separation divided by the total contour length of the
//! component. Labels from two different borders (around a hole) separate
//! with the maximal value 1.
//!
//! Thresholding the field at `τ` keeps the branches generated by a contour
//! span of at least `τ` times the contour length, so raising `τ` prunes
//! spurs before it touches the main structure.

use std::collections::{HashMap, HashSet};

use super::topology::{label_components, Connectivity};
use crate::dist::feature_transform;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Real;
use crate::BinaryImage;

/// Clockwise neighbour ring starting east (the y axis points down).
const RING: [(isize, isize); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

fn ring_index(dx: isize, dy: isize) -> usize {
    RING.iter()
        .position(|&d| d == (dx, dy))
        .expect("backtrack pixel is a ring neighbour")
}

/// Per-pixel skeleton strength in `[0, 1]`; zero off the skeleton.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonField<T> {
    values: Image<T>,
}

impl<T: Real> SkeletonField<T> {
    pub fn values(&self) -> &Image<T> {
        &self.values
    }

    pub fn into_image(self) -> Image<T> {
        self.values
    }

    /// The skeleton pruned at scale `tau ∈ (0, 1]`: pixels whose strength is
    /// at least `tau`.
    pub fn prune(&self, tau: T) -> Result<BinaryImage> {
        if !(tau > T::zero() && tau <= T::one()) {
            return Err(Error::param("tau", format!("{tau} is outside (0, 1]")));
        }
        Ok(self.values.map(|&v| v >= tau))
    }
}

/// Moore-neighbour tracing from foreground pixel `start` with background
/// neighbour in ring direction `back`. Returns the closed pixel walk, one
/// entry per visit.
fn trace(mask: &BinaryImage, start: (usize, usize), back: usize) -> Vec<(usize, usize)> {
    let mut state = (start, back);
    let mut seen: HashMap<((usize, usize), usize), usize> = HashMap::new();
    let mut walk = Vec::new();
    loop {
        // the walk is periodic; stop once a (pixel, entry direction) state recurs
        if let Some(&first) = seen.get(&state) {
            return walk.split_off(first);
        }
        seen.insert(state, walk.len());
        let ((x, y), b) = state;
        walk.push((x, y));
        let step = (1..=8).map(|k| (b + k) % 8).find(|&d| {
            let (dx, dy) = RING[d];
            mask.get((x as isize + dx) as usize, (y as isize + dy) as usize)
        });
        let Some(d) = step else {
            return walk;
        };
        let (nx, ny) = ((x as isize + RING[d].0), (y as isize + RING[d].1));
        let (px, py) = (x as isize + RING[(d + 7) % 8].0, y as isize + RING[(d + 7) % 8].1);
        state = ((nx as usize, ny as usize), ring_index(px - nx, py - ny));
    }
}

#[derive(Clone, Copy, Debug)]
struct ArcLabel {
    border: u32,
    position: u32,
}

struct Border {
    component: u32,
    len: u32,
}

/// Neighbour offsets in ring order for the crossing-number test: E, NE, N,
/// NW, W, SW, S, SE.
const CROSSING_RING: [(isize, isize); 8] = [
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Whether deleting the centre of a 3×3 neighbourhood from the set
/// `{v >= tau}` changes neither its 8-connected components nor its
/// 4-connected background, and does not cut an end point.
fn is_simple(field: &[f64], w: usize, p: usize, tau: f64) -> bool {
    let inside: Vec<bool> = CROSSING_RING
        .iter()
        .map(|&(dx, dy)| field[(p as isize + dy * w as isize + dx) as usize] >= tau)
        .collect();
    if inside.iter().filter(|&&b| b).count() < 2 {
        return false;
    }
    let out = |k: usize| !inside[k % 8];
    let crossings: usize = [0, 2, 4, 6]
        .iter()
        .map(|&k| usize::from(out(k)) - usize::from(out(k) && out(k + 1) && out(k + 2)))
        .sum();
    crossings == 1
}

/// Removes pixels from full 2×2 blocks of the field's support where that
/// leaves the topology of every threshold set unchanged.
///
/// A pixel present for `tau <= v` is zeroed only if it is simple at each
/// threshold where its neighbourhood changes, lowest value first.
fn break_blocks(field: &mut [f64], w: usize) {
    let h = field.len() / w;
    let mut changed = true;
    while changed {
        changed = false;
        for y in 1..h.saturating_sub(2) {
            for x in 1..w - 2 {
                let mut block = [y * w + x, y * w + x + 1, (y + 1) * w + x, (y + 1) * w + x + 1];
                if block.iter().any(|&p| field[p] <= 0.0) {
                    continue;
                }
                block.sort_by(|&a, &b| field[a].total_cmp(&field[b]).then(a.cmp(&b)));
                for p in block {
                    let v = field[p];
                    let deletable = CROSSING_RING.iter().all(|&(dx, dy)| {
                        let n = field[(p as isize + dy * w as isize + dx) as usize];
                        n <= 0.0 || n > v || is_simple(field, w, p, n)
                    }) && is_simple(field, w, p, v);
                    if deletable {
                        field[p] = 0.0;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }
}

/// Computes the multiscale skeleton of the foreground of `mask`.
///
/// The mask is padded by one background pixel on every side, so shapes
/// touching the image edge are treated as if the outside were background.
pub fn skeleton<T: Real>(mask: &BinaryImage) -> Result<SkeletonField<T>> {
    if !mask.iter().any(|&v| v) {
        return Err(Error::DegenerateMask("the mask has no foreground pixel"));
    }
    if mask.iter().all(|&v| v) {
        return Err(Error::DegenerateMask("the mask has no background pixel"));
    }
    let (w0, h0) = mask.dimensions();
    let m = mask.padded(1, false);
    let w = m.width();
    let (fg_labels, n_components) = label_components(&m, Connectivity::Eight);
    let (bg_labels, _) = label_components(&m.complement(), Connectivity::Four);

    let mut borders: Vec<Border> = Vec::new();
    let mut labels: Vec<Vec<ArcLabel>> = vec![Vec::new(); m.len()];
    let mut traced: HashSet<(u32, u32)> = HashSet::new();
    for y in 1..m.height() - 1 {
        for x in 1..w - 1 {
            if !m.get(x, y) {
                continue;
            }
            for back in [0, 2, 4, 6] {
                let (bx, by) = ((x as isize + RING[back].0) as usize, (y as isize + RING[back].1) as usize);
                if m.get(bx, by) {
                    continue;
                }
                let key = (fg_labels.get(x, y), bg_labels.get(bx, by));
                if !traced.insert(key) {
                    continue;
                }
                let walk = trace(&m, (x, y), back);
                let border = borders.len() as u32;
                for (position, &(px, py)) in walk.iter().enumerate() {
                    labels[py * w + px].push(ArcLabel {
                        border,
                        position: position as u32,
                    });
                }
                borders.push(Border {
                    component: key.0,
                    len: walk.len() as u32,
                });
            }
        }
    }

    let mut component_len = vec![0u64; n_components as usize + 1];
    for b in &borders {
        component_len[b.component as usize] += u64::from(b.len);
    }

    let sites = Image::from_vec(m.width(), m.height(), labels.iter().map(|l| !l.is_empty()).collect())?;
    let nearest = feature_transform(&sites)
        .expect("every foreground component has a border")
        .nearest;

    let separation = |a: usize, b: usize| -> f64 {
        if a == b {
            return 0.0;
        }
        let mut best = 0.0f64;
        for la in &labels[a] {
            for lb in &labels[b] {
                let v = if la.border == lb.border {
                    let border = &borders[la.border as usize];
                    let d = la.position.abs_diff(lb.position);
                    let arc = d.min(border.len - d);
                    f64::from(arc) / component_len[border.component as usize] as f64
                } else {
                    1.0
                };
                best = best.max(v);
            }
        }
        best
    };

    let mut field: Vec<f64> = (0..m.len())
        .map(|p| {
            if !m.as_slice()[p] {
                return 0.0;
            }
            [p + 1, p + w]
                .into_iter()
                .filter(|&q| m.as_slice()[q])
                .map(|q| separation(nearest[p], nearest[q]))
                .fold(0.0, f64::max)
        })
        .collect();
    break_blocks(&mut field, w);

    let values = Image::from_fn(w0, h0, |x, y| T::lit(field[(y + 1) * w + (x + 1)]));
    Ok(SkeletonField { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morph::topology::{count_components, count_holes, has_full_2x2_block};

    fn parse(rows: &[&str]) -> BinaryImage {
        Image::from_fn(rows[0].len(), rows.len(), |x, y| rows[y].as_bytes()[x] == b'#')
    }

    fn disc(n: usize, r: f64) -> BinaryImage {
        let c = (n as f64 - 1.0) / 2.0;
        Image::from_fn(n, n, |x, y| (x as f64 - c).powi(2) + (y as f64 - c).powi(2) <= r * r)
    }

    #[test]
    fn tracing_a_square_visits_its_rim_once() {
        let m = parse(&[".....", ".###.", ".###.", ".###.", "....."]);
        let walk = trace(&m, (1, 1), 6);
        assert_eq!(walk.len(), 8);
        let unique: HashSet<_> = walk.iter().collect();
        assert_eq!(unique.len(), 8);
        assert!(!unique.contains(&(2, 2)));
    }

    #[test]
    fn tracing_a_line_goes_out_and_back() {
        let m = parse(&["......", ".####.", "......"]);
        let walk = trace(&m, (1, 1), 6);
        assert_eq!(walk.len(), 6);
    }

    #[test]
    fn isolated_pixel_is_its_own_border() {
        let m = parse(&["...", ".#.", "..."]);
        assert_eq!(trace(&m, (1, 1), 0), vec![(1, 1)]);
        let f: SkeletonField<f64> = skeleton(&m).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn degenerate_masks_are_rejected() {
        assert!(skeleton::<f64>(&Image::filled(4, 4, false)).is_err());
        assert!(skeleton::<f64>(&Image::filled(4, 4, true)).is_err());
    }

    #[test]
    fn field_is_in_unit_range_and_inside_mask() {
        let m = disc(31, 12.0);
        let f: SkeletonField<f64> = skeleton(&m).unwrap();
        for (v, &inside) in f.values().iter().zip(m.iter()) {
            assert!((0.0..=1.0).contains(v));
            if !inside {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn disc_keeps_its_centre_at_high_scale() {
        let m = disc(41, 15.0);
        let f: SkeletonField<f64> = skeleton(&m).unwrap();
        let top = f.values().iter().cloned().fold(0.0, f64::max);
        assert!(top > 0.4 && top <= 0.5, "{top}");
        let kept = f.prune(0.8 * top).unwrap();
        assert!(kept.count_ones() > 0);
        for y in 0..41 {
            for x in 0..41 {
                if kept.get(x, y) {
                    let d = ((x as f64 - 20.0).powi(2) + (y as f64 - 20.0).powi(2)).sqrt();
                    assert!(d <= 2.0, "({x},{y}) kept at distance {d}");
                }
            }
        }
    }

    #[test]
    fn ring_keeps_a_closed_loop_at_half_scale() {
        let n = 41;
        let c = 20.0;
        let m = Image::from_fn(n, n, |x, y| {
            let d = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt();
            (7.0..=16.0).contains(&d)
        });
        let f: SkeletonField<f64> = skeleton(&m).unwrap();
        let loop_ = f.prune(0.5).unwrap();
        assert!(loop_.is_subset_of(&m));
        assert_eq!(count_components(&loop_, Connectivity::Eight), 1);
        assert_eq!(count_holes(&loop_), 1);
        assert!(!has_full_2x2_block(&loop_));
    }

    #[test]
    fn rectangle_spurs_go_first() {
        let m = Image::from_fn(40, 20, |x, y| (4..36).contains(&x) && (4..16).contains(&y));
        let f: SkeletonField<f64> = skeleton(&m).unwrap();
        let low = f.prune(0.05).unwrap();
        let high = f.prune(0.3).unwrap();
        assert!(high.is_subset_of(&low));
        assert!(high.count_ones() < low.count_ones());
        assert!(high.count_ones() > 0);
        assert!(!has_full_2x2_block(&low));
    }

    #[test]
    fn shapes_touching_the_border_are_padded() {
        let m = Image::from_fn(12, 8, |x, _| x < 6);
        let f: SkeletonField<f64> = skeleton(&m).unwrap();
        assert_eq!(f.values().dimensions(), (12, 8));
        assert!(f.values().iter().any(|&v| v > 0.2));
    }
}
