//! Image containers.
//!
//! [`Image<T>`] is a dense row-major grid used for every sample type in the
//! crate: real working images, 16-bit gray planes, binary masks and label
//! maps. The aliases in the crate root name the common instantiations.

use crate::error::{Error, Result};

/// A `width × height` grid of samples stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Image<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T> Image<T> {
    /// Wraps a row-major sample buffer. Both dimensions must be at least one.
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param(
                "dimensions",
                format!("{width}x{height}: width and height must be at least 1"),
            ));
        }
        if data.len() != width * height {
            return Err(Error::param(
                "data",
                format!("{} samples for a {width}x{height} image", data.len()),
            ));
        }
        Ok(Image {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    ///
    /// # Panics
    ///
    /// If either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Image {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn index_of(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[T] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.width)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn same_dimensions<U>(&self, other: &Image<U>) -> bool {
        self.dimensions() == other.dimensions()
    }

    pub(crate) fn check_same_dimensions<U>(&self, other: &Image<U>) -> Result<()> {
        if self.same_dimensions(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_w: self.width,
                left_h: self.height,
                right_w: other.width,
                right_h: other.height,
            })
        }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Image<U> {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn zip_map<U, V>(&self, other: &Image<U>, mut f: impl FnMut(&T, &U) -> V) -> Result<Image<V>> {
        self.check_same_dimensions(other)?;
        Ok(Image {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }
}

impl<T: Copy> Image<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.data[y * self.width + x] = value;
    }

    /// Sample with coordinates clamped to the image (replicate border).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> T {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    pub fn transpose(&self) -> Image<T> {
        Image::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }

    /// Copy surrounded by a `margin`-pixel frame of `fill`.
    pub fn padded(&self, margin: usize, fill: T) -> Image<T> {
        let w = self.width + 2 * margin;
        let h = self.height + 2 * margin;
        let mut out = Image::filled(w, h, fill);
        for y in 0..self.height {
            let dst = (y + margin) * w + margin;
            out.data[dst..dst + self.width].copy_from_slice(self.row(y));
        }
        out
    }

    /// Sub-image with top-left corner `(x0, y0)`.
    pub fn cropped(&self, x0: usize, y0: usize, width: usize, height: usize) -> Image<T> {
        assert!(x0 + width <= self.width && y0 + height <= self.height);
        Image::from_fn(width, height, |x, y| self.get(x0 + x, y0 + y))
    }
}

impl Image<bool> {
    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Image<bool> {
        self.map(|&b| !b)
    }

    /// `true` when every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Image<bool>) -> bool {
        self.same_dimensions(other) && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }
}

/// Three 16-bit channel planes of identical size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruecolorImage {
    pub red: Image<u16>,
    pub green: Image<u16>,
    pub blue: Image<u16>,
}

impl TruecolorImage {
    pub fn new(red: Image<u16>, green: Image<u16>, blue: Image<u16>) -> Result<Self> {
        red.check_same_dimensions(&green)?;
        red.check_same_dimensions(&blue)?;
        Ok(TruecolorImage { red, green, blue })
    }

    pub fn from_gray(gray: &Image<u16>) -> Self {
        TruecolorImage {
            red: gray.clone(),
            green: gray.clone(),
            blue: gray.clone(),
        }
    }

    pub fn width(&self) -> usize {
        self.red.width()
    }

    pub fn height(&self) -> usize {
        self.red.height()
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.red.dimensions()
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u16; 3] {
        [self.red.get(x, y), self.green.get(x, y), self.blue.get(x, y)]
    }
}

/// Palette of `N` colours, each an `(r, g, b)` triple of reals in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorMap {
    rows: Vec<[f64; 3]>,
}

impl ColorMap {
    pub fn new(rows: Vec<[f64; 3]>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::param("map", "a colour map needs at least one row"));
        }
        if let Some(bad) = rows
            .iter()
            .flatten()
            .find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0)
        {
            return Err(Error::param("map", format!("entry {bad} outside [0, 1]")));
        }
        Ok(ColorMap { rows })
    }

    /// Number of colours `N`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Always 3: one column per RGB channel.
    pub fn columns(&self) -> usize {
        3
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    /// Row addressed by a 1-based index.
    pub fn lookup(&self, index: u32) -> [f64; 3] {
        self.rows[index as usize - 1]
    }
}

/// Pseudocolour image: 1-based indices into a [`ColorMap`].
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedImage {
    index: Image<u32>,
    map: ColorMap,
}

impl IndexedImage {
    pub fn new(index: Image<u32>, map: ColorMap) -> Result<Self> {
        let n = map.len() as u32;
        if let Some(&bad) = index.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::param(
                "index",
                format!("entry {bad} does not address a row of a {n}-colour map"),
            ));
        }
        Ok(IndexedImage { index, map })
    }

    pub fn index(&self) -> &Image<u32> {
        &self.index
    }

    pub fn map(&self) -> &ColorMap {
        &self.map
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.index.dimensions()
    }

    /// Expands the palette into 16-bit planes (`round(v · 65535)` per channel).
    pub fn to_truecolor(&self) -> TruecolorImage {
        let q: Vec<[u16; 3]> = self
            .map
            .rows()
            .iter()
            .map(|row| row.map(|v| (v * 65535.0).round() as u16))
            .collect();
        let plane = |c: usize| self.index.map(|&i| q[i as usize - 1][c]);
        TruecolorImage {
            red: plane(0),
            green: plane(1),
            blue: plane(2),
        }
    }
}
