//! PNG container, backed by the `png` crate.

use std::cell::Cell;
use std::io::{self, BufRead, Cursor, Read, Seek, SeekFrom};
use std::rc::Rc;

use png::{BitDepth, ColorType, Transformations};

use super::DecodedImage;
use crate::error::{Error, Result};
use crate::image::{ColorMap, Image, IndexedImage, TruecolorImage};

pub(super) const SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

/// Cursor that remembers the furthest offset handed to the decoder, so a
/// decoding failure can be located in the file.
struct TrackedCursor<'a> {
    inner: Cursor<&'a [u8]>,
    high_water: Rc<Cell<u64>>,
}

impl TrackedCursor<'_> {
    fn note(&self) {
        let p = self.inner.position();
        if p > self.high_water.get() {
            self.high_water.set(p);
        }
    }
}

impl Read for TrackedCursor<'_> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.note();
        Ok(n)
    }
}

impl BufRead for TrackedCursor<'_> {
    fn fill_buf(&mut self) -> io::Result<&[u8]> {
        self.inner.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        self.inner.consume(amt);
        self.note();
    }
}

impl Seek for TrackedCursor<'_> {
    fn seek(&mut self, pos: SeekFrom) -> io::Result<u64> {
        self.inner.seek(pos)
    }
}

fn corrupt(offset: u64, err: impl ToString) -> Error {
    Error::Corrupt {
        format: "PNG",
        offset,
        reason: err.to_string(),
    }
}

pub(super) fn decode(bytes: &[u8]) -> Result<DecodedImage> {
    let high_water = Rc::new(Cell::new(0));
    let cursor = TrackedCursor {
        inner: Cursor::new(bytes),
        high_water: Rc::clone(&high_water),
    };
    let mut decoder = png::Decoder::new(cursor);
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| corrupt(high_water.get(), e))?;
    let buf_len = reader
        .output_buffer_size()
        .ok_or_else(|| corrupt(high_water.get(), "image too large"))?;
    let mut buf = vec![0u8; buf_len];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| corrupt(high_water.get(), e))?;

    let width = frame.width as usize;
    let height = frame.height as usize;
    let depth = frame.bit_depth as u8;
    let line = frame.line_size;
    let channels = match frame.color_type {
        ColorType::Grayscale | ColorType::Indexed => 1,
        ColorType::GrayscaleAlpha => 2,
        ColorType::Rgb => 3,
        ColorType::Rgba => 4,
    };

    // Unpacks channel `c` of every pixel as a raw sample at the stored depth.
    let raw = |c: usize| -> Image<u16> {
        Image::from_fn(width, height, |x, y| {
            let row = &buf[y * line..(y + 1) * line];
            let s = x * channels + c;
            match depth {
                16 => u16::from_be_bytes([row[2 * s], row[2 * s + 1]]),
                8 => u16::from(row[s]),
                d => {
                    let d = d as usize;
                    let bit = s * d;
                    let byte = row[bit / 8];
                    let shift = 8 - d - bit % 8;
                    u16::from((byte >> shift) & ((1u8 << d) - 1))
                }
            }
        })
    };
    // Promotes a raw sample to 16 bits: an exact multiple for every depth.
    let factor: u16 = match depth {
        1 => 65535,
        2 => 21845,
        4 => 4369,
        8 => 257,
        _ => 1,
    };
    let scaled = |c: usize| raw(c).map(|&v| v * factor);

    let out = match frame.color_type {
        ColorType::Grayscale | ColorType::GrayscaleAlpha => DecodedImage::Gray(scaled(0)),
        ColorType::Rgb | ColorType::Rgba => {
            DecodedImage::Truecolor(TruecolorImage::new(scaled(0), scaled(1), scaled(2))?)
        }
        ColorType::Indexed => {
            let info = reader.info();
            let palette = info
                .palette
                .as_deref()
                .ok_or_else(|| corrupt(high_water.get(), "indexed image without PLTE chunk"))?;
            let rows: Vec<[f64; 3]> = palette
                .chunks_exact(3)
                .map(|c| [c[0], c[1], c[2]].map(|v| f64::from(v) / 255.0))
                .collect();
            let map = ColorMap::new(rows).map_err(|e| corrupt(high_water.get(), e))?;
            let index = raw(0).map(|&i| u32::from(i) + 1);
            let img = IndexedImage::new(index, map)
                .map_err(|_| corrupt(high_water.get(), "palette index out of range"))?;
            DecodedImage::Indexed(img)
        }
    };
    Ok(out)
}

fn encode_raw(
    width: usize,
    height: usize,
    color: ColorType,
    depth: BitDepth,
    palette: Option<Vec<u8>>,
    data: &[u8],
) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, width as u32, height as u32);
        encoder.set_color(color);
        encoder.set_depth(depth);
        if let Some(p) = palette {
            encoder.set_palette(p);
        }
        let mut writer = encoder
            .write_header()
            .map_err(|e| Error::Encode(e.to_string()))?;
        writer
            .write_image_data(data)
            .map_err(|e| Error::Encode(e.to_string()))?;
        writer.finish().map_err(|e| Error::Encode(e.to_string()))?;
    }
    Ok(out)
}

pub(super) fn encode_gray(img: &Image<u16>) -> Result<Vec<u8>> {
    let data: Vec<u8> = img.iter().flat_map(|v| v.to_be_bytes()).collect();
    encode_raw(img.width(), img.height(), ColorType::Grayscale, BitDepth::Sixteen, None, &data)
}

pub(super) fn encode_truecolor(img: &TruecolorImage) -> Result<Vec<u8>> {
    let mut data = Vec::with_capacity(img.red.len() * 6);
    for ((r, g), b) in img.red.iter().zip(img.green.iter()).zip(img.blue.iter()) {
        for v in [r, g, b] {
            data.extend_from_slice(&v.to_be_bytes());
        }
    }
    encode_raw(img.width(), img.height(), ColorType::Rgb, BitDepth::Sixteen, None, &data)
}

pub(super) fn encode_indexed(img: &IndexedImage) -> Result<Vec<u8>> {
    let n = img.map().len();
    if n > 256 {
        return Err(Error::Encode(format!(
            "{n} colours do not fit a PNG palette (at most 256)"
        )));
    }
    let palette: Vec<u8> = img
        .map()
        .rows()
        .iter()
        .flat_map(|row| row.map(|v| (v * 255.0).round() as u8))
        .collect();
    let data: Vec<u8> = img.index().iter().map(|&i| (i - 1) as u8).collect();
    let (w, h) = img.dimensions();
    encode_raw(w, h, ColorType::Indexed, BitDepth::Eight, Some(palette), &data)
}
