//! Reading and writing PNG and PNM (PGM/PPM) files.
//!
//! The container format is always sniffed from the leading bytes, never from
//! the file extension. Samples are promoted to 16 bits on decode (8-bit data
//! by the factor 257), so every decoded payload uses the same 0–65535 range.

mod png;
mod pnm;

use std::fs;
use std::io;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{Image, IndexedImage, TruecolorImage};
use crate::point::{gray16_to_real, to_gray};
use crate::scalar::Real;

/// Container formats understood by the codecs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Png,
    /// PGM, ASCII (`P2`) or binary (`P5`).
    Pgm,
    /// PPM, ASCII (`P3`) or binary (`P6`).
    Ppm,
}

impl Format {
    /// Guess an output format from a file extension (`png`, `pgm`, `ppm`, `pnm`).
    pub fn from_extension(path: &Path) -> Option<Format> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(Format::Png),
            "pgm" => Some(Format::Pgm),
            "ppm" | "pnm" => Some(Format::Ppm),
            _ => None,
        }
    }
}

/// A decoded file in one of the three image models.
#[derive(Clone, Debug, PartialEq)]
pub enum DecodedImage {
    Gray(Image<u16>),
    Truecolor(TruecolorImage),
    Indexed(IndexedImage),
}

impl DecodedImage {
    pub fn dimensions(&self) -> (usize, usize) {
        match self {
            DecodedImage::Gray(g) => g.dimensions(),
            DecodedImage::Truecolor(t) => t.dimensions(),
            DecodedImage::Indexed(i) => i.dimensions(),
        }
    }

    /// Grayscale view: luma for truecolor, palette lookup then luma for indexed.
    pub fn to_gray16(&self) -> Image<u16> {
        match self {
            DecodedImage::Gray(g) => g.clone(),
            DecodedImage::Truecolor(t) => to_gray(t),
            DecodedImage::Indexed(i) => to_gray(&i.to_truecolor()),
        }
    }
}

/// Identifies the container from the first (up to 8) bytes.
///
/// Returns `None` for anything that is neither PNG nor one of `P2`, `P3`,
/// `P5`, `P6`.
pub fn detect_format(head: &[u8]) -> Option<Format> {
    if head.len() >= 8 && head[..8] == png::SIGNATURE {
        return Some(Format::Png);
    }
    match head {
        [b'P', b'2' | b'5', ..] => Some(Format::Pgm),
        [b'P', b'3' | b'6', ..] => Some(Format::Ppm),
        _ => None,
    }
}

/// Decodes an in-memory file.
pub fn decode(bytes: &[u8]) -> Result<DecodedImage> {
    let head = &bytes[..bytes.len().min(8)];
    match detect_format(head) {
        Some(Format::Png) => png::decode(bytes),
        Some(Format::Pgm | Format::Ppm) => pnm::decode(bytes),
        None => Err(Error::UnsupportedFormat(head.to_vec())),
    }
}

/// Encodes `img` into the requested container.
///
/// Gray and truecolor payloads are written at 16 bits per sample. Indexed
/// payloads stay paletted in PNG (at most 256 colours) and are expanded
/// through their map for PGM/PPM. Writing a colour payload as PGM stores its
/// luma; writing gray as PPM replicates the channel.
pub fn encode(img: &DecodedImage, format: Format) -> Result<Vec<u8>> {
    match (format, img) {
        (Format::Png, DecodedImage::Gray(g)) => png::encode_gray(g),
        (Format::Png, DecodedImage::Truecolor(t)) => png::encode_truecolor(t),
        (Format::Png, DecodedImage::Indexed(i)) => png::encode_indexed(i),
        (Format::Pgm, other) => Ok(pnm::encode_gray(&other.to_gray16())),
        (Format::Ppm, DecodedImage::Gray(g)) => Ok(pnm::encode_truecolor(&TruecolorImage::from_gray(g))),
        (Format::Ppm, DecodedImage::Truecolor(t)) => Ok(pnm::encode_truecolor(t)),
        (Format::Ppm, DecodedImage::Indexed(i)) => Ok(pnm::encode_truecolor(&i.to_truecolor())),
    }
}

/// Reads an image file, detecting the format from its content.
pub fn read_image(path: impl AsRef<Path>) -> Result<DecodedImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => Error::NotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    decode(&bytes)
}

pub fn write_image(img: &DecodedImage, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let bytes = encode(img, format)?;
    fs::write(path, bytes)?;
    Ok(())
}

/// Reads any supported file as a grayscale real image in `[0, 1]`.
pub fn read_gray<T: Real>(path: impl AsRef<Path>) -> Result<Image<T>> {
    Ok(gray16_to_real(&read_image(path)?.to_gray16()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::ColorMap;
    use proptest::prelude::*;

    #[test]
    fn detection_uses_magic_not_extension() {
        assert_eq!(detect_format(&png::SIGNATURE), Some(Format::Png));
        assert_eq!(detect_format(b"P5\n"), Some(Format::Pgm));
        assert_eq!(detect_format(b"P3 "), Some(Format::Ppm));
        assert_eq!(detect_format(b"P1\n"), None);
        assert_eq!(detect_format(b"\xff\xd8\xff\xe0"), None);
        assert_eq!(detect_format(b""), None);
    }

    #[test]
    fn unsupported_is_distinct_from_corrupt() {
        assert!(matches!(decode(b"GIF89a...."), Err(Error::UnsupportedFormat(_))));
        let mut truncated_png = png::SIGNATURE.to_vec();
        truncated_png.extend_from_slice(b"\0\0\0\rIHDR");
        assert!(matches!(decode(&truncated_png), Err(Error::Corrupt { .. })));
        assert!(matches!(decode(b"P5 2 2 255\n\x01"), Err(Error::Corrupt { .. })));
    }

    #[test]
    fn missing_file_is_reported_as_not_found() {
        let err = read_image("/nonexistent/dir/img.png").unwrap_err();
        assert!(matches!(err, Error::NotFound(_)));
    }

    #[test]
    fn ascii_pgm_is_scaled_by_257() {
        let img = decode(b"P2 2 2 255\n0 85\n170 255\n").unwrap();
        let DecodedImage::Gray(g) = img else {
            panic!("expected gray")
        };
        assert_eq!(g.as_slice(), &[0, 21845, 43690, 65535]);
    }

    #[test]
    fn indexed_png_roundtrip_keeps_index_and_map() {
        let map = ColorMap::new(vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [10.0 / 255.0, 20.0 / 255.0, 30.0 / 255.0],
            [1.0, 1.0, 1.0],
        ])
        .unwrap();
        let index = Image::from_fn(5, 3, |x, y| ((x + y) % 4 + 1) as u32);
        let img = DecodedImage::Indexed(IndexedImage::new(index.clone(), map.clone()).unwrap());
        let back = decode(&encode(&img, Format::Png).unwrap()).unwrap();
        let DecodedImage::Indexed(back) = back else {
            panic!("expected indexed")
        };
        assert_eq!(back.index(), &index);
        assert_eq!(back.map().columns(), 3);
        for (a, b) in map.rows().iter().flatten().zip(back.map().rows().iter().flatten()) {
            assert!((a - b).abs() <= 1.0 / 65535.0);
        }
    }

    #[test]
    fn indexed_with_too_many_colours_cannot_be_paletted() {
        let map = ColorMap::new(vec![[0.5; 3]; 300]).unwrap();
        let index = Image::from_fn(300, 1, |x, _| x as u32 + 1);
        let img = DecodedImage::Indexed(IndexedImage::new(index, map).unwrap());
        assert!(matches!(encode(&img, Format::Png), Err(Error::Encode(_))));
        // expanded output is still possible
        assert!(encode(&img, Format::Ppm).is_ok());
    }

    #[test]
    fn gray_of_extreme_palette() {
        let map = ColorMap::new(vec![[0.0; 3], [1.0; 3]]).unwrap();
        let index = Image::from_fn(4, 4, |x, y| ((x ^ y) & 1) as u32 + 1);
        let img = DecodedImage::Indexed(IndexedImage::new(index, map).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pal.bin");
        write_image(&img, &path, Format::Png).unwrap();
        let g: Image<f64> = read_gray(&path).unwrap();
        assert!(g.iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(g.iter().any(|&v| v == 1.0));
    }

    #[test]
    fn white_png_reads_as_ones() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("white.png");
        write_image(&DecodedImage::Gray(Image::filled(3, 2, 65535)), &path, Format::Png).unwrap();
        let g: Image<f32> = read_gray(&path).unwrap();
        assert!(g.iter().all(|&v| v == 1.0));
    }

    fn gray_strategy() -> impl Strategy<Value = Image<u16>> {
        (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u16>(), w * h)
                .prop_map(move |v| Image::from_vec(w, h, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn gray_roundtrips_through_every_format(g in gray_strategy()) {
            let img = DecodedImage::Gray(g);
            for f in [Format::Png, Format::Pgm] {
                prop_assert_eq!(&decode(&encode(&img, f).unwrap()).unwrap(), &img);
            }
        }

        #[test]
        fn truecolor_roundtrips(r in gray_strategy(), seed: u16) {
            let g = r.map(|&v| v.wrapping_mul(31).wrapping_add(seed));
            let b = r.map(|&v| v ^ seed);
            let img = DecodedImage::Truecolor(TruecolorImage::new(r, g, b).unwrap());
            for f in [Format::Png, Format::Ppm] {
                prop_assert_eq!(&decode(&encode(&img, f).unwrap()).unwrap(), &img);
            }
        }
    }
}
