//! Netpbm graymaps and pixmaps (`P2`, `P3`, `P5`, `P6`).
//!
//! Both ASCII and binary forms are read; binary with maxval 65535 is written.

use super::DecodedImage;
use crate::error::{Error, Result};
use crate::image::{Image, TruecolorImage};

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::Corrupt {
            format: "PNM",
            offset: self.pos as u64,
            reason: reason.into(),
        }
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value * 10 + u64::from(b - b'0');
            if value > u64::from(u32::MAX) {
                return Err(self.err(format!("{what} is too large")));
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(format!("expected {what}")));
        }
        Ok(value as u32)
    }
}

pub(super) fn decode(bytes: &[u8]) -> Result<DecodedImage> {
    let mut p = Parser { bytes, pos: 2 };
    let (channels, ascii) = match &bytes[..2] {
        b"P2" => (1, true),
        b"P5" => (1, false),
        b"P3" => (3, true),
        b"P6" => (3, false),
        _ => unreachable!("format sniffed by caller"),
    };
    let width = p.number("width")? as usize;
    let height = p.number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(p.err("zero image dimension"));
    }
    let maxval = p.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(p.err(format!("maxval {maxval} outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| p.err("image too large"))?;

    let mut samples = Vec::with_capacity(count.min(1 << 24));
    if ascii {
        for _ in 0..count {
            let v = p.number("sample")?;
            if v > maxval {
                return Err(p.err(format!("sample {v} exceeds maxval {maxval}")));
            }
            samples.push(v as u16);
        }
    } else {
        match bytes.get(p.pos) {
            Some(b) if b.is_ascii_whitespace() => p.pos += 1,
            _ => return Err(p.err("expected a single whitespace byte before the raster")),
        }
        let wide = maxval > 255;
        let bytes_per = if wide { 2 } else { 1 };
        let need = count * bytes_per;
        if bytes.len() - p.pos < need {
            p.pos = bytes.len();
            return Err(p.err(format!("raster truncated: {need} bytes expected")));
        }
        let raster = &bytes[p.pos..p.pos + need];
        for (i, chunk) in raster.chunks_exact(bytes_per).enumerate() {
            let v = if wide {
                u16::from_be_bytes([chunk[0], chunk[1]])
            } else {
                u16::from(chunk[0])
            };
            if u32::from(v) > maxval {
                p.pos += i * bytes_per;
                return Err(p.err(format!("sample {v} exceeds maxval {maxval}")));
            }
            samples.push(v);
        }
    }

    let promote = |v: u16| -> u16 {
        if maxval == 65535 {
            v
        } else {
            ((u64::from(v) * 65535 + u64::from(maxval) / 2) / u64::from(maxval)) as u16
        }
    };
    let plane = |c: usize| -> Image<u16> {
        let data = samples.iter().skip(c).step_by(channels).map(|&v| promote(v)).collect();
        Image::from_vec(width, height, data).expect("sample count checked")
    };
    Ok(if channels == 1 {
        DecodedImage::Gray(plane(0))
    } else {
        DecodedImage::Truecolor(TruecolorImage::new(plane(0), plane(1), plane(2))?)
    })
}

pub(super) fn encode_gray(img: &Image<u16>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    out.reserve(img.len() * 2);
    for v in img.iter() {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

pub(super) fn encode_truecolor(img: &TruecolorImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    out.reserve(img.red.len() * 6);
    for ((r, g), b) in img.red.iter().zip(img.green.iter()).zip(img.blue.iter()) {
        for v in [r, g, b] {
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(bytes: &[u8]) -> Image<u16> {
        match decode(bytes).unwrap() {
            DecodedImage::Gray(g) => g,
            other => panic!("expected gray, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_odd_maxval() {
        let g = gray(b"P2\n# a comment\n3 1 # trailing\n4\n0 2 4\n");
        assert_eq!(g.as_slice(), &[0, 32768, 65535]);
    }

    #[test]
    fn binary_8_and_16_bit() {
        assert_eq!(gray(b"P5 2 1 255\n\x00\xff").as_slice(), &[0, 65535]);
        assert_eq!(gray(b"P5 2 1 65535\n\x12\x34\xff\xfe").as_slice(), &[0x1234, 0xfffe]);
    }

    #[test]
    fn ascii_ppm() {
        let DecodedImage::Truecolor(t) = decode(b"P3 1 1 255 10 20 30").unwrap() else {
            panic!()
        };
        assert_eq!(t.pixel(0, 0), [2570, 5140, 7710]);
    }

    #[test]
    fn errors_carry_offsets() {
        match decode(b"P2 2 1 255\n0 300\n") {
            Err(Error::Corrupt { offset, .. }) => assert_eq!(offset, 16),
            other => panic!("{other:?}"),
        }
        match decode(b"P2 2 x") {
            Err(Error::Corrupt { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(decode(b"P5 2 2 0\n....").is_err());
    }
}
