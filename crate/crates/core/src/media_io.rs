//! 8-bit binary PGM (P5) images and their bit streams.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::bitcore::BitStream;
use crate::error::{Error, Result};

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("not a binary PGM file (expected magic P5)")]
    BadMagic,
    #[error("malformed PGM header: {0}")]
    BadHeader(String),
    #[error("unsupported maxval {0}, only 255 is supported")]
    UnsupportedDepth(u64),
    #[error("truncated pixel data: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("image dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
}

/// A grayscale image with maxval 255, pixels in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(PgmError::ZeroDimension { width, height }.into());
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| PgmError::BadHeader(format!("{width}x{height} overflows")))?;
        if pixels.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> std::result::Result<u64, PgmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::BadHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PgmError::BadHeader(format!("{what} out of range")))
    }
}

/// Parses a binary PGM held in memory.
pub fn parse_pgm(data: &[u8]) -> Result<GrayImage> {
    if !data.starts_with(b"P5") {
        return Err(PgmError::BadMagic.into());
    }
    let mut cursor = HeaderCursor { data, pos: 2 };
    if !cursor.data.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::BadMagic.into());
    }
    let width = cursor.number("width")? as usize;
    let height = cursor.number("height")? as usize;
    let maxval = cursor.number("maxval")?;
    if maxval != 255 {
        return Err(PgmError::UnsupportedDepth(maxval).into());
    }
    // exactly one whitespace byte separates the header from the raster
    match data.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => return Err(PgmError::BadHeader("missing whitespace after maxval".into()).into()),
    }
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension { width, height }.into());
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| PgmError::BadHeader(format!("{width}x{height} overflows")))?;
    let raster = &data[cursor.pos..];
    if raster.len() < expected {
        return Err(PgmError::Truncated { expected, actual: raster.len() }.into());
    }
    GrayImage::new(width, height, raster[..expected].to_vec())
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    parse_pgm(&fs::read(path)?)
}

/// `P5\n<width> <height>\n255\n` followed by the raw pixels.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}

/// Bit `k` is bit `7 - (k mod 8)` of pixel `k / 8`.
pub fn image_to_bits(img: &GrayImage) -> BitStream {
    BitStream::from_bytes(&img.pixels)
}

pub fn bits_to_image(bits: &BitStream, width: usize, height: usize) -> Result<GrayImage> {
    let expected = width.saturating_mul(height).saturating_mul(8);
    if bits.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: bits.len() });
    }
    GrayImage::new(width, height, bits.to_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::significance::{classify, SignificationFunction, Thresholds};
    use crate::strategy::Xorshift64Star;

    fn random_image(rng: &mut Xorshift64Star) -> GrayImage {
        let w = rng.next_below(20) as usize + 1;
        let h = rng.next_below(20) as usize + 1;
        GrayImage::new(w, h, (0..w * h).map(|_| rng.next_u64() as u8).collect()).unwrap()
    }

    #[test]
    fn minimal_file() {
        let img = parse_pgm(b"P5 1 1 255\n\x00").unwrap();
        assert_eq!((img.width(), img.height(), img.pixels()), (1, 1, &[0u8][..]));
        let img = parse_pgm(b"P5 1 1 255 \x07").unwrap();
        assert_eq!(img.pixels(), &[7]);
    }

    #[test]
    fn header_comments() {
        let img = parse_pgm(b"P5\n# made by hand\n2 # width\n1\n255\n\x01\x02").unwrap();
        assert_eq!(img.pixels(), &[1, 2]);
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(parse_pgm(b"P2 1 1 255\n\x00"), Err(Error::Pgm(PgmError::BadMagic))));
        assert!(matches!(
            parse_pgm(b"P5 1 1 65535\n\x00\x00"),
            Err(Error::Pgm(PgmError::UnsupportedDepth(65535)))
        ));
        assert!(matches!(
            parse_pgm(b"P5 2 2 255\n\x00"),
            Err(Error::Pgm(PgmError::Truncated { expected: 4, actual: 1 }))
        ));
        assert!(matches!(parse_pgm(b"P5 x 1 255\n"), Err(Error::Pgm(PgmError::BadHeader(_)))));
        assert!(matches!(parse_pgm(b"P5 0 1 255\n"), Err(Error::Pgm(PgmError::ZeroDimension { .. }))));
    }

    #[test]
    fn header_is_eleven_bytes_for_one_pixel() {
        let img = GrayImage::new(1, 1, vec![0xAB]).unwrap();
        let bytes = encode_pgm(&img);
        assert_eq!(&bytes[..11], b"P5\n1 1\n255\n");
        assert_eq!(bytes.len(), 12);
        assert_eq!(bytes[11], 0xAB);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(GrayImage::new(0, 3, vec![]), Err(Error::Pgm(PgmError::ZeroDimension { .. }))));
        assert!(matches!(GrayImage::new(2, 2, vec![0; 3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = Xorshift64Star::new(12);
        for i in 0..100 {
            let img = random_image(&mut rng);
            let path = dir.path().join(format!("{i}.pgm"));
            write_pgm(&img, &path).unwrap();
            let back = read_pgm(&path).unwrap();
            assert_eq!(back, img);
            assert_eq!(encode_pgm(&back), fs::read(&path).unwrap());
        }
    }

    #[test]
    fn bit_order() {
        let img = GrayImage::new(2, 1, vec![0x80, 0x03]).unwrap();
        let bits = image_to_bits(&img);
        let first: Vec<u8> = bits.bits()[..8].iter().map(|&b| b as u8).collect();
        let second: Vec<u8> = bits.bits()[8..].iter().map(|&b| b as u8).collect();
        assert_eq!(first, vec![1, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(second, vec![0, 0, 0, 0, 0, 0, 1, 1]);
        assert_eq!(bits_to_image(&bits, 2, 1).unwrap(), img);
        assert!(bits_to_image(&bits, 3, 1).is_err());
    }

    #[test]
    fn bits_round_trip_random() {
        let mut rng = Xorshift64Star::new(5);
        for _ in 0..100 {
            let img = random_image(&mut rng);
            let bits = image_to_bits(&img);
            assert_eq!(bits_to_image(&bits, img.width(), img.height()).unwrap(), img);
        }
    }

    #[test]
    fn default_lsc_are_two_low_planes() {
        let img = GrayImage::new(3, 2, vec![0; 6]).unwrap();
        let bits = image_to_bits(&img);
        let c = classify(&SignificationFunction::Bitplane8, Thresholds::new(2.0, 6.0).unwrap(), bits.len())
            .unwrap();
        let expected: Vec<usize> = (0..6).flat_map(|p| [8 * p + 6, 8 * p + 7]).collect();
        assert_eq!(c.lsc, expected);
    }
}
