//! Portable bitmap (PBM) reader and writer, P1 (ASCII) and P4 (binary).
//!
//! PBM value 1 means black and maps to bit 1. P1 accepts arbitrary
//! whitespace and `#` comments between tokens; P4 rows are packed MSB-first
//! and padded to a byte boundary, with pad bits ignored on read and zeroed
//! on write.

use super::IoError;
use crate::watermark::BinaryImage;
use std::fs;
use std::path::Path;

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    fn read_uint(&mut self) -> Option<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

pub fn read_pbm(path: &Path) -> Result<BinaryImage, IoError> {
    let bytes = fs::read(path).map_err(|e| IoError::file(path, e))?;
    let malformed = |reason: String| IoError::MalformedPbm {
        path: path.to_path_buf(),
        reason,
    };

    let mut scan = Scanner::new(&bytes);
    scan.skip_space_and_comments();
    if scan.bytes.len() < scan.pos + 2 {
        return Err(malformed("file too short for a magic number".into()));
    }
    let magic = &bytes[scan.pos..scan.pos + 2];
    scan.pos += 2;
    if magic != b"P1" && magic != b"P4" {
        return Err(malformed(format!(
            "magic '{}' is not P1 or P4",
            String::from_utf8_lossy(magic)
        )));
    }

    let width = scan
        .read_uint()
        .ok_or_else(|| malformed("missing width".into()))?;
    let height = scan
        .read_uint()
        .ok_or_else(|| malformed("missing height".into()))?;
    if width == 0 || height == 0 {
        return Err(malformed(format!("zero dimension {width}x{height}")));
    }

    let mut pixels = Vec::with_capacity(width * height);
    if magic == b"P1" {
        while pixels.len() < width * height {
            scan.skip_space_and_comments();
            match bytes.get(scan.pos) {
                Some(b'0') => pixels.push(0),
                Some(b'1') => pixels.push(1),
                Some(other) => {
                    return Err(malformed(format!(
                        "unexpected byte 0x{other:02x} in P1 pixel data"
                    )))
                }
                None => {
                    return Err(malformed(format!(
                        "pixel data ended after {} of {} pixels",
                        pixels.len(),
                        width * height
                    )))
                }
            }
            scan.pos += 1;
        }
    } else {
        // Exactly one whitespace byte separates the header from P4 data.
        match bytes.get(scan.pos) {
            Some(b) if b.is_ascii_whitespace() => scan.pos += 1,
            _ => return Err(malformed("missing whitespace before P4 raster".into())),
        }
        let row_bytes = width.div_ceil(8);
        let need = row_bytes * height;
        if bytes.len() < scan.pos + need {
            return Err(malformed(format!(
                "raster needs {need} bytes, only {} present",
                bytes.len() - scan.pos
            )));
        }
        for y in 0..height {
            let row = &bytes[scan.pos + y * row_bytes..scan.pos + (y + 1) * row_bytes];
            for x in 0..width {
                pixels.push((row[x / 8] >> (7 - x % 8)) & 1);
            }
        }
    }

    Ok(BinaryImage::new(width, height, pixels)?)
}

/// Write as binary P4.
pub fn write_pbm(img: &BinaryImage, path: &Path) -> Result<(), IoError> {
    let mut out = format!("P4\n{} {}\n", img.width(), img.height()).into_bytes();
    let row_bytes = img.width().div_ceil(8);
    for y in 0..img.height() {
        let mut row = vec![0u8; row_bytes];
        for x in 0..img.width() {
            if img.pixel(x, y) == 1 {
                row[x / 8] |= 1 << (7 - x % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    fs::write(path, out).map_err(|e| IoError::file(path, e))
}

/// Write as ASCII P1, one image row per line (split to keep lines short).
pub fn write_pbm_p1(img: &BinaryImage, path: &Path) -> Result<(), IoError> {
    let mut out = format!("P1\n{} {}\n", img.width(), img.height());
    for y in 0..img.height() {
        let row: String = (0..img.width())
            .map(|x| if img.pixel(x, y) == 1 { '1' } else { '0' })
            .collect();
        // Keep lines under the traditional 70-character limit.
        for chunk in row.as_bytes().chunks(70) {
            out.push_str(std::str::from_utf8(chunk).unwrap());
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|e| IoError::file(path, e))
}
