//! Binary watermark key file.
//!
//! Layout, fixed endianness and bit order so files travel across platforms:
//!
//! ```text
//! offset  size          field
//! 0       4             magic "GZWK"
//! 4       1             version (1)
//! 5       4             M, bit count, big-endian u32
//! 9       1             k, shift order used at embedding
//! 10      ceil(M/8)     key bits, MSB-first within each byte; pad bits zero
//! ```

use super::IoError;
use crate::watermark::BitSequence;
use std::fs;
use std::path::Path;

pub const KEY_MAGIC: [u8; 4] = *b"GZWK";
pub const KEY_VERSION: u8 = 1;

/// Parsed key file: the key bits plus the shift order they were made with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyFile {
    pub key: BitSequence,
    pub shift_order: u8,
}

pub fn write_key(key: &BitSequence, shift_order: u8, path: &Path) -> Result<(), IoError> {
    let m = key.len();
    let mut out = Vec::with_capacity(10 + m.div_ceil(8));
    out.extend_from_slice(&KEY_MAGIC);
    out.push(KEY_VERSION);
    out.extend_from_slice(&u32::try_from(m).expect("key length fits u32").to_be_bytes());
    out.push(shift_order);
    let mut acc = 0u8;
    for (i, &bit) in key.bits().iter().enumerate() {
        acc = (acc << 1) | bit;
        if i % 8 == 7 {
            out.push(acc);
            acc = 0;
        }
    }
    if !m.is_multiple_of(8) {
        out.push(acc << (8 - m % 8));
    }
    fs::write(path, out).map_err(|e| IoError::file(path, e))
}

pub fn read_key(path: &Path) -> Result<KeyFile, IoError> {
    let bytes = fs::read(path).map_err(|e| IoError::file(path, e))?;
    let malformed = |reason: String| IoError::MalformedKey {
        path: path.to_path_buf(),
        reason,
    };

    if bytes.len() < 10 {
        return Err(malformed(format!("{} bytes is too short", bytes.len())));
    }
    if bytes[0..4] != KEY_MAGIC {
        return Err(malformed(format!(
            "bad magic {:02x?}, expected {:02x?}",
            &bytes[0..4],
            KEY_MAGIC
        )));
    }
    if bytes[4] != KEY_VERSION {
        return Err(malformed(format!(
            "unsupported version {}, expected {}",
            bytes[4], KEY_VERSION
        )));
    }
    let m = u32::from_be_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let shift_order = bytes[9];
    let payload = &bytes[10..];
    let expected = m.div_ceil(8);
    if payload.len() != expected {
        return Err(malformed(format!(
            "payload is {} bytes, expected {expected} for {m} bits",
            payload.len()
        )));
    }
    if !m.is_multiple_of(8) {
        let pad_mask = (1u8 << (8 - m % 8)) - 1;
        if payload[expected - 1] & pad_mask != 0 {
            return Err(malformed("nonzero trailing pad bits".into()));
        }
    }

    let bits: Vec<u8> = (0..m)
        .map(|i| (payload[i / 8] >> (7 - i % 8)) & 1)
        .collect();
    Ok(KeyFile {
        key: BitSequence::from_bits(bits)?,
        shift_order,
    })
}
