//! RIFF/WAVE PCM16 reader and writer.
//!
//! Reading accepts mono or stereo 16-bit PCM and maps samples to [-1, 1) by
//! dividing by 32768; stereo is downmixed by channel averaging. Writing is
//! the one place amplitude clipping happens: samples are clamped to
//! [-1, 1 - 2^-15], scaled by 32768, and rounded to the nearest integer.

use super::IoError;
use crate::clip::AudioClip;
use std::fs;
use std::path::Path;

const FORMAT_PCM: u16 = 1;

pub fn read_wav(path: &Path) -> Result<AudioClip, IoError> {
    let bytes = fs::read(path).map_err(|e| IoError::file(path, e))?;
    let malformed = |reason: String| IoError::MalformedWav {
        path: path.to_path_buf(),
        reason,
    };

    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed("missing RIFF/WAVE header".into()));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    let mut offset = 12;
    while offset + 8 <= bytes.len() {
        let id = &bytes[offset..offset + 4];
        let size = u32::from_le_bytes(bytes[offset + 4..offset + 8].try_into().unwrap()) as usize;
        let body_start = offset + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|end| *end <= bytes.len())
            .ok_or_else(|| {
                malformed(format!(
                    "chunk '{}' claims {} bytes but the file ends early",
                    String::from_utf8_lossy(id),
                    size
                ))
            })?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(malformed(format!(
                        "fmt chunk is {} bytes, expected at least 16",
                        body.len()
                    )));
                }
                fmt = Some((
                    u16::from_le_bytes(body[0..2].try_into().unwrap()),
                    u16::from_le_bytes(body[2..4].try_into().unwrap()),
                    u32::from_le_bytes(body[4..8].try_into().unwrap()),
                    u16::from_le_bytes(body[14..16].try_into().unwrap()),
                ));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word-aligned; odd sizes carry a pad byte.
        offset = body_end + (size & 1);
    }

    let (format, channels, sample_rate, bits) =
        fmt.ok_or_else(|| malformed("no fmt chunk".into()))?;
    if format != FORMAT_PCM {
        return Err(malformed(format!(
            "fmt chunk: audio format {format} is not PCM (1)"
        )));
    }
    if bits != 16 {
        return Err(malformed(format!(
            "fmt chunk: {bits}-bit samples are not supported, expected 16"
        )));
    }
    if channels != 1 && channels != 2 {
        return Err(malformed(format!(
            "fmt chunk: {channels} channels, expected 1 or 2"
        )));
    }
    if sample_rate == 0 {
        return Err(malformed("fmt chunk: sample rate is zero".into()));
    }
    let data = data.ok_or_else(|| malformed("no data chunk".into()))?;
    let frame_bytes = 2 * channels as usize;
    if data.len() % frame_bytes != 0 {
        return Err(malformed(format!(
            "data chunk: {} bytes is not a whole number of {}-byte sample frames",
            data.len(),
            frame_bytes
        )));
    }

    let scale = 1.0 / 32768.0;
    let samples: Vec<f64> = if channels == 1 {
        data.chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 * scale)
            .collect()
    } else {
        data.chunks_exact(4)
            .map(|c| {
                let l = i16::from_le_bytes([c[0], c[1]]) as f64;
                let r = i16::from_le_bytes([c[2], c[3]]) as f64;
                0.5 * (l + r) * scale
            })
            .collect()
    };
    Ok(AudioClip::new(samples, sample_rate)?)
}

/// Quantize one amplitude to a 16-bit PCM sample.
pub(crate) fn quantize_i16(sample: f64) -> i16 {
    let clamped = sample.clamp(-1.0, 1.0 - 1.0 / 32768.0);
    (clamped * 32768.0).round() as i16
}

pub fn write_wav(clip: &AudioClip, path: &Path) -> Result<(), IoError> {
    let data_len = (clip.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + clip.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&clip.sample_rate().to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate() * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in clip.samples() {
        out.extend_from_slice(&quantize_i16(s).to_le_bytes());
    }
    fs::write(path, out).map_err(|e| IoError::file(path, e))
}
