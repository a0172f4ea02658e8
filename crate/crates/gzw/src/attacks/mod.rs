//! The robustness attack suite: deterministic, seedable distortions applied
//! to host audio before extraction. Attacks never mutate their input; each
//! returns a fresh clip. Given the same input, parameters, and seed, every
//! attack is bit-reproducible.

mod filter;
mod resample;

pub use filter::{butterworth_lowpass, filtfilt, Biquad};
pub use resample::resample;

use crate::clip::{AudioClip, ClipError};
use crate::io::{read_wav, write_wav};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("clip has zero power; SNR is undefined")]
    ZeroPower,
    #[error("invalid {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },
    #[error("cannot crop {requested} samples from a {available}-sample clip")]
    OverCrop { requested: usize, available: usize },
    #[error("external encoder not found: {0}")]
    EncoderUnavailable(PathBuf),
    #[error("external encoder {program} failed: {detail}")]
    EncoderFailed { program: PathBuf, detail: String },
    #[error("codec round-trip i/o failed: {0}")]
    CodecIo(String),
    #[error(transparent)]
    Clip(#[from] ClipError),
}

fn invalid(name: &'static str, detail: impl Into<String>) -> AttackError {
    AttackError::InvalidParameter {
        name,
        detail: detail.into(),
    }
}

/// Additive white Gaussian noise at an exact realized SNR.
///
/// The noise vector is drawn once from a ChaCha stream seeded by `seed`,
/// then rescaled so the realized power ratio equals `snr_db` exactly.
pub fn awgn(clip: &AudioClip, snr_db: f64, seed: u64) -> Result<AudioClip, AttackError> {
    if !snr_db.is_finite() {
        return Err(invalid("snr_db", format!("{snr_db} is not finite")));
    }
    let signal_power = clip.power();
    if signal_power == 0.0 {
        return Err(AttackError::ZeroPower);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..clip.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let raw_power = noise.iter().map(|n| n * n).sum::<f64>() / clip.len() as f64;
    let target_power = signal_power / 10f64.powf(snr_db / 10.0);
    let scale = (target_power / raw_power).sqrt();
    let samples = clip
        .samples()
        .iter()
        .zip(&noise)
        .map(|(x, n)| x + scale * n)
        .collect();
    Ok(AudioClip::new(samples, clip.sample_rate())?)
}

/// Zero-phase 6th-order Butterworth low-pass.
pub fn lowpass(clip: &AudioClip, cutoff_hz: f64) -> Result<AudioClip, AttackError> {
    let nyquist = clip.sample_rate() as f64 / 2.0;
    if !cutoff_hz.is_finite() || cutoff_hz <= 0.0 || cutoff_hz >= nyquist {
        return Err(invalid(
            "cutoff_hz",
            format!("{cutoff_hz} is outside (0, {nyquist})"),
        ));
    }
    let sos = butterworth_lowpass(6, cutoff_hz, clip.sample_rate() as f64);
    let samples = filtfilt(&sos, clip.samples());
    Ok(AudioClip::new(samples, clip.sample_rate())?)
}

/// Down-sample to an intermediate rate and back. Output is padded or
/// truncated to exactly the input length; the sample rate is unchanged.
pub fn resample_chain(clip: &AudioClip, intermediate_rate_hz: u32) -> Result<AudioClip, AttackError> {
    if intermediate_rate_hz == 0 {
        return Err(invalid("intermediate_rate_hz", "rate must be positive"));
    }
    let down = resample(clip.samples(), clip.sample_rate(), intermediate_rate_hz);
    let mut up = resample(&down, intermediate_rate_hz, clip.sample_rate());
    up.resize(clip.len(), 0.0);
    Ok(AudioClip::new(up, clip.sample_rate())?)
}

/// Uniform requantization to `bit_depth` bits using the same scaling as
/// 16-bit WAV I/O, so depth 16 on 16-bit-sourced audio is a no-op.
pub fn requantize(clip: &AudioClip, bit_depth: u32) -> Result<AudioClip, AttackError> {
    if !(2..=16).contains(&bit_depth) {
        return Err(invalid(
            "bit_depth",
            format!("{bit_depth} is outside [2, 16]"),
        ));
    }
    let scale = (1u32 << (bit_depth - 1)) as f64;
    let max = 1.0 - 1.0 / scale;
    let samples = clip
        .samples()
        .iter()
        .map(|x| (x.clamp(-1.0, max) * scale).round() / scale)
        .collect();
    Ok(AudioClip::new(samples, clip.sample_rate())?)
}

/// Scale every sample by `gain`. No clipping happens on the in-memory float
/// path; clipping is reserved for 16-bit file writes.
pub fn amplitude(clip: &AudioClip, gain: f64) -> Result<AudioClip, AttackError> {
    if !gain.is_finite() || gain <= 0.0 {
        return Err(invalid("gain", format!("{gain} must be positive")));
    }
    let samples = clip.samples().iter().map(|x| x * gain).collect();
    Ok(AudioClip::new(samples, clip.sample_rate())?)
}

/// Time-scale modification by linear-interpolation resampling of the time
/// axis. Output length is round(len * (1 + percent/100)); pitch shifts along
/// with the time scale, and the sample-rate metadata stays unchanged.
pub fn tsm(clip: &AudioClip, stretch_percent: f64) -> Result<AudioClip, AttackError> {
    if !stretch_percent.is_finite() || !(-50.0..=100.0).contains(&stretch_percent) {
        return Err(invalid(
            "stretch_percent",
            format!("{stretch_percent} is outside [-50, 100]"),
        ));
    }
    let len = clip.len();
    let out_len = (len as f64 * (1.0 + stretch_percent / 100.0)).round() as usize;
    if out_len < 2 || len < 2 {
        return Err(invalid(
            "stretch_percent",
            format!("stretching a {len}-sample clip to {out_len} samples"),
        ));
    }
    let x = clip.samples();
    let step = len as f64 / out_len as f64;
    let samples = (0..out_len)
        .map(|j| {
            let t = (j as f64 * step).min((len - 1) as f64);
            let i0 = t.floor() as usize;
            let frac = t - i0 as f64;
            let x1 = x[(i0 + 1).min(len - 1)];
            x[i0] + frac * (x1 - x[i0])
        })
        .collect();
    Ok(AudioClip::new(samples, clip.sample_rate())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CropEnd {
    Front,
    Back,
}

impl std::fmt::Display for CropEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CropEnd::Front => "front",
            CropEnd::Back => "back",
        })
    }
}

/// Remove `n_frames * frame_len` samples from one end, no padding.
/// `frame_len` is the frame length N of the original embedding framing.
pub fn crop(
    clip: &AudioClip,
    n_frames: usize,
    end: CropEnd,
    frame_len: usize,
) -> Result<AudioClip, AttackError> {
    let requested = n_frames
        .checked_mul(frame_len)
        .ok_or_else(|| invalid("n_frames", "crop size overflows"))?;
    if requested >= clip.len() {
        return Err(AttackError::OverCrop {
            requested,
            available: clip.len(),
        });
    }
    let samples = match end {
        CropEnd::Front => clip.samples()[requested..].to_vec(),
        CropEnd::Back => clip.samples()[..clip.len() - requested].to_vec(),
    };
    Ok(AudioClip::new(samples, clip.sample_rate())?)
}

/// External MP3 encoder/decoder pair (LAME-compatible argument layout by
/// default). `{input}`, `{output}`, and `{bitrate}` in the argument
/// templates are substituted per invocation.
#[derive(Debug, Clone)]
pub struct Mp3Encoder {
    path: PathBuf,
    encode_args: Vec<String>,
    decode_args: Vec<String>,
}

/// Environment variable naming the encoder binary.
pub const MP3_ENCODER_ENV: &str = "GZW_MP3_ENCODER";
/// Optional overrides for the encode/decode argument templates
/// (whitespace-separated).
pub const MP3_ENCODE_ARGS_ENV: &str = "GZW_MP3_ENCODE_ARGS";
pub const MP3_DECODE_ARGS_ENV: &str = "GZW_MP3_DECODE_ARGS";

impl Mp3Encoder {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            encode_args: ["-b", "{bitrate}", "--silent", "{input}", "{output}"]
                .map(String::from)
                .to_vec(),
            decode_args: ["--decode", "--silent", "{input}", "{output}"]
                .map(String::from)
                .to_vec(),
        }
    }

    pub fn with_args(
        path: impl Into<PathBuf>,
        encode_args: Vec<String>,
        decode_args: Vec<String>,
    ) -> Self {
        Self {
            path: path.into(),
            encode_args,
            decode_args,
        }
    }

    /// Build from `GZW_MP3_ENCODER` (and optional arg-template overrides).
    pub fn from_env() -> Option<Self> {
        let path = std::env::var_os(MP3_ENCODER_ENV)?;
        let mut enc = Self::new(PathBuf::from(path));
        if let Ok(args) = std::env::var(MP3_ENCODE_ARGS_ENV) {
            enc.encode_args = args.split_whitespace().map(String::from).collect();
        }
        if let Ok(args) = std::env::var(MP3_DECODE_ARGS_ENV) {
            enc.decode_args = args.split_whitespace().map(String::from).collect();
        }
        Some(enc)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn run(&self, args: &[String], input: &Path, output: &Path, bitrate: u32) -> Result<(), AttackError> {
        let rendered: Vec<String> = args
            .iter()
            .map(|a| {
                a.replace("{input}", &input.to_string_lossy())
                    .replace("{output}", &output.to_string_lossy())
                    .replace("{bitrate}", &bitrate.to_string())
            })
            .collect();
        let status = Command::new(&self.path)
            .args(&rendered)
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(|e| {
                if e.kind() == std::io::ErrorKind::NotFound {
                    AttackError::EncoderUnavailable(self.path.clone())
                } else {
                    AttackError::CodecIo(e.to_string())
                }
            })?;
        if !status.success() {
            return Err(AttackError::EncoderFailed {
                program: self.path.clone(),
                detail: format!("exit status {status} for args {rendered:?}"),
            });
        }
        Ok(())
    }
}

static MP3_NONCE: AtomicU64 = AtomicU64::new(0);

/// MP3 compression via an external encode -> decode round trip. The decoded
/// audio is aligned back to the original by a bounded cross-correlation lag
/// search (codecs prepend delay) and trimmed or zero-padded to the exact
/// original length.
pub fn mp3_external(
    clip: &AudioClip,
    bitrate_kbps: u32,
    encoder: &Mp3Encoder,
) -> Result<AudioClip, AttackError> {
    if bitrate_kbps == 0 {
        return Err(invalid("bitrate_kbps", "bitrate must be positive"));
    }
    let nonce = MP3_NONCE.fetch_add(1, Ordering::Relaxed);
    let base = std::env::temp_dir().join(format!(
        "gzw-mp3-{}-{nonce}",
        std::process::id()
    ));
    let wav_in = base.with_extension("in.wav");
    let mp3 = base.with_extension("mp3");
    let wav_out = base.with_extension("out.wav");

    let result = (|| {
        write_wav(clip, &wav_in).map_err(|e| AttackError::CodecIo(e.to_string()))?;
        encoder.run(&encoder.encode_args, &wav_in, &mp3, bitrate_kbps)?;
        encoder.run(&encoder.decode_args, &mp3, &wav_out, bitrate_kbps)?;
        let decoded = read_wav(&wav_out).map_err(|e| AttackError::CodecIo(e.to_string()))?;
        let aligned = align_to(clip.samples(), decoded.samples());
        Ok(AudioClip::new(aligned, clip.sample_rate())?)
    })();

    for p in [&wav_in, &mp3, &wav_out] {
        std::fs::remove_file(p).ok();
    }
    result
}

/// Find the decoder delay by maximizing correlation against the original
/// over a bounded lag range, then cut out exactly `reference.len()` samples.
fn align_to(reference: &[f64], decoded: &[f64]) -> Vec<f64> {
    let window = reference.len().min(16384);
    let excess = decoded.len().saturating_sub(reference.len());
    let max_lag = (excess + 4608).min(decoded.len().saturating_sub(window.min(decoded.len())));
    let mut best_lag = 0;
    let mut best_score = f64::NEG_INFINITY;
    for lag in 0..=max_lag {
        let mut score = 0.0;
        let end = window.min(decoded.len().saturating_sub(lag));
        for i in 0..end {
            score += reference[i] * decoded[lag + i];
        }
        if score > best_score {
            best_score = score;
            best_lag = lag;
        }
    }
    let mut out = Vec::with_capacity(reference.len());
    for i in 0..reference.len() {
        out.push(decoded.get(best_lag + i).copied().unwrap_or(0.0));
    }
    out
}
