//! Batch robustness evaluation: embed a watermark into each clip, run the
//! attack suite, extract, and score BER/NC per (clip, attack) cell.
//!
//! Cells are independent jobs; results are merged in label order no matter
//! which thread finishes first, so a report is byte-identical across thread
//! counts and re-runs with the same seed.

use crate::attacks::{self, AttackError, CropEnd, Mp3Encoder};
use crate::clip::AudioClip;
use crate::io::{CellStatus, EvalCell};
use crate::metrics;
use crate::watermark::{
    self, binarize_features, extract_features, frame_signal, image_to_bits, BinaryImage,
    BitSequence, SchemeConfig, WatermarkError,
};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no clips to evaluate")]
    NoClips,
    #[error("attack suite is empty")]
    EmptySuite,
    #[error(transparent)]
    Watermark(#[from] WatermarkError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Attack selector for one suite entry. Crop frame length depends on the
/// clip, so it is resolved per clip at apply time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuiteKind {
    None,
    Awgn { snr_db: f64 },
    Lowpass { cutoff_hz: f64 },
    Resample { intermediate_rate_hz: u32 },
    Requantize { bit_depth: u32 },
    Amplitude { gain: f64 },
    Mp3 { bitrate_kbps: u32 },
    Tsm { stretch_percent: f64 },
    Crop { frames: usize, end: CropEnd },
}

#[derive(Debug, Clone)]
pub struct SuiteAttack {
    pub label: String,
    pub kind: SuiteKind,
}

impl SuiteAttack {
    fn new(label: &str, kind: SuiteKind) -> Self {
        Self {
            label: label.to_string(),
            kind,
        }
    }

    /// Human-readable parameters for the report.
    pub fn params(&self) -> String {
        match self.kind {
            SuiteKind::None => String::new(),
            SuiteKind::Awgn { snr_db } => format!("snr_db={snr_db}"),
            SuiteKind::Lowpass { cutoff_hz } => format!("cutoff_hz={cutoff_hz}"),
            SuiteKind::Resample {
                intermediate_rate_hz,
            } => format!("intermediate_rate_hz={intermediate_rate_hz}"),
            SuiteKind::Requantize { bit_depth } => format!("bit_depth={bit_depth}"),
            SuiteKind::Amplitude { gain } => format!("gain={gain}"),
            SuiteKind::Mp3 { bitrate_kbps } => format!("bitrate_kbps={bitrate_kbps}"),
            SuiteKind::Tsm { stretch_percent } => format!("stretch_percent={stretch_percent}"),
            SuiteKind::Crop { frames, end } => format!("frames={frames};end={end}"),
        }
    }
}

/// The benchmark defaults: AWGN 10/20 dB, low-pass 11,025 Hz, resampling via
/// 22.05 kHz, 8-bit requantization, MP3 128 kbps, amplitude 1.5x/2x, TSM
/// +-1% and +-10%, and 5/10/20-frame crops at both ends, plus a no-attack
/// control.
pub fn standard_suite() -> Vec<SuiteAttack> {
    use SuiteKind::*;
    vec![
        SuiteAttack::new("none", None),
        SuiteAttack::new("awgn_10db", Awgn { snr_db: 10.0 }),
        SuiteAttack::new("awgn_20db", Awgn { snr_db: 20.0 }),
        SuiteAttack::new("lowpass_11025hz", Lowpass { cutoff_hz: 11025.0 }),
        SuiteAttack::new(
            "resample_22050hz",
            Resample {
                intermediate_rate_hz: 22050,
            },
        ),
        SuiteAttack::new("requantize_8bit", Requantize { bit_depth: 8 }),
        SuiteAttack::new("mp3_128kbps", Mp3 { bitrate_kbps: 128 }),
        SuiteAttack::new("amplitude_1.5x", Amplitude { gain: 1.5 }),
        SuiteAttack::new("amplitude_2x", Amplitude { gain: 2.0 }),
        SuiteAttack::new(
            "tsm_+1pct",
            Tsm {
                stretch_percent: 1.0,
            },
        ),
        SuiteAttack::new(
            "tsm_+10pct",
            Tsm {
                stretch_percent: 10.0,
            },
        ),
        SuiteAttack::new(
            "tsm_-1pct",
            Tsm {
                stretch_percent: -1.0,
            },
        ),
        SuiteAttack::new(
            "tsm_-10pct",
            Tsm {
                stretch_percent: -10.0,
            },
        ),
        SuiteAttack::new(
            "crop_front_5",
            Crop {
                frames: 5,
                end: CropEnd::Front,
            },
        ),
        SuiteAttack::new(
            "crop_front_10",
            Crop {
                frames: 10,
                end: CropEnd::Front,
            },
        ),
        SuiteAttack::new(
            "crop_front_20",
            Crop {
                frames: 20,
                end: CropEnd::Front,
            },
        ),
        SuiteAttack::new(
            "crop_back_5",
            Crop {
                frames: 5,
                end: CropEnd::Back,
            },
        ),
        SuiteAttack::new(
            "crop_back_10",
            Crop {
                frames: 10,
                end: CropEnd::Back,
            },
        ),
        SuiteAttack::new(
            "crop_back_20",
            Crop {
                frames: 20,
                end: CropEnd::Back,
            },
        ),
    ]
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub scheme: SchemeConfig,
    /// Global seed; per-cell seeds are derived from it and the cell labels.
    pub seed: u64,
    /// Worker threads for cell jobs; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
    pub mp3_encoder: Option<Mp3Encoder>,
    /// Collect per-frame feature traces for every cell.
    pub dump_features: bool,
    pub suite: Vec<SuiteAttack>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            scheme: SchemeConfig::default(),
            seed: 42,
            jobs: None,
            mp3_encoder: None,
            dump_features: false,
            suite: standard_suite(),
        }
    }
}

/// Features extracted from one attacked clip, for plotting feature
/// stability under attack.
#[derive(Debug, Clone)]
pub struct FeatureTrace {
    pub clip: String,
    pub attack: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub cells: Vec<EvalCell>,
    pub traces: Vec<FeatureTrace>,
}

/// Stable per-cell seed: FNV-1a over the labels mixed with the global seed
/// through splitmix64. Adding clips or attacks never disturbs other cells.
pub fn cell_seed(global_seed: u64, clip_label: &str, attack_label: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in clip_label
        .as_bytes()
        .iter()
        .chain(&[0x1f])
        .chain(attack_label.as_bytes())
    {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    let mut z = global_seed.wrapping_add(h).wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

struct ClipContext {
    label: String,
    clip: AudioClip,
    frame_len: usize,
    watermark_bits: BitSequence,
    key: Option<BitSequence>,
    clean_features: Option<Vec<f64>>,
    embed_error: Option<String>,
}

fn apply_attack(
    kind: SuiteKind,
    clip: &AudioClip,
    frame_len: usize,
    seed: u64,
    mp3: Option<&Mp3Encoder>,
) -> Result<Option<AudioClip>, AttackError> {
    match kind {
        SuiteKind::None => Ok(Some(clip.clone())),
        SuiteKind::Awgn { snr_db } => attacks::awgn(clip, snr_db, seed).map(Some),
        SuiteKind::Lowpass { cutoff_hz } => attacks::lowpass(clip, cutoff_hz).map(Some),
        SuiteKind::Resample {
            intermediate_rate_hz,
        } => attacks::resample_chain(clip, intermediate_rate_hz).map(Some),
        SuiteKind::Requantize { bit_depth } => attacks::requantize(clip, bit_depth).map(Some),
        SuiteKind::Amplitude { gain } => attacks::amplitude(clip, gain).map(Some),
        SuiteKind::Tsm { stretch_percent } => attacks::tsm(clip, stretch_percent).map(Some),
        SuiteKind::Crop { frames, end } => attacks::crop(clip, frames, end, frame_len).map(Some),
        SuiteKind::Mp3 { bitrate_kbps } => match mp3 {
            Some(encoder) => match attacks::mp3_external(clip, bitrate_kbps, encoder) {
                Ok(out) => Ok(Some(out)),
                Err(AttackError::EncoderUnavailable(_)) => Ok(None),
                Err(e) => Err(e),
            },
            None => Ok(None),
        },
    }
}

fn run_cell(ctx: &ClipContext, attack: &SuiteAttack, opts: &EvalOptions) -> (EvalCell, Option<FeatureTrace>) {
    let mut cell = EvalCell {
        clip: ctx.label.clone(),
        attack: attack.label.clone(),
        params: attack.params(),
        status: CellStatus::Failed,
        ber: None,
        nc: None,
        message: None,
    };
    if let Some(err) = &ctx.embed_error {
        cell.message = Some(format!("embedding failed: {err}"));
        return (cell, None);
    }
    let key = ctx.key.as_ref().expect("key exists when embed succeeded");

    let seed = cell_seed(opts.seed, &ctx.label, &attack.label);
    let attacked = match apply_attack(attack.kind, &ctx.clip, ctx.frame_len, seed, opts.mp3_encoder.as_ref()) {
        Ok(Some(clip)) => clip,
        Ok(None) => {
            cell.status = CellStatus::Skipped;
            cell.message = Some("no MP3 encoder configured".into());
            return (cell, None);
        }
        Err(e) => {
            cell.message = Some(e.to_string());
            return (cell, None);
        }
    };

    let m = ctx.watermark_bits.len();
    let outcome = (|| -> Result<(f64, f64, Vec<f64>), String> {
        let features = if attack.kind == SuiteKind::None {
            // Identical to the clean features by construction.
            ctx.clean_features.clone().expect("clean features cached")
        } else {
            let frames = frame_signal(&attacked, m).map_err(|e| e.to_string())?;
            extract_features(&frames, opts.scheme.k)
                .map_err(|e| e.to_string())?
                .values()
                .to_vec()
        };
        let seq = crate::watermark::FeatureSequence::new(features.clone())
            .map_err(|e| e.to_string())?;
        let recovered_bits = watermark::extract_watermark(
            &binarize_features(&seq, &opts.scheme),
            key,
        )
        .map_err(|e| e.to_string())?;
        let ber = metrics::ber(&ctx.watermark_bits, &recovered_bits).map_err(|e| e.to_string())?;
        let nc = metrics::nc(&ctx.watermark_bits, &recovered_bits).map_err(|e| e.to_string())?;
        Ok((ber, nc, features))
    })();

    match outcome {
        Ok((ber, nc, features)) => {
            cell.status = CellStatus::Ok;
            cell.ber = Some(ber);
            cell.nc = Some(nc);
            let trace = opts.dump_features.then(|| FeatureTrace {
                clip: ctx.label.clone(),
                attack: attack.label.clone(),
                values: features,
            });
            (cell, trace)
        }
        Err(message) => {
            cell.message = Some(message);
            (cell, None)
        }
    }
}

/// Evaluate every clip against every suite attack.
pub fn evaluate(
    clips: &[(String, AudioClip)],
    watermark_image: &BinaryImage,
    opts: &EvalOptions,
) -> Result<Evaluation, EvalError> {
    if clips.is_empty() {
        return Err(EvalError::NoClips);
    }
    if opts.suite.is_empty() {
        return Err(EvalError::EmptySuite);
    }
    let m = watermark_image.pixel_count();
    if m < 2 {
        return Err(EvalError::Watermark(WatermarkError::WatermarkTooSmall(m)));
    }

    let run = || -> Evaluation {
        let contexts: Vec<ClipContext> = clips
            .par_iter()
            .map(|(label, clip)| {
                let watermark_bits = image_to_bits(watermark_image);
                let embed = (|| -> Result<(BitSequence, Vec<f64>), WatermarkError> {
                    let frames = frame_signal(clip, m)?;
                    let features = extract_features(&frames, opts.scheme.k)?;
                    let bits = binarize_features(&features, &opts.scheme);
                    let key = watermark::generate_key(&bits, &watermark_bits)?;
                    Ok((key, features.values().to_vec()))
                })();
                let frame_len = clip.len() / m.max(1);
                match embed {
                    Ok((key, clean_features)) => ClipContext {
                        label: label.clone(),
                        clip: clip.clone(),
                        frame_len,
                        watermark_bits,
                        key: Some(key),
                        clean_features: Some(clean_features),
                        embed_error: None,
                    },
                    Err(e) => ClipContext {
                        label: label.clone(),
                        clip: clip.clone(),
                        frame_len,
                        watermark_bits,
                        key: None,
                        clean_features: None,
                        embed_error: Some(e.to_string()),
                    },
                }
            })
            .collect();

        let jobs: Vec<(usize, usize)> = (0..contexts.len())
            .flat_map(|c| (0..opts.suite.len()).map(move |a| (c, a)))
            .collect();
        let outcomes: Vec<(EvalCell, Option<FeatureTrace>)> = jobs
            .par_iter()
            .map(|&(c, a)| run_cell(&contexts[c], &opts.suite[a], opts))
            .collect();

        let mut cells = Vec::with_capacity(outcomes.len());
        let mut traces = Vec::new();
        for (cell, trace) in outcomes {
            cells.push(cell);
            traces.extend(trace);
        }
        Evaluation { cells, traces }
    };

    match opts.jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| EvalError::ThreadPool(e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}
