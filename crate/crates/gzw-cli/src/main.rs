//! `gzw` — graph-spectrum audio zero-watermarking from the command line.
//!
//! Subcommands: `embed` (derive a key binding audio to a watermark image),
//! `extract` (recover the watermark from possibly-attacked audio), `attack`
//! (apply one distortion to a WAV), `evaluate` (run the benchmark suite over
//! a clip directory), and `gen-audio` (deterministic synthetic test audio).

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gzw::attacks::{self, CropEnd, Mp3Encoder};
use gzw::eval::{self, standard_suite, EvalOptions, SuiteAttack};
use gzw::io::{
    read_key, read_pbm, read_wav, write_feature_dump, write_key, write_pbm, write_report,
    write_wav, CellStatus,
};
use gzw::synth::music_like;
use gzw::watermark::SchemeConfig;
use gzw::{metrics, AudioClip};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "gzw",
    version,
    about = "Audio zero-watermarking over the graph spectrum: key generation, recovery, attacks, and robustness benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive a watermark key from host audio and a watermark image
    Embed(EmbedArgs),
    /// Recover the watermark image from audio and a key
    Extract(ExtractArgs),
    /// Apply one attack to a WAV file
    Attack(AttackArgs),
    /// Embed, attack, extract, and score every clip in a directory
    Evaluate(EvaluateArgs),
    /// Write a deterministic synthetic music-like WAV
    GenAudio(GenAudioArgs),
}

#[derive(Args)]
struct EmbedArgs {
    /// Host audio (PCM16 WAV, mono or stereo)
    #[arg(long)]
    audio: PathBuf,
    /// Watermark image (PBM, P1 or P4)
    #[arg(long)]
    watermark: PathBuf,
    /// Output key file
    #[arg(long)]
    key: PathBuf,
    /// Shift order of the graph operator
    #[arg(long, default_value_t = 3)]
    k: usize,
}

#[derive(Args)]
struct ExtractArgs {
    /// Audio to extract from (possibly attacked)
    #[arg(long)]
    audio: PathBuf,
    /// Key file written by `embed`
    #[arg(long)]
    key: PathBuf,
    /// Output watermark image (PBM P4)
    #[arg(long)]
    output: PathBuf,
    /// Output image width (default: square side of the key length)
    #[arg(long)]
    width: Option<usize>,
    /// Output image height
    #[arg(long)]
    height: Option<usize>,
    /// Original watermark; when given, BER/NC against it are printed
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AttackType {
    Awgn,
    Lowpass,
    Resample,
    Requantize,
    Amplitude,
    Tsm,
    Crop,
    Mp3,
}

#[derive(Clone, Copy, ValueEnum)]
enum CropEndArg {
    Front,
    Back,
}

impl From<CropEndArg> for CropEnd {
    fn from(v: CropEndArg) -> Self {
        match v {
            CropEndArg::Front => CropEnd::Front,
            CropEndArg::Back => CropEnd::Back,
        }
    }
}

#[derive(Args)]
struct AttackArgs {
    /// Input WAV
    #[arg(long)]
    input: PathBuf,
    /// Output WAV
    #[arg(long)]
    output: PathBuf,
    /// Attack kind
    #[arg(long = "type", value_enum)]
    attack_type: AttackType,
    /// AWGN signal-to-noise ratio in dB
    #[arg(long)]
    snr: Option<f64>,
    /// Low-pass cutoff in Hz
    #[arg(long)]
    cutoff: Option<f64>,
    /// Intermediate resampling rate in Hz
    #[arg(long)]
    rate: Option<u32>,
    /// Requantization bit depth
    #[arg(long)]
    bits: Option<u32>,
    /// Amplitude gain factor
    #[arg(long)]
    gain: Option<f64>,
    /// Time-scale stretch percent in [-50, 100]
    #[arg(long)]
    percent: Option<f64>,
    /// Frames to crop
    #[arg(long)]
    frames: Option<usize>,
    /// Which end to crop
    #[arg(long, value_enum)]
    end: Option<CropEndArg>,
    /// Frame length N of the original embedding framing
    #[arg(long)]
    frame_len: Option<usize>,
    /// MP3 bitrate in kbps
    #[arg(long)]
    bitrate: Option<u32>,
    /// External MP3 encoder binary (default: GZW_MP3_ENCODER env var)
    #[arg(long)]
    encoder: Option<PathBuf>,
    /// Seed for stochastic attacks
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Directory of WAV clips
    #[arg(long)]
    clips: PathBuf,
    /// Watermark image (PBM)
    #[arg(long)]
    watermark: PathBuf,
    /// Output CSV report
    #[arg(long)]
    output: PathBuf,
    /// Shift order of the graph operator
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Global seed; per-(clip, attack) seeds derive from it
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory for per-frame feature trace CSVs (one file per clip)
    #[arg(long)]
    dump_features: Option<PathBuf>,
    /// External MP3 encoder binary (default: GZW_MP3_ENCODER env var)
    #[arg(long)]
    encoder: Option<PathBuf>,
    /// Comma-separated attack labels to run (default: the full suite)
    #[arg(long)]
    attacks: Option<String>,
}

#[derive(Args)]
struct GenAudioArgs {
    /// Output WAV path
    #[arg(long)]
    output: PathBuf,
    /// Duration in seconds
    #[arg(long, default_value_t = 64.0)]
    duration: f64,
    /// Generator seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Sample rate in Hz
    #[arg(long, default_value_t = 44100)]
    rate: u32,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Embed(args) => run_embed(args),
        Command::Extract(args) => run_extract(args),
        Command::Attack(args) => run_attack(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::GenAudio(args) => run_gen_audio(args),
    }
}

fn run_embed(args: EmbedArgs) -> Result<()> {
    let clip = read_wav(&args.audio)?;
    let image = read_pbm(&args.watermark)?;
    let cfg = SchemeConfig {
        k: args.k,
        ..SchemeConfig::default()
    };
    let key = gzw::watermark::embed(&clip, &image, &cfg)?;
    let k_byte = u8::try_from(args.k).context("k must fit in one byte")?;
    write_key(&key, k_byte, &args.key)?;
    let m = image.pixel_count();
    println!(
        "embedded: M={m} N={} k={} key={}",
        clip.len() / m,
        args.k,
        args.key.display()
    );
    Ok(())
}

fn infer_dims(m: usize, width: Option<usize>, height: Option<usize>) -> Result<(usize, usize)> {
    match (width, height) {
        (Some(w), Some(h)) => Ok((w, h)),
        (None, None) => {
            let side = (m as f64).sqrt().round() as usize;
            if side * side == m {
                Ok((side, side))
            } else {
                bail!("key has {m} bits, which is not square; pass --width and --height")
            }
        }
        _ => bail!("pass both --width and --height, or neither"),
    }
}

fn run_extract(args: ExtractArgs) -> Result<()> {
    let clip = read_wav(&args.audio)?;
    let key_file = read_key(&args.key)?;
    let (width, height) = infer_dims(key_file.key.len(), args.width, args.height)?;
    let cfg = SchemeConfig {
        k: key_file.shift_order as usize,
        ..SchemeConfig::default()
    };
    let recovered = gzw::watermark::extract(&clip, &key_file.key, width, height, &cfg)?;
    write_pbm(&recovered, &args.output)?;
    println!(
        "extracted: {width}x{height} k={} image={}",
        key_file.shift_order,
        args.output.display()
    );
    if let Some(reference) = &args.reference {
        let original = read_pbm(reference)?;
        let w_bits = gzw::watermark::image_to_bits(&original);
        let r_bits = gzw::watermark::image_to_bits(&recovered);
        let ber = metrics::ber(&w_bits, &r_bits)?;
        let nc = metrics::nc(&w_bits, &r_bits)?;
        println!("ber={ber:.6} nc={nc:.6}");
    }
    Ok(())
}

fn require<T: Copy>(value: Option<T>, flag: &str, attack: &str) -> Result<T> {
    value.with_context(|| format!("--{flag} is required for --type {attack}"))
}

fn run_attack(args: AttackArgs) -> Result<()> {
    let clip = read_wav(&args.input)?;
    let (attacked, sidecar) = match args.attack_type {
        AttackType::Awgn => {
            let snr = require(args.snr, "snr", "awgn")?;
            (
                attacks::awgn(&clip, snr, args.seed)?,
                format!("awgn snr_db={snr} seed={}", args.seed),
            )
        }
        AttackType::Lowpass => {
            let cutoff = require(args.cutoff, "cutoff", "lowpass")?;
            (
                attacks::lowpass(&clip, cutoff)?,
                format!("lowpass cutoff_hz={cutoff} seed={}", args.seed),
            )
        }
        AttackType::Resample => {
            let rate = require(args.rate, "rate", "resample")?;
            (
                attacks::resample_chain(&clip, rate)?,
                format!("resample intermediate_rate_hz={rate} seed={}", args.seed),
            )
        }
        AttackType::Requantize => {
            let bits = require(args.bits, "bits", "requantize")?;
            (
                attacks::requantize(&clip, bits)?,
                format!("requantize bit_depth={bits} seed={}", args.seed),
            )
        }
        AttackType::Amplitude => {
            let gain = require(args.gain, "gain", "amplitude")?;
            (
                attacks::amplitude(&clip, gain)?,
                format!("amplitude gain={gain} seed={}", args.seed),
            )
        }
        AttackType::Tsm => {
            let percent = require(args.percent, "percent", "tsm")?;
            (
                attacks::tsm(&clip, percent)?,
                format!("tsm stretch_percent={percent} seed={}", args.seed),
            )
        }
        AttackType::Crop => {
            let frames = require(args.frames, "frames", "crop")?;
            let end = require(args.end, "end", "crop")?;
            let frame_len = require(args.frame_len, "frame-len", "crop")?;
            let end: CropEnd = end.into();
            (
                attacks::crop(&clip, frames, end, frame_len)?,
                format!(
                    "crop frames={frames} end={end} frame_len={frame_len} seed={}",
                    args.seed
                ),
            )
        }
        AttackType::Mp3 => {
            let bitrate = require(args.bitrate, "bitrate", "mp3")?;
            let encoder = args
                .encoder
                .clone()
                .map(Mp3Encoder::new)
                .or_else(Mp3Encoder::from_env)
                .context("no MP3 encoder; pass --encoder or set GZW_MP3_ENCODER")?;
            (
                attacks::mp3_external(&clip, bitrate, &encoder)?,
                format!("mp3 bitrate_kbps={bitrate} seed={}", args.seed),
            )
        }
    };
    write_wav(&attacked, &args.output)?;
    let sidecar_path = sidecar_path(&args.output);
    std::fs::write(&sidecar_path, format!("{sidecar}\n"))
        .with_context(|| format!("writing {}", sidecar_path.display()))?;
    println!(
        "attacked: {} -> {} ({} samples)",
        args.input.display(),
        args.output.display(),
        attacked.len()
    );
    Ok(())
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".attack.txt");
    PathBuf::from(name)
}

fn select_suite(selector: Option<&str>) -> Result<Vec<SuiteAttack>> {
    let full = standard_suite();
    let Some(selector) = selector else {
        return Ok(full);
    };
    let mut chosen = Vec::new();
    for label in selector.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match full.iter().find(|a| a.label == label) {
            Some(attack) => chosen.push(attack.clone()),
            None => bail!(
                "unknown attack '{label}'; valid labels: {}",
                full.iter()
                    .map(|a| a.label.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    }
    if chosen.is_empty() {
        bail!("--attacks selected nothing");
    }
    Ok(chosen)
}

fn run_evaluate(args: EvaluateArgs) -> Result<()> {
    let mut wav_paths: Vec<PathBuf> = std::fs::read_dir(&args.clips)
        .with_context(|| format!("reading clip directory {}", args.clips.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|e| e.eq_ignore_ascii_case("wav"))
                .unwrap_or(false)
        })
        .collect();
    wav_paths.sort();
    if wav_paths.is_empty() {
        bail!("no .wav clips in {}", args.clips.display());
    }

    let watermark = read_pbm(&args.watermark)?;
    let clips: Vec<(String, AudioClip)> = wav_paths
        .iter()
        .map(|p| {
            let label = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            Ok((label, read_wav(p)?))
        })
        .collect::<Result<_>>()?;

    let opts = EvalOptions {
        scheme: SchemeConfig {
            k: args.k,
            ..SchemeConfig::default()
        },
        seed: args.seed,
        jobs: args.jobs,
        mp3_encoder: args
            .encoder
            .clone()
            .map(Mp3Encoder::new)
            .or_else(Mp3Encoder::from_env),
        dump_features: args.dump_features.is_some(),
        suite: select_suite(args.attacks.as_deref())?,
    };
    let evaluation = eval::evaluate(&clips, &watermark, &opts)?;

    for cell in &evaluation.cells {
        if cell.status == CellStatus::Failed {
            if let Some(msg) = &cell.message {
                eprintln!("{} / {}: {msg}", cell.clip, cell.attack);
            }
        }
    }

    write_report(&evaluation.cells, &args.output)?;

    if let Some(dir) = &args.dump_features {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))?;
        for (label, _) in &clips {
            let traces: Vec<(String, Vec<f64>)> = opts
                .suite
                .iter()
                .filter_map(|attack| {
                    evaluation
                        .traces
                        .iter()
                        .find(|t| t.clip == *label && t.attack == attack.label)
                        .map(|t| (t.attack.clone(), t.values.clone()))
                })
                .collect();
            if !traces.is_empty() {
                write_feature_dump(&traces, &dir.join(format!("{label}.features.csv")))?;
            }
        }
    }

    // Per-attack mean summary in suite order.
    println!("clips={} attacks={}", clips.len(), opts.suite.len());
    for attack in &opts.suite {
        let scored: Vec<&gzw::io::EvalCell> = evaluation
            .cells
            .iter()
            .filter(|c| c.attack == attack.label && c.status == CellStatus::Ok)
            .collect();
        if scored.is_empty() {
            println!("{:20} skipped", attack.label);
            continue;
        }
        let n = scored.len() as f64;
        let ber = scored.iter().filter_map(|c| c.ber).sum::<f64>() / n;
        let nc = scored.iter().filter_map(|c| c.nc).sum::<f64>() / n;
        println!("{:20} mean ber={ber:.4} mean nc={nc:.4}", attack.label);
    }
    println!("report: {}", args.output.display());
    Ok(())
}

fn run_gen_audio(args: GenAudioArgs) -> Result<()> {
    if args.duration <= 0.0 {
        bail!("--duration must be positive");
    }
    let clip = music_like(args.duration, args.rate, args.seed);
    write_wav(&clip, &args.output)?;
    println!(
        "generated: {} ({} samples at {} Hz, rms {:.3})",
        args.output.display(),
        clip.len(),
        args.rate,
        clip.rms()
    );
    Ok(())
}
