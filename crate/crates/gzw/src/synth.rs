//! Deterministic synthetic "music-like" audio: seeded harmonic voices with
//! slow amplitude envelopes over a low noise floor. Stands in for real music
//! when benchmarking; the same seed always produces the same samples.

use crate::clip::AudioClip;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const VOICES: usize = 7;
/// Envelopes are sampled at this block size and linearly interpolated; their
/// rates are far below the block rate.
const ENV_BLOCK: usize = 256;
/// Peak ceiling leaves headroom so a 2x amplitude attack stays inside the
/// 16-bit range when written to disk.
const PEAK_CEILING: f64 = 0.45;

struct Voice {
    /// (relative amplitude, phase rotator, current phase) per partial.
    partials: Vec<(f64, [f64; 2], [f64; 2])>,
    env_rates: [f64; 2],
    env_phases: [f64; 2],
    gain: f64,
}

impl Voice {
    fn envelope(&self, t: f64) -> f64 {
        0.5 + 0.3 * (std::f64::consts::TAU * self.env_rates[0] * t + self.env_phases[0]).sin()
            + 0.2 * (std::f64::consts::TAU * self.env_rates[1] * t + self.env_phases[1]).sin()
    }
}

/// Generate `duration_secs` of audio at `sample_rate`. RMS always lands in
/// [0.05, 0.5], so the clip has usable power for SNR-relative attacks.
pub fn music_like(duration_secs: f64, sample_rate: u32, seed: u64) -> AudioClip {
    assert!(duration_secs > 0.0 && sample_rate > 0);
    let len = (duration_secs * sample_rate as f64).round() as usize;
    let rate = sample_rate as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut voices: Vec<Voice> = (0..VOICES)
        .map(|_| {
            let f0 = 65.0 * 18.0f64.powf(rng.random::<f64>());
            let n_partials = 1 + (rng.random::<u32>() % 3) as usize;
            let partials = (1..=n_partials)
                .map(|h| {
                    let freq = f0 * h as f64;
                    let amp = 1.0 / (h as f64).powf(1.4);
                    let omega = std::f64::consts::TAU * freq / rate;
                    let rot = [omega.cos(), omega.sin()];
                    let phase0 = std::f64::consts::TAU * rng.random::<f64>();
                    (amp, rot, [phase0.cos(), phase0.sin()])
                })
                .collect();
            Voice {
                partials,
                env_rates: [
                    0.12 * 12.0f64.powf(rng.random::<f64>()),
                    0.12 * 12.0f64.powf(rng.random::<f64>()),
                ],
                env_phases: [
                    std::f64::consts::TAU * rng.random::<f64>(),
                    std::f64::consts::TAU * rng.random::<f64>(),
                ],
                gain: 0.35 + 0.65 * rng.random::<f64>(),
            }
        })
        .collect();

    let mut samples = vec![0.0f64; len];
    let mut block_start = 0;
    let mut env_now: Vec<f64> = voices.iter().map(|v| v.envelope(0.0)).collect();
    while block_start < len {
        let block_end = (block_start + ENV_BLOCK).min(len);
        let env_next: Vec<f64> = voices
            .iter()
            .map(|v| v.envelope(block_end as f64 / rate))
            .collect();
        let span = (block_end - block_start) as f64;
        for (vi, voice) in voices.iter_mut().enumerate() {
            let e0 = env_now[vi];
            let de = (env_next[vi] - e0) / span;
            for (amp, rot, phase) in &mut voice.partials {
                let g = voice.gain * *amp;
                for (j, s) in samples[block_start..block_end].iter_mut().enumerate() {
                    *s += g * (e0 + de * j as f64) * phase[1];
                    // Complex rotation advances the oscillator one sample.
                    let re = phase[0] * rot[0] - phase[1] * rot[1];
                    phase[1] = phase[0] * rot[1] + phase[1] * rot[0];
                    phase[0] = re;
                }
            }
        }
        env_now = env_next;
        block_start = block_end;
    }

    for s in samples.iter_mut() {
        let n: f64 = StandardNormal.sample(&mut rng);
        *s += 0.004 * n;
    }

    let rms = (samples.iter().map(|s| s * s).sum::<f64>() / len as f64).sqrt();
    let peak = samples.iter().fold(0.0f64, |acc, s| acc.max(s.abs()));
    let target = 0.12 + 0.08 * rng.random::<f64>();
    let mut scale = target / rms;
    if peak * scale > PEAK_CEILING {
        scale = PEAK_CEILING / peak;
    }
    for s in samples.iter_mut() {
        *s *= scale;
    }

    AudioClip::new(samples, sample_rate).expect("generated samples are finite")
}
