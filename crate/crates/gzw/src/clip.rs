//! Mono audio clip with sample rate.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClipError {
    #[error("sample rate must be positive")]
    ZeroSampleRate,
    #[error("sample {0} is not finite")]
    NonFiniteSample(usize),
    #[error("stereo channels differ in length: {left} vs {right}")]
    ChannelLengthMismatch { left: usize, right: usize },
}

/// A mono audio signal; amplitudes are nominally in [-1, 1] but values
/// outside that range are legal in memory (clipping only happens on 16-bit
/// file write).
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self, ClipError> {
        if sample_rate == 0 {
            return Err(ClipError::ZeroSampleRate);
        }
        if let Some(idx) = samples.iter().position(|s| !s.is_finite()) {
            return Err(ClipError::NonFiniteSample(idx));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    /// Downmix a stereo pair by per-sample channel averaging.
    pub fn from_stereo(left: &[f64], right: &[f64], sample_rate: u32) -> Result<Self, ClipError> {
        if left.len() != right.len() {
            return Err(ClipError::ChannelLengthMismatch {
                left: left.len(),
                right: right.len(),
            });
        }
        let mixed = left
            .iter()
            .zip(right)
            .map(|(l, r)| 0.5 * (l + r))
            .collect();
        Self::new(mixed, sample_rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Mean squared amplitude.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64
    }

    pub fn rms(&self) -> f64 {
        self.power().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_rate_and_nan() {
        assert_eq!(
            AudioClip::new(vec![0.0], 0).unwrap_err(),
            ClipError::ZeroSampleRate
        );
        assert_eq!(
            AudioClip::new(vec![0.0, f64::INFINITY], 8000).unwrap_err(),
            ClipError::NonFiniteSample(1)
        );
    }

    #[test]
    fn stereo_downmix_averages() {
        let clip = AudioClip::from_stereo(&[0.2, 1.0], &[0.4, 0.0], 8000).unwrap();
        assert_eq!(clip.samples(), &[0.30000000000000004, 0.5]);
    }

    #[test]
    fn power_of_known_signal() {
        let clip = AudioClip::new(vec![0.5, -0.5, 0.5, -0.5], 8000).unwrap();
        assert!((clip.power() - 0.25).abs() < 1e-15);
        assert!((clip.rms() - 0.5).abs() < 1e-15);
    }
}
