//! Extraction fidelity metrics: bit error rate and normalized
//! cross-correlation between watermark bit sequences.

use crate::watermark::BitSequence;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("bit sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("metrics need at least one bit")]
    Empty,
}

/// Scored comparison of an extracted watermark against the original.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub clip: String,
    pub attack: String,
    pub ber: f64,
    pub nc: f64,
}

fn check(a: &BitSequence, b: &BitSequence) -> Result<(), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

/// Fraction of differing bit positions.
pub fn ber(a: &BitSequence, b: &BitSequence) -> Result<f64, MetricsError> {
    check(a, b)?;
    let diffs = a
        .bits()
        .iter()
        .zip(b.bits())
        .filter(|(x, y)| x != y)
        .count();
    Ok(diffs as f64 / a.len() as f64)
}

/// Normalized cross-correlation over {0,1} values:
/// sum(a*b) / sqrt(sum(a^2) * sum(b^2)).
///
/// All-zero convention: 1 when both sequences are all-zero (identical), 0
/// when only one side is.
pub fn nc(a: &BitSequence, b: &BitSequence) -> Result<f64, MetricsError> {
    check(a, b)?;
    let dot = a
        .bits()
        .iter()
        .zip(b.bits())
        .filter(|(x, y)| **x == 1 && **y == 1)
        .count() as f64;
    let na = a.bits().iter().filter(|x| **x == 1).count() as f64;
    let nb = b.bits().iter().filter(|x| **x == 1).count() as f64;
    match (na == 0.0, nb == 0.0) {
        (true, true) => Ok(1.0),
        (true, false) | (false, true) => Ok(0.0),
        _ => Ok(dot / (na * nb).sqrt()),
    }
}
