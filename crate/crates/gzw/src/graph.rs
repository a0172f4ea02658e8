//! Circulant graph shift operators and the graph Fourier transform.
//!
//! An audio frame of length `N` is treated as a signal on a directed cycle
//! graph whose adjacency/weight matrix is the combined k-shift operator: a
//! binary circulant matrix with ones on the main diagonal and the next `k-1`
//! cyclic superdiagonals. Circulant matrices are all diagonalized by the DFT
//! basis, so the graph Fourier basis is fixed in closed form instead of being
//! left to a general eigensolver. That keeps the transform deterministic
//! across runs and platforms even when eigenvalues repeat or vanish
//! (e.g. k = 3 with N divisible by 3).
//!
//! Conventions used throughout: `w = exp(-2*pi*i/N)`, the forward matrix `F`
//! is the unitary DFT (`F[j][m] = w^(jm) / sqrt(N)`), its inverse `Q = F^H`
//! holds the eigenvectors as columns, and the eigenvalue paired with column
//! `j` is `lambda_j = sum_{t=0}^{k-1} w^(-t*j)`.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("frame needs at least 2 samples, got {0}")]
    FrameTooShort(usize),
    #[error("frame sample {0} is not finite")]
    NonFiniteSample(usize),
    #[error("invalid shift operator: need N >= 2 and 1 <= k <= N, got N={n}, k={k}")]
    InvalidOperator { n: usize, k: usize },
    #[error("length mismatch: operator is {expected}-dimensional, input has length {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("inverse transform left imaginary residue {0:.3e}; spectrum is not a valid transform of a real signal")]
    SpectrumResidue(f64),
}

/// One audio frame: a finite real vector of length >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    samples: Vec<f64>,
}

impl Frame {
    pub fn new(samples: Vec<f64>) -> Result<Self, GraphError> {
        if samples.len() < 2 {
            return Err(GraphError::FrameTooShort(samples.len()));
        }
        if let Some(idx) = samples.iter().position(|s| !s.is_finite()) {
            return Err(GraphError::NonFiniteSample(idx));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// The combined graph k-shift operator on N vertices.
///
/// Its realized matrix is the sum of the pure t-shift matrices for
/// t = 0..k-1; entry (i, j) is 1 exactly when `(j - i) mod N < k`.
/// k = 1 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftOperator {
    n: usize,
    k: usize,
}

impl ShiftOperator {
    pub fn new(n: usize, k: usize) -> Result<Self, GraphError> {
        if n < 2 || k < 1 || k > n {
            return Err(GraphError::InvalidOperator { n, k });
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Realized dense matrix, row-major, built by summing the t-shift
    /// matrices (each t-shift puts a 1 at column (i + t) mod N of row i).
    pub fn matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for t in 0..self.k {
            for i in 0..n {
                out[i * n + (i + t) % n] += 1.0;
            }
        }
        out
    }

    /// Apply the operator to a frame: y[i] = sum_{t=0}^{k-1} x[(i+t) mod N].
    pub fn apply(&self, frame: &Frame) -> Result<Vec<f64>, GraphError> {
        let x = frame.samples();
        self.apply_slice(x)
    }

    pub(crate) fn apply_slice(&self, x: &[f64]) -> Result<Vec<f64>, GraphError> {
        if x.len() != self.n {
            return Err(GraphError::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let n = self.n;
        let y = (0..n)
            .map(|i| (0..self.k).map(|t| x[(i + t) % n]).sum())
            .collect();
        Ok(y)
    }

    /// Eigenvalues in DFT order: lambda_j = sum_{t=0}^{k-1} exp(2*pi*i*t*j/N),
    /// summed term by term. lambda_0 is always k.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let n = self.n as f64;
        (0..self.n)
            .map(|j| {
                (0..self.k)
                    .map(|t| Complex64::cis(std::f64::consts::TAU * (t * j) as f64 / n))
                    .sum()
            })
            .collect()
    }
}

/// Complex graph-frequency coefficients of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpectrum {
    coefficients: Vec<Complex64>,
}

impl GraphSpectrum {
    pub fn new(coefficients: Vec<Complex64>) -> Self {
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Largest coefficient modulus; the per-frame watermark feature.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Graph Fourier basis of a shift operator.
///
/// Immutable once built and cheap to share; reuse one basis for every frame
/// of a clip. The transform runs as an FFT scaled by the eigenvalues, which
/// equals the dense `F * Gamma_k * x` product (the definition) to within
/// floating-point error.
pub struct FourierBasis {
    n: usize,
    k: usize,
    eigenvalues: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl FourierBasis {
    pub fn new(op: &ShiftOperator) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n: op.n(),
            k: op.k(),
            eigenvalues: op.eigenvalues(),
            fft: planner.plan_fft_forward(op.n()),
            ifft: planner.plan_fft_inverse(op.n()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shift_order(&self) -> usize {
        self.k
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Dense forward matrix F, row-major: F[j][m] = exp(-2*pi*i*j*m/N)/sqrt(N).
    pub fn forward_matrix(&self) -> Vec<Complex64> {
        let n = self.n;
        let scale = 1.0 / (n as f64).sqrt();
        let mut out = vec![Complex64::default(); n * n];
        for j in 0..n {
            for m in 0..n {
                let phase = -std::f64::consts::TAU * (j * m) as f64 / n as f64;
                out[j * n + m] = Complex64::cis(phase) * scale;
            }
        }
        out
    }

    /// Dense inverse matrix Q = F^H; column j is the eigenvector paired with
    /// eigenvalue j.
    pub fn inverse_matrix(&self) -> Vec<Complex64> {
        let n = self.n;
        let scale = 1.0 / (n as f64).sqrt();
        let mut out = vec![Complex64::default(); n * n];
        for m in 0..n {
            for j in 0..n {
                let phase = std::f64::consts::TAU * (j * m) as f64 / n as f64;
                out[m * n + j] = Complex64::cis(phase) * scale;
            }
        }
        out
    }

    /// Graph Fourier transform of a frame: F * (Gamma_k * x), computed as the
    /// unitary DFT of x scaled per-bin by the eigenvalues.
    pub fn gft(&self, frame: &Frame) -> Result<GraphSpectrum, GraphError> {
        if frame.len() != self.n {
            return Err(GraphError::DimensionMismatch {
                expected: self.n,
                actual: frame.len(),
            });
        }
        let scale = 1.0 / (self.n as f64).sqrt();
        let mut buf: Vec<Complex64> = frame
            .samples()
            .iter()
            .map(|&s| Complex64::new(s, 0.0))
            .collect();
        self.fft.process(&mut buf);
        for (c, lambda) in buf.iter_mut().zip(&self.eigenvalues) {
            *c *= lambda * scale;
        }
        Ok(GraphSpectrum::new(buf))
    }

    /// Inverse transform Q * spectrum, reduced to its real part.
    ///
    /// Round-trips `gft` back to `Gamma_k * x`. A residual imaginary part
    /// above 1e-6 means the spectrum was not produced from a real signal and
    /// is rejected.
    pub fn igft(&self, spectrum: &GraphSpectrum) -> Result<Vec<f64>, GraphError> {
        if spectrum.len() != self.n {
            return Err(GraphError::DimensionMismatch {
                expected: self.n,
                actual: spectrum.len(),
            });
        }
        let mut buf = spectrum.coefficients().to_vec();
        self.ifft.process(&mut buf);
        let scale = 1.0 / (self.n as f64).sqrt();
        let residue = buf.iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max);
        if residue > 1e-6 {
            return Err(GraphError::SpectrumResidue(residue));
        }
        Ok(buf.iter().map(|c| c.re * scale).collect())
    }
}
