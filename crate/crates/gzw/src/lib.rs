//! Graph-Fourier-transform audio zero-watermarking.
//!
//! A binary feature signature is derived from the graph spectrum of an audio
//! clip (circulant k-shift operator, DFT eigenbasis, per-frame max
//! |coefficient|, two-class K-means) and bound to a watermark image by XOR.
//! The resulting key recovers the watermark from attacked copies of the
//! audio; the host signal itself is never modified. The crate also ships the
//! standard attack suite, BER/NC metrics, bit-exact WAV/PBM/key-file I/O,
//! and a batch evaluation harness.

pub mod attacks;
pub mod clip;
pub mod eval;
pub mod graph;
pub mod io;
pub mod kmeans;
pub mod metrics;
pub mod synth;
pub mod watermark;

pub use clip::{AudioClip, ClipError};
pub use graph::{FourierBasis, Frame, GraphError, GraphSpectrum, ShiftOperator};
pub use watermark::{BinaryImage, BitSequence, FeatureSequence, SchemeConfig, WatermarkError};
