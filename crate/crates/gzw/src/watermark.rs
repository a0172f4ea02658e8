//! The zero-watermarking scheme: framing, per-frame spectral features,
//! K-means binarization, and XOR key generation / watermark recovery.
//!
//! The host audio is never modified. Embedding derives a binary feature
//! sequence B from the clip's graph spectrum and publishes the key
//! K = B xor W; extraction recomputes the feature bits from the (possibly
//! attacked) clip and returns W' = B' xor K. Extraction re-frames from the
//! attacked clip's own length, which is what re-synchronizes cropped or
//! time-scaled audio.

use crate::clip::AudioClip;
use crate::graph::{FourierBasis, Frame, GraphError, ShiftOperator};
use crate::kmeans::{self, KmeansConfig};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WatermarkError {
    #[error("frame count must be at least 1, got {0}")]
    InvalidFrameCount(usize),
    #[error("clip too short: {samples} samples over {frames} frames leaves fewer than 2 samples per frame")]
    ClipTooShort { samples: usize, frames: usize },
    #[error("bit sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{width}x{height} image holds {} pixels, expected {expected}", width * height)]
    ImageDimensionMismatch {
        expected: usize,
        width: usize,
        height: usize,
    },
    #[error("watermark must carry at least 2 bits, got {0}")]
    WatermarkTooSmall(usize),
    #[error("bit value {value} at position {index} is not 0 or 1")]
    NotABit { index: usize, value: u8 },
    #[error("feature {0} is negative or not finite")]
    InvalidFeature(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Per-frame nonnegative feature values (max |GFT coefficient| per frame).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    values: Vec<f64>,
}

impl FeatureSequence {
    pub fn new(values: Vec<f64>) -> Result<Self, WatermarkError> {
        if let Some(idx) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(WatermarkError::InvalidFeature(idx));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A {0,1} sequence: watermark bits, feature bits, or a key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSequence {
    bits: Vec<u8>,
}

impl BitSequence {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, WatermarkError> {
        if let Some(index) = bits.iter().position(|b| *b > 1) {
            return Err(WatermarkError::NotABit {
                index,
                value: bits[index],
            });
        }
        Ok(Self { bits })
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self {
            bits: bits.into_iter().map(u8::from).collect(),
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    fn xor(&self, other: &Self) -> Result<Self, WatermarkError> {
        if self.len() != other.len() {
            return Err(WatermarkError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }
}

/// Binary image, row-major, top-left first. Pixel value 1 is black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, WatermarkError> {
        if pixels.len() != width * height {
            return Err(WatermarkError::ImageDimensionMismatch {
                expected: pixels.len(),
                width,
                height,
            });
        }
        if let Some(index) = pixels.iter().position(|p| *p > 1) {
            return Err(WatermarkError::NotABit {
                index,
                value: pixels[index],
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }
}

/// Scheme parameters: shift order and binarization settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub k: usize,
    pub kmeans: KmeansConfig,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            k: 3,
            kmeans: KmeansConfig::default(),
        }
    }
}

/// Split the clip into `frame_count` non-overlapping frames of
/// N = floor(len / frame_count) samples; trailing samples are discarded.
pub fn frame_signal(clip: &AudioClip, frame_count: usize) -> Result<Vec<Frame>, WatermarkError> {
    if frame_count == 0 {
        return Err(WatermarkError::InvalidFrameCount(0));
    }
    let n = clip.len() / frame_count;
    if n < 2 {
        return Err(WatermarkError::ClipTooShort {
            samples: clip.len(),
            frames: frame_count,
        });
    }
    let samples = clip.samples();
    (0..frame_count)
        .map(|m| Frame::new(samples[m * n..(m + 1) * n].to_vec()).map_err(WatermarkError::from))
        .collect()
}

/// Max |graph spectral coefficient| of each frame, with one shared basis.
pub fn extract_features(frames: &[Frame], k: usize) -> Result<FeatureSequence, WatermarkError> {
    let Some(first) = frames.first() else {
        return Err(WatermarkError::InvalidFrameCount(0));
    };
    let op = ShiftOperator::new(first.len(), k)?;
    let basis = FourierBasis::new(&op);
    let values = frames
        .iter()
        .map(|f| Ok(basis.gft(f)?.max_abs_coefficient()))
        .collect::<Result<Vec<f64>, WatermarkError>>()?;
    Ok(FeatureSequence { values })
}

/// Two-class K-means over the features; the cluster with the larger centroid
/// codes as 1. Degenerate inputs (all values equal) code as all zeros.
pub fn binarize_features(features: &FeatureSequence, cfg: &SchemeConfig) -> BitSequence {
    match kmeans::cluster_two(features.values(), &cfg.kmeans) {
        Some(split) => BitSequence::from_bools(
            features.values().iter().map(|&v| split.assign_high(v)),
        ),
        None => BitSequence {
            bits: vec![0; features.len()],
        },
    }
}

/// K(m) = B(m) xor W(m).
pub fn generate_key(
    feature_bits: &BitSequence,
    watermark_bits: &BitSequence,
) -> Result<BitSequence, WatermarkError> {
    feature_bits.xor(watermark_bits)
}

/// W'(m) = B'(m) xor K(m).
pub fn extract_watermark(
    feature_bits: &BitSequence,
    key: &BitSequence,
) -> Result<BitSequence, WatermarkError> {
    feature_bits.xor(key)
}

/// Row-major flattening, top-left pixel first.
pub fn image_to_bits(img: &BinaryImage) -> BitSequence {
    BitSequence {
        bits: img.pixels.clone(),
    }
}

/// Inverse of [`image_to_bits`].
pub fn bits_to_image(
    bits: &BitSequence,
    width: usize,
    height: usize,
) -> Result<BinaryImage, WatermarkError> {
    if width * height != bits.len() {
        return Err(WatermarkError::ImageDimensionMismatch {
            expected: bits.len(),
            width,
            height,
        });
    }
    BinaryImage::new(width, height, bits.bits.clone())
}

/// Zero-watermark embedding: derive the key binding this clip to the
/// watermark image. The clip itself is never altered.
pub fn embed(
    clip: &AudioClip,
    watermark: &BinaryImage,
    cfg: &SchemeConfig,
) -> Result<BitSequence, WatermarkError> {
    let m = watermark.pixel_count();
    if m < 2 {
        return Err(WatermarkError::WatermarkTooSmall(m));
    }
    let frames = frame_signal(clip, m)?;
    let features = extract_features(&frames, cfg.k)?;
    let feature_bits = binarize_features(&features, cfg);
    generate_key(&feature_bits, &image_to_bits(watermark))
}

/// Zero-watermark extraction: recompute feature bits from the (possibly
/// attacked) clip, XOR against the key, and reshape into an image.
pub fn extract(
    clip: &AudioClip,
    key: &BitSequence,
    width: usize,
    height: usize,
    cfg: &SchemeConfig,
) -> Result<BinaryImage, WatermarkError> {
    let m = key.len();
    if m < 2 {
        return Err(WatermarkError::WatermarkTooSmall(m));
    }
    if width * height != m {
        return Err(WatermarkError::ImageDimensionMismatch {
            expected: m,
            width,
            height,
        });
    }
    let frames = frame_signal(clip, m)?;
    let features = extract_features(&frames, cfg.k)?;
    let feature_bits = binarize_features(&features, cfg);
    let recovered = extract_watermark(&feature_bits, key)?;
    bits_to_image(&recovered, width, height)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bitseq(bits: &[u8]) -> BitSequence {
        BitSequence::from_bits(bits.to_vec()).unwrap()
    }

    /// Deterministic tonal clip with a slow amplitude envelope, enough
    /// feature variation for binarization to form two real clusters.
    fn test_clip(len: usize, rate: u32, seed: u64) -> AudioClip {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        let mut noise = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let f0 = 200.0 + 37.0 * (seed % 13) as f64;
        let env_rate = 0.23 + 0.11 * (seed % 5) as f64;
        let samples = (0..len)
            .map(|i| {
                let t = i as f64 / rate as f64;
                let env = 0.55 + 0.45 * (std::f64::consts::TAU * env_rate * t).sin();
                let tone = (std::f64::consts::TAU * f0 * t).sin()
                    + 0.5 * (std::f64::consts::TAU * 2.017 * f0 * t).sin();
                0.25 * env * tone + 0.002 * noise()
            })
            .collect();
        AudioClip::new(samples, rate).unwrap()
    }

    fn checker_image(width: usize, height: usize) -> BinaryImage {
        let pixels = (0..width * height)
            .map(|i| ((i / width + i % width) % 2) as u8)
            .collect();
        BinaryImage::new(width, height, pixels).unwrap()
    }

    #[test]
    fn framing_discards_trailing_samples() {
        let clip = AudioClip::new((0..10).map(|i| i as f64).collect(), 8000).unwrap();
        let frames = frame_signal(&clip, 3).unwrap();
        assert_eq!(frames.len(), 3);
        assert_eq!(frames[0].samples(), &[0.0, 1.0, 2.0]);
        assert_eq!(frames[2].samples(), &[6.0, 7.0, 8.0]);
    }

    #[test]
    fn framing_exact_division() {
        let clip = AudioClip::new(vec![0.0; 12], 8000).unwrap();
        let frames = frame_signal(&clip, 4).unwrap();
        assert_eq!(frames.len(), 4);
        assert!(frames.iter().all(|f| f.len() == 3));
    }

    #[test]
    fn framing_rejects_degenerate_frame_length() {
        let clip = AudioClip::new(vec![0.0; 5], 8000).unwrap();
        assert_eq!(
            frame_signal(&clip, 3).unwrap_err(),
            WatermarkError::ClipTooShort {
                samples: 5,
                frames: 3
            }
        );
    }

    #[test]
    fn features_of_silence_are_zero() {
        let frames: Vec<Frame> = (0..4)
            .map(|_| Frame::new(vec![0.0; 8]).unwrap())
            .collect();
        let features = extract_features(&frames, 3).unwrap();
        assert_eq!(features.values(), &[0.0; 4]);
    }

    #[test]
    fn feature_of_constant_frame_is_eigenvalue_weighted_dc() {
        let frames = vec![Frame::new(vec![1.0; 4]).unwrap()];
        let features = extract_features(&frames, 3).unwrap();
        assert!((features.values()[0] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn features_double_with_amplitude() {
        let clip = test_clip(4096, 8000, 7);
        let frames = frame_signal(&clip, 16).unwrap();
        let base = extract_features(&frames, 3).unwrap();

        let doubled = AudioClip::new(
            clip.samples().iter().map(|s| s * 2.0).collect(),
            clip.sample_rate(),
        )
        .unwrap();
        let frames2 = frame_signal(&doubled, 16).unwrap();
        let scaled = extract_features(&frames2, 3).unwrap();
        for (a, b) in base.values().iter().zip(scaled.values()) {
            assert!((b - 2.0 * a).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn xor_key_examples() {
        let b = bitseq(&[0, 1, 1, 0]);
        let w = bitseq(&[1, 0, 1, 0]);
        let k = generate_key(&b, &w).unwrap();
        assert_eq!(k.bits(), &[1, 1, 0, 0]);
        assert_eq!(generate_key(&b, &b).unwrap().bits(), &[0; 4]);
        assert_eq!(
            generate_key(&bitseq(&[0; 4]), &bitseq(&[1, 0, 1, 1]))
                .unwrap()
                .bits(),
            &[1, 0, 1, 1]
        );

        // Inverse of the first example plus involution.
        assert_eq!(extract_watermark(&b, &k).unwrap(), w);
    }

    #[test]
    fn xor_rejects_length_mismatch() {
        let err = generate_key(&bitseq(&[0, 1]), &bitseq(&[1])).unwrap_err();
        assert_eq!(err, WatermarkError::LengthMismatch { left: 2, right: 1 });
    }

    #[test]
    fn bit_flip_locality() {
        let b = bitseq(&[0, 1, 1, 0, 1]);
        let k = bitseq(&[1, 1, 0, 0, 1]);
        let w = extract_watermark(&b, &k).unwrap();
        let mut flipped = b.bits().to_vec();
        flipped[3] ^= 1;
        let w2 = extract_watermark(&bitseq(&flipped), &k).unwrap();
        let diffs: Vec<usize> = (0..5).filter(|&i| w.bits()[i] != w2.bits()[i]).collect();
        assert_eq!(diffs, vec![3]);
    }

    #[test]
    fn image_bits_round_trip() {
        let img = BinaryImage::new(2, 2, vec![1, 0, 0, 1]).unwrap();
        let bits = image_to_bits(&img);
        assert_eq!(bits.bits(), &[1, 0, 0, 1]);
        assert_eq!(bits_to_image(&bits, 2, 2).unwrap(), img);
        assert!(bits_to_image(&bits, 4, 3).is_err());

        let img = checker_image(16, 8);
        assert_eq!(bits_to_image(&image_to_bits(&img), 16, 8).unwrap(), img);
    }

    #[test]
    fn binarize_groups_feature_clusters() {
        let features = FeatureSequence::new(vec![1.0, 1.1, 9.0, 9.2]).unwrap();
        let bits = binarize_features(&features, &SchemeConfig::default());
        assert_eq!(bits.bits(), &[0, 0, 1, 1]);

        let flat = FeatureSequence::new(vec![2.5; 6]).unwrap();
        assert_eq!(
            binarize_features(&flat, &SchemeConfig::default()).bits(),
            &[0; 6]
        );
    }

    #[test]
    fn embed_then_extract_recovers_watermark_exactly() {
        let clip = test_clip(65536, 16000, 3);
        let img = checker_image(8, 8);
        let cfg = SchemeConfig::default();
        let key = embed(&clip, &img, &cfg).unwrap();
        let recovered = extract(&clip, &key, 8, 8, &cfg).unwrap();
        assert_eq!(recovered, img);
    }

    #[test]
    fn embed_leaves_clip_untouched() {
        let clip = test_clip(16384, 8000, 5);
        let before = clip.samples().to_vec();
        let _ = embed(&clip, &checker_image(4, 4), &SchemeConfig::default()).unwrap();
        assert_eq!(clip.samples(), before.as_slice());
    }

    #[test]
    fn embed_is_deterministic() {
        let clip = test_clip(32768, 16000, 11);
        let img = checker_image(8, 8);
        let cfg = SchemeConfig::default();
        let k1 = embed(&clip, &img, &cfg).unwrap();
        let k2 = embed(&clip, &img, &cfg).unwrap();
        assert_eq!(k1, k2);
    }

    #[test]
    fn float_amplitude_scaling_preserves_recovery() {
        let clip = test_clip(65536, 16000, 9);
        let img = checker_image(8, 8);
        let cfg = SchemeConfig::default();
        let key = embed(&clip, &img, &cfg).unwrap();
        let scaled = AudioClip::new(
            clip.samples().iter().map(|s| s * 1.5).collect(),
            clip.sample_rate(),
        )
        .unwrap();
        let recovered = extract(&scaled, &key, 8, 8, &cfg).unwrap();
        assert_eq!(recovered, img);
    }

    #[test]
    fn different_clips_give_different_keys() {
        let img = checker_image(8, 8);
        let cfg = SchemeConfig::default();
        let k1 = embed(&test_clip(32768, 16000, 1), &img, &cfg).unwrap();
        let k2 = embed(&test_clip(32768, 16000, 2), &img, &cfg).unwrap();
        assert_ne!(k1, k2);
    }

    #[test]
    fn extract_rejects_incompatible_dimensions() {
        let clip = test_clip(16384, 8000, 4);
        let key = embed(&clip, &checker_image(4, 4), &SchemeConfig::default()).unwrap();
        assert!(matches!(
            extract(&clip, &key, 5, 4, &SchemeConfig::default()),
            Err(WatermarkError::ImageDimensionMismatch { .. })
        ));
    }

    #[test]
    fn bit_sequence_validates_values() {
        assert!(matches!(
            BitSequence::from_bits(vec![0, 2]),
            Err(WatermarkError::NotABit { index: 1, value: 2 })
        ));
    }
}
