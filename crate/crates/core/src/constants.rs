//! Embedded reference constants.
//!
//! Published per-dimension entropies and codec byte counts used by the
//! reproduction command live here, versioned with the code, so reproducing
//! the reference tables never depends on network access. The locally
//! computed entropies disagree with some published values; see the
//! reproduction command's report for the comparison.

use crate::tradeoff::DiscreteDistribution;

/// Published per-dimension entropy of fp16-quantized N(0,1), bits.
pub const PUBLISHED_ENTROPY_FP16: f64 = 11.36;
/// Published per-dimension entropy of fp32-quantized N(0,1), bits.
pub const PUBLISHED_ENTROPY_FP32: f64 = 26.55;
/// Published per-dimension entropy of fp64-quantized N(0,1), bits.
pub const PUBLISHED_ENTROPY_FP64: f64 = 55.56;

/// Average lossless-compressed sizes per image, bytes (CIFAR10).
pub const CIFAR10_PNG_BYTES: f64 = 2271.0;
pub const CIFAR10_WEBP_BYTES: f64 = 1807.0;
pub const CIFAR10_JPEGXL_BYTES: f64 = 1576.0;

/// Average lossless-compressed sizes per image, bytes (LSUN-Church).
pub const LSUN_PNG_BYTES: f64 = 103897.0;
pub const LSUN_WEBP_BYTES: f64 = 69246.0;
pub const LSUN_JPEGXL_BYTES: f64 = 62940.0;

/// Published noise-dimension table computed from the JPEG-XL sizes and the
/// published entropies: rows fp16/fp32/fp64, columns CIFAR10/LSUN-Church.
pub const PUBLISHED_DIMENSIONS: [[u64; 2]; 3] = [[1110, 44324], [475, 18966], [227, 9063]];

/// The 7-class toy source for the d(ε) example: a geometric profile
/// `p_i ∝ r^i` with `r` chosen so the entropy lands on 1.857 bits.
pub const TOY_SOURCE_MASSES: [f64; 7] = [
    0.526471, 0.250844, 0.119518, 0.056946, 0.027133, 0.012928, 0.00616,
];

/// Entropy of [`TOY_SOURCE_MASSES`], bits.
pub const TOY_SOURCE_ENTROPY: f64 = 1.857;

/// The toy source as a validated distribution.
pub fn toy_source() -> DiscreteDistribution {
    DiscreteDistribution::new(TOY_SOURCE_MASSES.to_vec()).expect("toy masses sum to 1")
}
