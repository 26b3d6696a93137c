//! Discrete probability mass and entropy of a standard normal quantized to
//! a [`FloatFormat`].
//!
//! Each representable value `v` owns the interval between the midpoints to
//! its neighbors; its mass is the standard normal probability of that
//! interval. Entropy is computed either exactly (exhaustive enumeration for
//! narrow formats) or by seeded Monte Carlo, which is deterministic for a
//! fixed `(format, sample_count, seed)` regardless of worker count.

mod special;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::floatfmt::{enumerate_finite, round_to_format, FloatFormat, FloatValue};
use crate::{Error, Result};

pub use special::{erf, erfc};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const SQRT_2PI: f64 = 2.5066282746310002;

/// Samples per Monte Carlo chunk. Part of the determinism contract: each
/// chunk draws from its own substream, so results do not depend on how
/// chunks are scheduled over workers.
pub const MC_CHUNK: u64 = 1 << 16;

/// Masses below this are recomputed as density × width to avoid a
/// catastrophically cancelled CDF difference turning into −∞ log-mass.
const UNDERFLOW_FALLBACK: f64 = 1e-300;

/// CDF differences are evaluated by Gauss–Legendre quadrature of the
/// density on intervals narrower than this; the direct difference of two
/// CDF values loses about seven digits to cancellation on ulp-sized
/// intervals.
const QUADRATURE_WIDTH: f64 = 0.25;

// 16-point Gauss–Legendre nodes and weights on [-1, 1].
const GL16: [(f64, f64); 16] = [
    (-9.89400934991649939e-01, 2.71524594117540374e-02),
    (-9.44575023073232600e-01, 6.22535239386477063e-02),
    (-8.65631202387831755e-01, 9.51585116824925914e-02),
    (-7.55404408355002999e-01, 1.24628971255534030e-01),
    (-6.17876244402643771e-01, 1.49595988816576764e-01),
    (-4.58016777657227370e-01, 1.69156519395002619e-01),
    (-2.81603550779258915e-01, 1.82603415044923612e-01),
    (-9.50125098376374544e-02, 1.89450610455068585e-01),
    (9.50125098376374544e-02, 1.89450610455068585e-01),
    (2.81603550779258915e-01, 1.82603415044923612e-01),
    (4.58016777657227370e-01, 1.69156519395002619e-01),
    (6.17876244402643771e-01, 1.49595988816576764e-01),
    (7.55404408355002999e-01, 1.24628971255534030e-01),
    (8.65631202387831755e-01, 9.51585116824925914e-02),
    (9.44575023073232600e-01, 6.22535239386477063e-02),
    (9.89400934991649939e-01, 2.71524594117540374e-02),
];

/// How an [`EntropyEstimate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Exact,
    MonteCarlo,
}

/// Per-dimension entropy of a quantized standard normal, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub bits_per_dim: f64,
    /// Monte Carlo standard error; 0 for exact results.
    pub std_error: f64,
    pub method: EstimateMethod,
    pub sample_count: u64,
    pub format: FloatFormat,
    pub seed: u64,
}

/// Standard normal CDF Φ(x).
///
/// Evaluated through the complementary error function so the tail keeps
/// full relative accuracy down to the underflow limit of `f64`.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x < 0.0 {
        0.5 * erfc(-x * FRAC_1_SQRT_2)
    } else {
        1.0 - 0.5 * erfc(x * FRAC_1_SQRT_2)
    }
}

/// Standard normal upper tail Q(x) = 1 − Φ(x), accurate for large x.
pub fn std_normal_upper_tail(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal density φ(x).
pub fn std_normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// ∫ φ over `[lo, hi]` by 16-point Gauss–Legendre quadrature. Essentially
/// exact for the narrow intervals it is used on.
fn density_quadrature(lo: f64, hi: f64) -> f64 {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for (node, weight) in GL16 {
        acc += weight * std_normal_density(center + half * node);
    }
    acc * half
}

/// Probability that a standard normal rounds to the atom `v` (±0 merged).
///
/// The mass is the CDF increment over the midpoint interval around `v`; at
/// the range ends the interval extends to ∓∞ (values beyond the largest
/// finite magnitude clamp there). Errors on non-finite input.
pub fn pmf(v: FloatValue) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::Domain(
            "pmf is defined on finite atoms only".into(),
        ));
    }
    // the grid and N(0,1) are sign-symmetric; computing every mass on the
    // positive side makes pmf(v) = pmf(−v) hold exactly
    let v = if v.decode() < 0.0 {
        FloatValue::from_bits(v.bits() ^ (1u64 << (v.format().total_bits() - 1)), v.format())?
    } else {
        v
    };
    let x = v.decode();
    let below = v.next_down().map(|w| w.decode());
    let above = v.next_up().map(|w| w.decode());
    let mass = match (below, above) {
        (None, None) => 1.0,
        (None, Some(b)) => std_normal_cdf(0.5 * (x + b)),
        (Some(a), None) => std_normal_upper_tail(0.5 * (a + x)),
        (Some(a), Some(b)) => {
            if v.format().fraction_bits() >= 52 {
                // the midpoints to the neighbours are not representable in
                // f64 and would round back onto the atoms; the half-ulp
                // widths are exact, and φ is flat at that scale
                return Ok(std_normal_density(x) * (0.5 * (x - a) + 0.5 * (b - x)));
            }
            let lo = 0.5 * (a + x);
            let hi = 0.5 * (x + b);
            let mass = if hi - lo <= QUADRATURE_WIDTH {
                density_quadrature(lo, hi)
            } else if lo >= 0.0 {
                std_normal_upper_tail(lo) - std_normal_upper_tail(hi)
            } else {
                std_normal_cdf(hi) - std_normal_cdf(lo)
            };
            if mass < UNDERFLOW_FALLBACK {
                std_normal_density(x) * (hi - lo)
            } else {
                mass
            }
        }
    };
    Ok(mass)
}

/// Entropy by exhaustive enumeration of every atom of the format.
///
/// Only available below the enumeration cap; the result carries zero
/// standard error.
pub fn exact_entropy(fmt: FloatFormat) -> Result<EntropyEstimate> {
    let mut bits = 0.0;
    let mut count = 0u64;
    for v in enumerate_finite(fmt)? {
        let p = pmf(v)?;
        if p > 0.0 {
            bits -= p * p.log2();
        }
        count += 1;
    }
    Ok(EntropyEstimate {
        bits_per_dim: bits,
        std_error: 0.0,
        method: EstimateMethod::Exact,
        sample_count: count,
        format: fmt,
        seed: 0,
    })
}

/// Sum of the masses of every atom; 1 up to roundoff when the atoms
/// partition the real line.
pub fn pmf_total_mass(fmt: FloatFormat) -> Result<f64> {
    let mut total = 0.0;
    for v in enumerate_finite(fmt)? {
        total += pmf(v)?;
    }
    Ok(total)
}

fn chunk_stats(fmt: FloatFormat, seed: u64, chunk: u64, len: u64) -> (f64, f64) {
    // Substream per chunk: same seed, stream index = chunk index. The
    // normal variates come from the ziggurat sampler over ChaCha8.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..len {
        let z: f64 = StandardNormal.sample(&mut rng);
        let v = round_to_format(z, fmt);
        let p = pmf(v).expect("rounded sample is a finite atom");
        let l = -p.log2();
        sum += l;
        sum_sq += l * l;
    }
    (sum, sum_sq)
}

/// Monte Carlo entropy: draw `k` standard normal variates, round each into
/// the format, and average −log₂ of the atom mass.
///
/// Identical `(fmt, k, seed)` give a bit-identical estimate regardless of
/// thread count: the index space is split into fixed chunks, each chunk
/// has its own derived substream, and partial sums are reduced in chunk
/// order.
pub fn mc_entropy(fmt: FloatFormat, k: u64, seed: u64) -> Result<EntropyEstimate> {
    if k == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let chunks = k.div_ceil(MC_CHUNK);
    let partials: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = MC_CHUNK.min(k - c * MC_CHUNK);
            chunk_stats(fmt, seed, c, len)
        })
        .collect();
    // sequential fold in chunk order keeps the sum association fixed
    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |(a, b), &(s, q)| (a + s, b + q));
    let n = k as f64;
    let mean = sum / n;
    let var = if k > 1 {
        ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(EntropyEstimate {
        bits_per_dim: mean,
        std_error: (var / n).sqrt(),
        method: EstimateMethod::MonteCarlo,
        sample_count: k,
        format: fmt,
        seed,
    })
}

/// Total entropy of `n` independent coordinates: `n × H(Z)`.
pub fn noise_entropy(per_dim: &EntropyEstimate, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dimension count must be at least 1".into()));
    }
    Ok(per_dim.bits_per_dim * n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floatfmt::{BINARY16, BINARY32};
    use proptest::prelude::*;

    /// Independent oracle: composite Simpson quadrature of the normal
    /// density. Deliberately a different integration scheme from the
    /// Gauss–Legendre rule used inside `pmf`.
    fn simpson_mass(lo: f64, hi: f64, panels: usize) -> f64 {
        let h = (hi - lo) / panels as f64;
        let mut acc = std_normal_density(lo) + std_normal_density(hi);
        for i in 1..panels {
            let x = lo + i as f64 * h;
            acc += std_normal_density(x) * if i % 2 == 0 { 2.0 } else { 4.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn cdf_spot_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        // quadrature-derived reference for Φ(1.5)
        assert!((std_normal_cdf(1.5) - 0.9331927987311419).abs() < 1e-15);
        assert!((std_normal_cdf(-1.5) - (1.0 - 0.9331927987311419)).abs() < 1e-15);
    }

    #[test]
    fn cdf_tail_is_relatively_accurate() {
        // Q(8) reference from mpmath: 6.22096057427178e-16
        let q = std_normal_upper_tail(8.0);
        assert!((q / 6.220960574271786e-16 - 1.0).abs() < 1e-12);
        // Q(20) reference: 2.7536241186062337e-89
        let q = std_normal_upper_tail(20.0);
        assert!((q / 2.7536241186062337e-89 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_of_one_and_a_half_matches_quadrature_oracle() {
        let v = round_to_format(1.5, BINARY32);
        let lo = 0.5 * (v.next_down().unwrap().decode() + 1.5);
        let hi = 0.5 * (1.5 + v.next_up().unwrap().decode());
        let oracle = simpson_mass(lo, hi, 64);
        let got = pmf(v).unwrap();
        assert!(
            (got / oracle - 1.0).abs() <= 1e-10,
            "pmf {got:e} vs oracle {oracle:e}"
        );
        // the analytic scale: density times one ulp
        assert!((got / 1.544e-8 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn pmf_symmetry_binary16_exhaustive() {
        for v in enumerate_finite(BINARY16).unwrap() {
            if v.decode() <= 0.0 {
                continue;
            }
            let neg = round_to_format(-v.decode(), BINARY16);
            assert_eq!(pmf(v).unwrap(), pmf(neg).unwrap());
        }
    }

    #[test]
    fn pmf_rejects_non_finite_atoms() {
        let inf = FloatValue::from_bits(0x7C00, BINARY16).unwrap();
        assert!(pmf(inf).is_err());
    }

    #[test]
    fn binary16_masses_partition_unity() {
        let total = pmf_total_mass(BINARY16).unwrap();
        assert!((total - 1.0).abs() <= 1e-9, "total {total}");
    }

    #[test]
    fn exact_binary16_entropy_regression() {
        // frozen on first computation; exhaustive, deterministic
        let est = exact_entropy(BINARY16).unwrap();
        assert_eq!(est.method, EstimateMethod::Exact);
        assert_eq!(est.std_error, 0.0);
        assert!(
            (est.bits_per_dim - BINARY16_EXACT_ENTROPY).abs() < 1e-9,
            "got {}",
            est.bits_per_dim
        );
    }

    /// Exhaustively computed entropy of binary16-quantized N(0,1).
    pub(crate) const BINARY16_EXACT_ENTROPY: f64 = 13.463723041541868;

    #[test]
    fn mc_is_deterministic_and_chunking_invariant() {
        let a = mc_entropy(BINARY32, 200_000, 42).unwrap();
        let b = mc_entropy(BINARY32, 200_000, 42).unwrap();
        assert_eq!(a.bits_per_dim.to_bits(), b.bits_per_dim.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        // single-threaded pool must agree bit-for-bit
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(|| mc_entropy(BINARY32, 200_000, 42).unwrap());
        assert_eq!(a.bits_per_dim.to_bits(), c.bits_per_dim.to_bits());
    }

    #[test]
    fn mc_error_shrinks_with_sample_count() {
        let small = mc_entropy(BINARY32, 100_000, 7).unwrap();
        let large = mc_entropy(BINARY32, 200_000, 7).unwrap();
        let ratio = small.std_error / large.std_error;
        // expect about sqrt(2), within 20%
        assert!(
            (ratio / std::f64::consts::SQRT_2 - 1.0).abs() < 0.2,
            "ratio {ratio}"
        );
    }

    #[test]
    fn mc_agrees_with_exact_on_binary16() {
        let mc = mc_entropy(BINARY16, 400_000, 11).unwrap();
        let exact = exact_entropy(BINARY16).unwrap();
        let diff = (mc.bits_per_dim - exact.bits_per_dim).abs();
        assert!(diff <= 3.0 * mc.std_error, "diff {diff}, se {}", mc.std_error);
    }

    #[test]
    fn noise_entropy_scales_and_validates() {
        let est = EntropyEstimate {
            bits_per_dim: 26.55,
            std_error: 0.0,
            method: EstimateMethod::Exact,
            sample_count: 1,
            format: BINARY32,
            seed: 0,
        };
        assert_eq!(noise_entropy(&est, 1).unwrap(), 26.55);
        assert_eq!(noise_entropy(&est, 2).unwrap(), 53.1);
        assert!(noise_entropy(&est, 0).is_err());
    }

    proptest! {
        #[test]
        fn cdf_symmetry(x in -35.0f64..35.0) {
            let s = std_normal_cdf(x) + std_normal_cdf(-x);
            prop_assert!((s - 1.0).abs() < 1e-14);
        }

        #[test]
        fn pmf_is_a_probability(bits in 0u64..0x7C00) {
            let v = FloatValue::from_bits(bits, BINARY16).unwrap();
            let p = pmf(v).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
