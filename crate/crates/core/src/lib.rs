//! Quantified noise requirements for generative samplers.
//!
//! This crate answers a concrete question: when a sampler draws Gaussian
//! noise in a finite floating-point format, how much information does each
//! coordinate actually carry, and how many coordinates are needed to cover
//! a target source? It provides:
//!
//! - [`floatfmt`]: a bit-exact model of IEEE-754-style binary formats
//!   (encode, decode, neighbor enumeration, round-to-format);
//! - [`gauss_entropy`]: the discrete probability mass function of a standard
//!   normal quantized to such a format, with exact and Monte Carlo entropy;
//! - [`tradeoff`]: the divergence-entropy function d(ε) over finite
//!   alphabets, solved by a penalty convex-concave procedure, plus a
//!   brute-force oracle for small alphabets;
//! - [`bounds`]: conversion of lossless-compression codelengths and
//!   per-dimension entropies into noise-dimension bounds;
//! - [`ingest`]: size statistics of already-compressed corpora.
//!
//! All entropies and divergences are in bits.

pub mod bounds;
pub mod constants;
pub mod floatfmt;
pub mod gauss_entropy;
pub mod ingest;
pub mod tradeoff;

mod error;

pub use error::Error;
pub use floatfmt::{FloatFormat, FloatValue};
pub use gauss_entropy::{EntropyEstimate, EstimateMethod};
pub use tradeoff::{DiscreteDistribution, DivergenceKind, SolverConfig, TradeoffCurve, TradeoffPoint};
pub use bounds::DimensionBound;
pub use ingest::SizeStats;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
