//! Bit-exact model of IEEE-754-style binary floating-point formats.
//!
//! A [`FloatFormat`] is described by its exponent and fraction widths; the
//! sign bit is implicit. Values are simulated on top of `f64`, never assumed
//! native, which restricts supported formats to at most the width of
//! binary64 (11 exponent bits, 52 fraction bits). Every finite value of such
//! a format is exactly representable as an `f64`, so decode is exact and
//! round-to-format can be carried out with integer-exact scaling.
//!
//! The two zeros of a format are merged into a single canonical atom with
//! all-zero bits: `round_to_format` never produces −0, and neighbor
//! traversal skips it.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Widest total format width accepted by [`enumerate_finite`].
pub const ENUMERATION_CAP_BITS: u32 = 32;

/// A parametric binary floating-point format (sign bit implicit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FloatFormat {
    exponent_bits: u32,
    fraction_bits: u32,
}

/// IEEE-754 binary16 (half precision).
pub const BINARY16: FloatFormat = FloatFormat { exponent_bits: 5, fraction_bits: 10 };
/// IEEE-754 binary32 (single precision).
pub const BINARY32: FloatFormat = FloatFormat { exponent_bits: 8, fraction_bits: 23 };
/// IEEE-754 binary64 (double precision).
pub const BINARY64: FloatFormat = FloatFormat { exponent_bits: 11, fraction_bits: 52 };

impl FloatFormat {
    /// Builds a format with the given widths.
    ///
    /// Requires at least 2 exponent bits and 1 fraction bit, and no wider
    /// than binary64 in either field (values are simulated on `f64`).
    pub fn new(exponent_bits: u32, fraction_bits: u32) -> Result<Self> {
        if exponent_bits < 2 {
            return Err(Error::InvalidFormat(format!(
                "need at least 2 exponent bits, got {exponent_bits}"
            )));
        }
        if fraction_bits < 1 {
            return Err(Error::InvalidFormat(format!(
                "need at least 1 fraction bit, got {fraction_bits}"
            )));
        }
        if exponent_bits > 11 || fraction_bits > 52 {
            return Err(Error::InvalidFormat(format!(
                "format ({exponent_bits}, {fraction_bits}) exceeds binary64 field widths"
            )));
        }
        Ok(Self { exponent_bits, fraction_bits })
    }

    pub fn exponent_bits(&self) -> u32 {
        self.exponent_bits
    }

    pub fn fraction_bits(&self) -> u32 {
        self.fraction_bits
    }

    /// Total width in bits, including the sign bit.
    pub fn total_bits(&self) -> u32 {
        1 + self.exponent_bits + self.fraction_bits
    }

    /// Exponent bias, `2^(exponent_bits-1) - 1`.
    pub fn bias(&self) -> i32 {
        (1i32 << (self.exponent_bits - 1)) - 1
    }

    /// Smallest normal exponent (unbiased).
    fn min_exponent(&self) -> i32 {
        1 - self.bias()
    }

    /// Largest normal exponent (unbiased).
    fn max_exponent(&self) -> i32 {
        self.bias()
    }

    fn fraction_mask(&self) -> u64 {
        (1u64 << self.fraction_bits) - 1
    }

    fn exponent_field_max(&self) -> u64 {
        (1u64 << self.exponent_bits) - 1
    }

    fn sign_mask(&self) -> u64 {
        1u64 << (self.exponent_bits + self.fraction_bits)
    }

    /// Magnitude bits of the largest finite value (exponent one below the
    /// reserved field, fraction all ones).
    fn max_finite_magnitude(&self) -> u64 {
        ((self.exponent_field_max() - 1) << self.fraction_bits) | self.fraction_mask()
    }

    /// The largest finite value of the format, as a real number.
    pub fn max_finite(&self) -> f64 {
        FloatValue { bits: self.max_finite_magnitude(), format: *self }.decode()
    }

    /// The canonical zero atom.
    pub fn zero(&self) -> FloatValue {
        FloatValue { bits: 0, format: *self }
    }

    /// Parses `"fp16"`, `"fp32"`, `"fp64"`, or a custom `"E:M"` pair.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec {
            "fp16" | "binary16" => Ok(BINARY16),
            "fp32" | "binary32" => Ok(BINARY32),
            "fp64" | "binary64" => Ok(BINARY64),
            other => {
                let (e, m) = other.split_once(':').ok_or_else(|| {
                    Error::InvalidFormat(format!(
                        "expected fp16, fp32, fp64, or E:M, got {other:?}"
                    ))
                })?;
                let e: u32 = e.trim().parse().map_err(|_| {
                    Error::InvalidFormat(format!("bad exponent width {e:?}"))
                })?;
                let m: u32 = m.trim().parse().map_err(|_| {
                    Error::InvalidFormat(format!("bad fraction width {m:?}"))
                })?;
                Self::new(e, m)
            }
        }
    }
}

impl std::fmt::Display for FloatFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.exponent_bits, self.fraction_bits) {
            (5, 10) => write!(f, "fp16"),
            (8, 23) => write!(f, "fp32"),
            (11, 52) => write!(f, "fp64"),
            (e, m) => write!(f, "{e}:{m}"),
        }
    }
}

/// One bit pattern of a [`FloatFormat`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FloatValue {
    bits: u64,
    format: FloatFormat,
}

/// Exact power of two as `f64`, valid for any exponent reachable while
/// decoding formats no wider than binary64.
fn exp2i(k: i32) -> f64 {
    if (-1022..=1023).contains(&k) {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else if k > 1023 {
        f64::INFINITY
    } else {
        // Split so each factor stays normal; the product is exact whenever
        // the true value is representable (possibly subnormal).
        f64::from_bits(1u64 << 52) * exp2i(k + 1022)
    }
}

/// floor(log2(a)) for finite positive `a`, via the bit pattern.
fn ilogb(a: f64) -> i32 {
    debug_assert!(a > 0.0 && a.is_finite());
    let ef = ((a.to_bits() >> 52) & 0x7ff) as i32;
    if ef != 0 {
        ef - 1023
    } else {
        // f64 subnormal: renormalize first.
        ilogb(a * exp2i(64)) - 64
    }
}

impl FloatValue {
    /// Wraps raw bits; errors if they do not fit the format width.
    pub fn from_bits(bits: u64, format: FloatFormat) -> Result<Self> {
        let width = format.total_bits();
        if width < 64 && bits >> width != 0 {
            return Err(Error::Domain(format!(
                "bit pattern {bits:#x} does not fit a {width}-bit format"
            )));
        }
        Ok(Self { bits, format })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn format(&self) -> FloatFormat {
        self.format
    }

    fn sign(&self) -> bool {
        self.bits & self.format.sign_mask() != 0
    }

    fn magnitude(&self) -> u64 {
        self.bits & !self.format.sign_mask()
    }

    /// True for every bit pattern outside the reserved exponent.
    pub fn is_finite(&self) -> bool {
        (self.magnitude() >> self.format.fraction_bits) != self.format.exponent_field_max()
    }

    /// Decodes to the extended real line: finite values exactly, reserved
    /// exponent as ±∞ (zero fraction) or NaN.
    pub fn decode(&self) -> f64 {
        let fmt = self.format;
        let frac = self.bits & fmt.fraction_mask();
        let efield = (self.bits >> fmt.fraction_bits) & fmt.exponent_field_max();
        let sign = if self.sign() { -1.0 } else { 1.0 };
        if efield == fmt.exponent_field_max() {
            return if frac == 0 { sign * f64::INFINITY } else { f64::NAN };
        }
        let m = fmt.fraction_bits as i32;
        if efield == 0 {
            // subnormal: f * 2^(1 - bias - m)
            sign * (frac as f64) * exp2i(fmt.min_exponent() - m)
        } else {
            let sig = (1u64 << fmt.fraction_bits) | frac;
            sign * (sig as f64) * exp2i(efield as i32 - fmt.bias() - m)
        }
    }

    /// Adjacent representable finite value above, in real order.
    ///
    /// Returns `None` at the positive range end (the +∞ boundary). The
    /// merged zero atom is honored: the step from −min_subnormal lands on
    /// canonical +0, and the step from +0 lands on +min_subnormal.
    pub fn next_up(&self) -> Option<FloatValue> {
        debug_assert!(self.is_finite());
        let fmt = self.format;
        let mag = self.magnitude();
        if self.sign() && mag != 0 {
            // negative, move toward zero
            let bits = if mag == 1 { 0 } else { fmt.sign_mask() | (mag - 1) };
            Some(FloatValue { bits, format: fmt })
        } else if mag == fmt.max_finite_magnitude() {
            None
        } else {
            Some(FloatValue { bits: mag + 1, format: fmt })
        }
    }

    /// Adjacent representable finite value below; `None` at the −∞ boundary.
    pub fn next_down(&self) -> Option<FloatValue> {
        debug_assert!(self.is_finite());
        let fmt = self.format;
        let mag = self.magnitude();
        if self.sign() || mag == 0 {
            if mag == fmt.max_finite_magnitude() {
                None
            } else {
                Some(FloatValue { bits: fmt.sign_mask() | (mag + 1), format: fmt })
            }
        } else {
            // positive, move toward zero; 0 stays canonical (+0 bits)
            Some(FloatValue { bits: mag - 1, format: fmt })
        }
    }
}

/// Rounds a finite real (carried as `f64`) into the format: round-to-nearest
/// with ties to even. Magnitudes beyond the largest finite value clamp to
/// the largest finite value; zero results are canonical +0.
///
/// Panics on NaN input.
pub fn round_to_format(x: f64, fmt: FloatFormat) -> FloatValue {
    assert!(!x.is_nan(), "cannot round NaN into a format");
    if x == 0.0 {
        return fmt.zero();
    }
    let sign_bit = if x < 0.0 { fmt.sign_mask() } else { 0 };
    let a = x.abs();
    let max_mag = fmt.max_finite_magnitude();
    if a.is_infinite() {
        return FloatValue { bits: sign_bit | max_mag, format: fmt };
    }
    let m = fmt.fraction_bits as i32;
    let emin = fmt.min_exponent();
    let emax = fmt.max_exponent();
    let e = ilogb(a);

    let bits = if e < emin {
        // subnormal range: scale so one unit equals one subnormal step.
        // If rounding carries to 2^m the pattern is exactly the smallest
        // normal, so the raw integer already is the magnitude field.
        // two exact power-of-two steps; the combined factor can exceed
        // the f64 exponent range for binary64 subnormals
        let scaled = (a * exp2i(-emin)) * exp2i(m);
        let r = scaled.round_ties_even() as u64;
        if r == 0 {
            return fmt.zero();
        }
        r
    } else if e > emax {
        max_mag
    } else {
        let scaled = (a * exp2i(-e)) * exp2i(m); // exact, in [2^m, 2^(m+1))
        let mut r = scaled.round_ties_even() as u64;
        let mut ef = (e + fmt.bias()) as u64;
        if r == 1u64 << (m + 1) {
            r >>= 1;
            ef += 1;
        }
        if ef >= fmt.exponent_field_max() {
            max_mag
        } else {
            (ef << fmt.fraction_bits) | (r & fmt.fraction_mask())
        }
    };
    FloatValue { bits: sign_bit | bits, format: fmt }
}

/// All finite values of the format in strictly increasing real order, with
/// ±0 merged into the single canonical zero atom.
///
/// Refuses formats wider than [`ENUMERATION_CAP_BITS`] total bits.
pub fn enumerate_finite(fmt: FloatFormat) -> Result<impl Iterator<Item = FloatValue>> {
    let width = fmt.total_bits();
    if width > ENUMERATION_CAP_BITS {
        return Err(Error::EnumerationCapExceeded { width, cap: ENUMERATION_CAP_BITS });
    }
    let first = FloatValue { bits: fmt.sign_mask() | fmt.max_finite_magnitude(), format: fmt };
    Ok(std::iter::successors(Some(first), |v| v.next_up()))
}

/// Number of atoms yielded by [`enumerate_finite`]: two signs of every
/// finite nonzero magnitude plus the merged zero.
pub fn finite_atom_count(fmt: FloatFormat) -> Result<u64> {
    let width = fmt.total_bits();
    if width > ENUMERATION_CAP_BITS {
        return Err(Error::EnumerationCapExceeded { width, cap: ENUMERATION_CAP_BITS });
    }
    Ok(2 * fmt.max_finite_magnitude() + 1)
}
