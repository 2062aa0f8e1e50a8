//! Scalars: exact rationals, and the tolerance that governs float mode.

use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Default float-mode tolerance. Every float comparison in the crate derives
/// from the `eps` carried by [`Mode::Float`], which defaults to this value.
pub const DEFAULT_EPS: f64 = 1e-8;

/// Arithmetic mode of an analysis run. Never mixed within one computation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Mode {
    #[default]
    Exact,
    Float {
        eps: f64,
    },
}

impl Mode {
    pub fn float() -> Self {
        Mode::Float { eps: DEFAULT_EPS }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Mode::Exact)
    }

    /// The float tolerance, or an error in exact mode.
    pub fn require_float(self) -> Result<f64> {
        match self {
            Mode::Exact => Err(Error::UnsupportedInExactMode),
            Mode::Float { eps } => Ok(eps),
        }
    }
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `-12`, `3/4`, `-3/-4` or a finite decimal such as `0.125`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let malformed = || Error::MalformedScalar(text.to_string());
    if s.is_empty() {
        return Err(malformed());
    }
    if let Some((p, q)) = s.split_once('/') {
        let numer = parse_integer(p).ok_or_else(malformed)?;
        let denom = parse_integer(q).ok_or_else(malformed)?;
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        return Ok(Rational::new(numer, denom));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits_ok = !frac.is_empty() && frac.bytes().all(|b| b.is_ascii_digit());
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !digits_ok || !(whole_digits.is_empty() || whole_digits.bytes().all(|b| b.is_ascii_digit())) {
            return Err(malformed());
        }
        let mut joined = String::from(whole_digits);
        joined.push_str(frac);
        let magnitude = parse_integer(&joined).ok_or_else(malformed)?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let value = Rational::new(magnitude, scale);
        return Ok(if negative { -value } else { value });
    }
    parse_integer(s).map(Rational::from_integer).ok_or_else(malformed)
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse::<BigInt>().ok()
}

/// `p/q`, or just `p` for integers.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Out of f64 range; fall back to ratio of approximations.
        let n = value.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = value.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact value of a finite float (always a dyadic rational).
pub fn from_f64_exact(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

/// The rational with the smallest denominator in `[value - tol, value + tol]`.
///
/// Float inputs are snapped with this rule so that a value like `0.6` becomes
/// `3/5` rather than its binary expansion.
pub fn simplest_within(value: f64, tol: f64) -> Option<Rational> {
    if !value.is_finite() || tol.is_nan() || tol < 0.0 {
        return None;
    }
    let lo = Rational::from_float(value - tol)?;
    let hi = Rational::from_float(value + tol)?;
    Some(simplest_between(&lo, &hi))
}

/// Simplest rational in the closed interval `[lo, hi]` (Stern-Brocot descent).
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    if lo > hi {
        return simplest_between(hi, lo);
    }
    if !lo.is_positive() && !hi.is_negative() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: &Rational, hi: &Rational) -> Rational {
    let floor = lo.floor();
    if &floor == lo {
        return floor;
    }
    if floor.clone() + Rational::one() <= *hi {
        return floor + Rational::one();
    }
    // Same integer part: recurse on the reciprocals of the fractional parts.
    let inner = simplest_positive(&(hi.clone() - &floor).recip(), &(lo.clone() - &floor).recip());
    floor + inner.recip()
}

/// Exact square root of a non-negative rational, when it is rational.
pub fn exact_sqrt(value: &Rational) -> Option<Rational> {
    if value.is_negative() {
        return None;
    }
    let n = value.numer().sqrt();
    let d = value.denom().sqrt();
    if &(&n * &n) == value.numer() && &(&d * &d) == value.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub(crate) fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
