//! Exact rational scalar used throughout the probability engines.
//!
//! Probabilities and expectations are kept as arbitrary-precision rationals
//! so that identities claimed to be exact can be asserted with `==` instead
//! of a tolerance. Floats appear only at reporting boundaries; an `f64` that
//! does enter (every finite `f64` is a dyadic rational) converts losslessly.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Lossless conversion from a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn is_unit_interval(r: &Rational) -> bool {
    r.abs() <= one()
}

/// Parses `"num/den"`, a plain integer, or a decimal float literal.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("invalid numerator in {s:?}"))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("invalid denominator in {s:?}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Rational::new(num, den))
    } else if let Ok(n) = s.parse::<BigInt>() {
        Ok(Rational::from_integer(n))
    } else if let Ok(x) = s.parse::<f64>() {
        rational_from_f64(x).ok_or_else(|| format!("non-finite value {s:?}"))
    } else {
        Err(format!("cannot parse rational from {s:?}"))
    }
}

/// Renders small rationals as `num/den`, falling back to a float rendering
/// for dyadic values with huge denominators (e.g. those converted from f64).
pub fn format_rational(r: &Rational) -> String {
    let den = r.denom();
    if den.bits() <= 32 {
        if r.is_integer() {
            format!("{}", r.numer())
        } else {
            format!("{}/{}", r.numer(), den)
        }
    } else {
        format!("{}", rational_to_f64(r))
    }
}
