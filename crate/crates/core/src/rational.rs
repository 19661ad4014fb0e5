//! Helpers around arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses a decimal integer (`"-7"`) or a fraction (`"3/4"`).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let parse_int = |s: &str| {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not a rational number: {text:?}")))
    };
    match text.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(text)?)),
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise (lowest terms,
/// positive denominator).
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn from_f64_exact(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Rounds a finite nonzero float to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: u32) -> Rational {
    if x == 0.0 || !x.is_finite() {
        return Rational::zero();
    }
    let exponent = x.abs().log10().floor() as i32;
    let shift = digits as i32 - 1 - exponent;
    let ten = BigInt::from(10);
    if shift >= 0 {
        let scale = num_traits::pow(ten, shift as usize);
        let scaled = (x * 10f64.powi(shift)).round();
        Rational::new(BigInt::from(scaled as i128), scale)
    } else {
        let scale = num_traits::pow(ten, (-shift) as usize);
        let scaled = (x / 10f64.powi(-shift)).round();
        Rational::from_integer(BigInt::from(scaled as i128) * scale)
    }
}

/// Exact real `n`-th root of a rational, when it is itself rational.
/// Even roots of negative values have no real root and yield `None`; for even
/// `n` the positive root is returned.
pub fn exact_root(value: &Rational, n: u32) -> Option<Rational> {
    if n == 0 {
        return None;
    }
    if n.is_multiple_of(2) && value.is_negative() {
        return None;
    }
    let root_int = |v: &BigInt| {
        let r = v.nth_root(n);
        (num_traits::pow(r.clone(), n as usize) == *v).then_some(r)
    };
    Some(Rational::new(root_int(value.numer())?, root_int(value.denom())?))
}
