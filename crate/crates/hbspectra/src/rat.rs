//! Exact rational scalars: construction, parsing, and formatting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as an exact rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Uniform probability vector of length `n`.
pub fn uniform_probs(n: usize) -> Vec<Rat> {
    vec![Rat::new(BigInt::one(), BigInt::from(n)); n]
}

/// Parses `p/q`, integer, or decimal strings into exact rationals.
///
/// Decimals are converted exactly: `0.25` becomes `1/4`. Exponent notation
/// is rejected so that no silent precision decision is ever made.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = |_| Error::Parse(format!("cannot parse `{s}` as a rational"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(bad)?;
        let d: BigInt = den.trim().parse().map_err(bad)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (sign, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if !frac_part.chars().all(|c| c.is_ascii_digit()) || frac_part.is_empty() {
            return Err(Error::Parse(format!("cannot parse `{s}` as a rational")));
        }
        let int_val: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits.parse().map_err(bad)?
        };
        let frac_val: BigInt = frac_part.parse().map_err(bad)?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let numer = int_val * &scale + frac_val;
        return Ok(Rat::new(BigInt::from(sign) * numer, scale));
    }
    let n: BigInt = s.parse().map_err(bad)?;
    Ok(Rat::from_integer(n))
}

/// Renders a rational as `p/q`, or `p` for integers. Inverse of
/// [`parse_rational`] on its own output.
pub fn format_rational(r: &Rat) -> String {
    r.to_string()
}

/// Renders a slice of rationals as `a, b, c`.
pub fn format_rationals(v: &[Rat]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(", ")
}

/// `base^exp` by repeated squaring.
pub fn rat_pow(base: &Rat, exp: usize) -> Rat {
    num_traits::pow(base.clone(), exp)
}

/// Nearest `f64` to an exact rational.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// True iff every entry is nonnegative.
pub fn all_nonnegative(v: &[Rat]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

/// Exact sum of a slice of rationals.
pub fn rat_sum(v: &[Rat]) -> Rat {
    v.iter().fold(Rat::zero(), |acc, x| acc + x)
}
