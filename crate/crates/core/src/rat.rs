//! Exact rational numbers.
//!
//! Every quantity in the solver (valuations, budgets, bid levels, multipliers,
//! prices, payments) is a [`Rat`]. `BigRational` keeps fractions normalized
//! with a positive denominator, so equality is structural and `Display`
//! already yields the lowest-terms `p/q` form (`"3"` for integers).

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} as an exact rational: {reason}")]
pub struct ParseRatError {
    pub input: String,
    pub reason: &'static str,
}

impl ParseRatError {
    fn new(input: &str, reason: &'static str) -> Self {
        ParseRatError {
            input: input.to_string(),
            reason,
        }
    }
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Parses an integer (`"12"`), a decimal (`"-0.125"`, `"3."`, `".5"`) or a
/// fraction (`"7/3"`). Whitespace around the value is ignored.
pub fn parse_rat(input: &str) -> Result<Rat, ParseRatError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ParseRatError::new(input, "empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num.trim()).ok_or_else(|| ParseRatError::new(input, "bad numerator"))?;
        let den =
            parse_int(den.trim()).ok_or_else(|| ParseRatError::new(input, "bad denominator"))?;
        if den.is_zero() {
            return Err(ParseRatError::new(input, "zero denominator"));
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((whole, fraction)) = s.split_once('.') {
        let (negative, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if whole.is_empty() && fraction.is_empty() {
            return Err(ParseRatError::new(input, "no digits"));
        }
        let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(whole) || !all_digits(fraction) {
            return Err(ParseRatError::new(input, "bad decimal"));
        }
        let digits = format!("{whole}{fraction}");
        let mantissa = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|_| ParseRatError::new(input, "bad decimal"))?;
        let scale = num_traits::pow(BigInt::from(10), fraction.len());
        let value = Rat::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    parse_int(s)
        .map(Rat::from_integer)
        .ok_or_else(|| ParseRatError::new(input, "not an integer, decimal or p/q"))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).ok()
}

/// Reads a JSON integer or string. Non-integer JSON numbers are rejected
/// because their binary representation is already inexact.
pub fn rat_from_json(value: &Value) -> Result<Rat, ParseRatError> {
    match value {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(int(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Rat::from_integer(BigInt::from(u)))
            } else {
                Err(ParseRatError::new(
                    &n.to_string(),
                    "non-integer JSON number; pass it as a string",
                ))
            }
        }
        other => Err(ParseRatError::new(&other.to_string(), "expected a number or string")),
    }
}

pub fn rat_to_json(value: &Rat) -> Value {
    Value::String(value.to_string())
}

pub fn is_positive(value: &Rat) -> bool {
    value.is_positive()
}
