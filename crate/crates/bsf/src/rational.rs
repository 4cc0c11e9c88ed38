//! Exact rational scalars used everywhere outside the Monte Carlo sampler.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The exact scalar type of the workbench.
pub type Rat = BigRational;

/// Rational from an integer pair; panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

/// n! as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// base^exp for rational base and non-negative integer exponent.
pub fn rat_pow(base: &Rat, exp: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Parses "p", "-p" or "p/q" with decimal integer parts.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator {num_str:?}")))?;
    let den: BigInt = den_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator {den_str:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

/// Renders as "p" or "p/q" in lowest terms.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal-string pair (numerator, denominator) for JSON payloads.
pub fn rat_to_string_pair(r: &Rat) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}

/// Nearest f64, used only where a report leaves exact arithmetic.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let sign = if r.numer().sign() == Sign::Minus {
            -1.0
        } else {
            1.0
        };
        sign * f64::INFINITY
    })
}

/// Exact division check: returns num/den if the quotient is an integer.
pub fn exact_int_div(num: &BigInt, den: &BigInt) -> Result<BigInt> {
    if den.is_zero() {
        return Err(Error::Internal("division by zero".into()));
    }
    let (q, r) = num::Integer::div_rem(num, den);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::Internal(format!(
            "{num} is not divisible by {den}"
        )))
    }
}
