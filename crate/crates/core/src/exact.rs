//! Exact rational helpers shared by the inequality checks.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi<T: Into<BigInt>>(n: T) -> Q {
    Q::from_integer(n.into())
}

pub fn qu(n: &BigUint) -> Q {
    Q::from_integer(BigInt::from(n.clone()))
}

/// Parses `"3"`, `"3/4"` or a finite decimal such as `"0.125"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let v = Q::new(n, den);
        return Ok(if neg { -v } else { v });
    }
    s.parse::<Q>()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // ratio of huge integers; scale both sides down
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

/// Ratio `lhs / rhs` as a float, `+inf` for a zero right-hand side.
pub fn margin(lhs: &Q, rhs: &Q) -> f64 {
    if rhs.is_zero() {
        if lhs.is_zero() {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        to_f64(&(lhs / rhs))
    }
}

pub fn one() -> Q {
    Q::one()
}

/// Rational approximation of `x` from below with denominator `den`.
pub fn floor_with_den(x: &Q, den: u64) -> Q {
    let scaled = (x * qi(den)).floor().to_integer();
    Q::new(scaled, BigInt::from(den))
}
