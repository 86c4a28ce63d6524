//! Coefficient fields: exact rationals and `f64`.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A real coefficient type. `EXACT` types carry no rounding error.
pub trait Scalar:
    Num + Clone + Debug + PartialOrd + std::ops::Neg<Output = Self> + Send + Sync + 'static
{
    const EXACT: bool;

    fn to_f64(&self) -> f64;
    fn from_i64(v: i64) -> Self;
    /// Nearest representable value (exact for rationals).
    fn from_f64(v: f64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Unit roundoff of the field, zero when exact.
    fn unit_roundoff() -> f64 {
        if Self::EXACT {
            0.0
        } else {
            f64::EPSILON / 2.0
        }
    }

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("bad number {n}"))),
            Value::String(s) => parse_rational(s).map(|r| Scalar::to_f64(&r)),
            other => Err(Error::Parse(format!("expected number, got {other}"))),
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Self {
        <Rational as FromPrimitive>::from_f64(v).unwrap_or_else(Rational::zero)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_json(&self) -> Value {
        if self.denom().is_one() {
            Value::String(self.numer().to_string())
        } else {
            Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(<Rational as Scalar>::from_i64(i))
                } else {
                    let f = n
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("bad number {n}")))?;
                    Ok(<Rational as Scalar>::from_f64(f))
                }
            }
            other => Err(Error::Parse(format!("expected rational, got {other}"))),
        }
    }
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad()),
    }
}

/// Binomial coefficient as `f64` (exact up to 2^53).
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round_if_small()
}

/// Binomial coefficient in any scalar field (exact for rationals).
pub fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    if !T::EXACT {
        return T::from_f64(binomial_f64(n, k));
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_i64((n - i) as i64) / T::from_i64((i + 1) as i64);
    }
    acc
}

trait RoundIfSmall {
    fn round_if_small(self) -> Self;
}

impl RoundIfSmall for f64 {
    fn round_if_small(self) -> Self {
        if self < 9.0e15 {
            self.round()
        } else {
            self
        }
    }
}

/// Falling factorial `n (n-1) ... (n-k+1)` as an exact integer rational.
pub fn falling<T: Scalar>(n: usize, k: usize) -> T {
    let mut acc = T::one();
    for i in 0..k {
        if i >= n {
            return T::zero();
        }
        acc = acc * T::from_i64((n - i) as i64);
    }
    acc
}

/// Parses a rational given as float, `"p/q"` string or integer.
pub fn rational_from_f64(v: f64) -> Rational {
    <Rational as Scalar>::from_f64(v)
}
