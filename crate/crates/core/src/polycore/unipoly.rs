use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Relative rounding bound `γ_m = m u / (1 - m u)`.
pub fn gamma(m: usize) -> f64 {
    let mu = m as f64 * f64::EPSILON / 2.0;
    mu / (1.0 - mu)
}

/// A complex value together with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEval {
    pub value: Complex64,
    pub bound: f64,
}

/// Dense univariate polynomial; `coeffs[k]` multiplies `x^k`.
///
/// Float instances carry a per-coefficient absolute error bound in `err`,
/// propagated through arithmetic. Exact instances keep `err` at zero.
#[derive(Clone, PartialEq)]
pub struct UniPoly<T: Scalar = f64> {
    coeffs: Vec<T>,
    err: Vec<f64>,
}

impl<T: Scalar> fmt::Debug for UniPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UniPoly")
            .field("coeffs", &self.coeffs)
            .field("err", &self.err)
            .finish()
    }
}

impl<T: Scalar> UniPoly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let err = vec![0.0; coeffs.len()];
        Self::with_errors(coeffs, err)
    }

    /// Builds a polynomial whose coefficients are known up to `err[k]`.
    pub fn with_errors(coeffs: Vec<T>, mut err: Vec<f64>) -> Self {
        err.resize(coeffs.len(), 0.0);
        let mut p = Self { coeffs, err };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new(), err: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c x^k`.
    pub fn monomial(k: usize, c: T) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn x() -> Self {
        Self::monomial(1, T::one())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[T]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            &acc * &Self::new(vec![-r.clone(), T::one()])
        })
    }

    fn trim(&mut self) {
        while let Some(last) = self.coeffs.last() {
            if last.is_zero() {
                self.coeffs.pop();
                self.err.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn errors(&self) -> &[f64] {
        &self.err
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Multiplicity of the root at zero.
    pub fn zero_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Widens every coefficient error bound by `extra`.
    pub fn add_error(&mut self, extra: &[f64]) {
        for (e, x) in self.err.iter_mut().zip(extra) {
            *e += x;
        }
    }

    pub fn max_error(&self) -> f64 {
        self.err.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Horner evaluation at a complex point with a forward error bound.
    pub fn eval_complex(&self, z: Complex64) -> ComplexEval {
        let n = self.coeffs.len();
        let mut value = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut err_sum = 0.0;
        let r = z.norm();
        for (c, e) in self.coeffs.iter().rev().zip(self.err.iter().rev()) {
            let cf = c.to_f64();
            value = value * z + cf;
            abs_sum = abs_sum * r + cf.abs();
            err_sum = err_sum * r + e;
        }
        let conversion = if T::EXACT { f64::EPSILON / 2.0 } else { 0.0 };
        ComplexEval {
            value,
            bound: (gamma(4 * n + 2) + conversion) * abs_sum + err_sum,
        }
    }

    /// Evaluation through the generic point interface (length-1 point).
    pub fn eval_point(&self, point: &[Complex64]) -> Result<ComplexEval> {
        if point.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: point.len() });
        }
        Ok(self.eval_complex(point[0]))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let u = T::unit_roundoff();
        let mut coeffs = Vec::with_capacity(self.coeffs.len() - 1);
        let mut err = Vec::with_capacity(self.coeffs.len() - 1);
        for k in 1..self.coeffs.len() {
            let c = self.coeffs[k].clone() * T::from_i64(k as i64);
            err.push(k as f64 * self.err[k] + u * c.to_f64().abs());
            coeffs.push(c);
        }
        Self::with_errors(coeffs, err)
    }

    pub fn nth_derivative(&self, m: usize) -> Self {
        (0..m).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: &T) -> Self {
        let u = T::unit_roundoff();
        let sf = s.to_f64().abs();
        let coeffs: Vec<T> = self.coeffs.iter().map(|c| c.clone() * s.clone()).collect();
        let err = self
            .err
            .iter()
            .zip(&coeffs)
            .map(|(e, c)| sf * e + u * c.to_f64().abs())
            .collect();
        Self::with_errors(coeffs, err)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Substitutes `x -> a x + b`.
    pub fn compose_affine(&self, a: &T, b: &T) -> Self {
        let lin = Self::new(vec![b.clone(), a.clone()]);
        let mut acc = Self::zero();
        for k in (0..self.coeffs.len()).rev() {
            let c = Self::with_errors(vec![self.coeffs[k].clone()], vec![self.err[k]]);
            acc = &(&acc * &lin) + &c;
        }
        acc
    }

    /// Coefficients of `p(x + s)`, the Taylor expansion at `s`.
    pub fn taylor_shift(&self, s: &T) -> Self {
        self.compose_affine(&T::one(), s)
    }

    /// Polynomial division; returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let q = rem[k].clone() / lead.clone();
            if q.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + j] = rem[k - dd + j].clone() - q.clone() * dc.clone();
            }
            quot[k - dd] = q;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Float image, with conversion rounding folded into the error bounds.
    pub fn to_f64(&self) -> UniPoly<f64> {
        let u = f64::EPSILON / 2.0;
        let coeffs: Vec<f64> = self.coeffs.iter().map(Scalar::to_f64).collect();
        let err = self
            .err
            .iter()
            .zip(&coeffs)
            .map(|(e, c)| e + if T::EXACT { u * c.abs() } else { 0.0 })
            .collect();
        UniPoly::with_errors(coeffs, err)
    }
}

impl UniPoly<f64> {
    /// Rounds a float polynomial to exact rationals (error bounds dropped).
    pub fn to_rational(&self) -> UniPoly<Rational> {
        UniPoly::new(self.coeffs.iter().map(|&c| <Rational as Scalar>::from_f64(c)).collect())
    }

    /// Drops top coefficients below `rel * max|a_k|`; returns their total
    /// magnitude, which callers fold into a tail bound.
    pub fn trim_relative(&mut self, rel: f64) -> f64 {
        let max = self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let mut dropped = 0.0;
        while let Some(&last) = self.coeffs.last() {
            if last.abs() < rel * max || !last.is_finite() {
                dropped += last.abs() + self.err.last().copied().unwrap_or(0.0);
                self.coeffs.pop();
                self.err.pop();
            } else {
                break;
            }
        }
        dropped
    }
}

impl<T: Scalar> Add for &UniPoly<T> {
    type Output = UniPoly<T>;

    fn add(self, rhs: Self) -> UniPoly<T> {
        let u = T::unit_roundoff();
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        let mut err = Vec::with_capacity(n);
        for k in 0..n {
            let c = self.coeff(k) + rhs.coeff(k);
            let e = self.err.get(k).copied().unwrap_or(0.0)
                + rhs.err.get(k).copied().unwrap_or(0.0)
                + u * c.to_f64().abs();
            coeffs.push(c);
            err.push(e);
        }
        UniPoly::with_errors(coeffs, err)
    }
}

impl<T: Scalar> Neg for &UniPoly<T> {
    type Output = UniPoly<T>;

    fn neg(self) -> UniPoly<T> {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            err: self.err.clone(),
        }
    }
}

impl<T: Scalar> Sub for &UniPoly<T> {
    type Output = UniPoly<T>;

    fn sub(self, rhs: Self) -> UniPoly<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &UniPoly<T> {
    type Output = UniPoly<T>;

    fn mul(self, rhs: Self) -> UniPoly<T> {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let n = self.coeffs.len() + rhs.coeffs.len() - 1;
        let mut coeffs = vec![T::zero(); n];
        let mut abs = vec![0.0; n];
        let mut err = vec![0.0; n];
        for (i, (a, ea)) in self.coeffs.iter().zip(&self.err).enumerate() {
            let af = a.to_f64().abs();
            for (j, (b, eb)) in rhs.coeffs.iter().zip(&rhs.err).enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
                let bf = b.to_f64().abs();
                abs[i + j] += af * bf;
                err[i + j] += ea * bf + af * eb + ea * eb;
            }
        }
        if !T::EXACT {
            let g = gamma(self.coeffs.len().min(rhs.coeffs.len()) + 1);
            for (e, a) in err.iter_mut().zip(&abs) {
                *e += g * a;
            }
        }
        UniPoly::with_errors(coeffs, err)
    }
}

impl<T: Scalar> Serialize for UniPoly<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let values: Vec<Value> = self.coeffs.iter().map(Scalar::to_json).collect();
        values.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for UniPoly<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<Value>::deserialize(d)?;
        let coeffs = values
            .iter()
            .map(T::from_json)
            .collect::<Result<Vec<T>>>()
            .map_err(D::Error::custom)?;
        Ok(UniPoly::new(coeffs))
    }
}
