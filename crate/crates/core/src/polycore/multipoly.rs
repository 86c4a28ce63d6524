use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::unipoly::{gamma, ComplexEval, UniPoly};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse multivariate polynomial `Σ c_α x^α` in a fixed number of variables.
///
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly<T: Scalar = f64> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

/// `constant + Σ_j linear[j] x_j`, the image of one variable under a substitution.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm<T: Scalar = f64> {
    pub constant: T,
    pub linear: Vec<T>,
}

impl<T: Scalar> AffineForm<T> {
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut linear = vec![T::zero(); nvars];
        linear[i] = T::one();
        Self { constant: T::zero(), linear }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self { constant: c, linear: vec![T::zero(); nvars] }
    }

    fn to_poly(&self) -> MultiPoly<T> {
        let n = self.linear.len();
        let mut p = MultiPoly::constant(n, self.constant.clone());
        for (j, c) in self.linear.iter().enumerate() {
            let mut alpha = vec![0; n];
            alpha[j] = 1;
            p.add_term(alpha, c.clone());
        }
        p
    }
}

impl<T: Scalar> MultiPoly<T> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut alpha = vec![0; nvars];
        alpha[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(alpha, T::one());
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, T)>,
    {
        let mut p = Self::zero(nvars);
        for (alpha, c) in terms {
            if alpha.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: alpha.len() });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    pub fn from_univariate(p: &UniPoly<T>) -> Self {
        let mut out = Self::zero(1);
        for (k, c) in p.coeffs().iter().enumerate() {
            out.add_term(vec![k as u32], c.clone());
        }
        out
    }

    /// Adds `c x^alpha`; panics if `alpha` has the wrong length.
    pub fn add_term(&mut self, alpha: Vec<u32>, c: T) {
        assert_eq!(alpha.len(), self.nvars, "multi-index length");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&alpha);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, T> {
        &self.terms
    }

    pub fn coeff(&self, alpha: &[u32]) -> T {
        self.terms.get(alpha).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|a| a[v]).max().unwrap_or(0)
    }

    pub fn max_var_degree(&self) -> u32 {
        (0..self.nvars).map(|v| self.degree_in(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    /// Degree at most one in every variable.
    pub fn is_multi_affine(&self) -> bool {
        self.terms.keys().all(|a| a.iter().all(|&d| d <= 1))
    }

    /// Invariant under every transposition of variables.
    pub fn is_symmetric(&self) -> bool {
        (0..self.nvars.saturating_sub(1)).all(|i| self.swap_vars(i, i + 1) == *self)
    }

    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (alpha, c) in &self.terms {
            let mut a = alpha.clone();
            a.swap(i, j);
            out.add_term(a, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Self::zero(self.nvars);
        for (alpha, c) in &self.terms {
            out.add_term(alpha.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let alpha = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(alpha, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, T::one());
        for _ in 0..k {
            acc = acc.mul(self).expect("same arity");
        }
        acc
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }

    pub fn eval(&self, point: &[T]) -> Result<T> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: point.len() });
        }
        let mut acc = T::zero();
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for (x, &d) in point.iter().zip(alpha) {
                for _ in 0..d {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Evaluation at a complex point with a forward error bound.
    pub fn eval_complex(&self, point: &[Complex64]) -> Result<ComplexEval> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: point.len() });
        }
        let mut value = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for (alpha, c) in &self.terms {
            let cf = c.to_f64();
            let mut term = Complex64::new(cf, 0.0);
            let mut mag = cf.abs();
            for (z, &d) in point.iter().zip(alpha) {
                term *= z.powu(d);
                mag *= z.norm().powi(d as i32);
            }
            value += term;
            abs_sum += mag;
        }
        let depth = self.total_degree() as usize + self.terms.len() + 2;
        Ok(ComplexEval { value, bound: gamma(4 * depth) * abs_sum })
    }

    /// Substitutes variable `v` by `forms[v]`; the result lives in
    /// `forms[0].linear.len()` variables.
    pub fn substitute_affine(&self, forms: &[AffineForm<T>]) -> Result<Self> {
        if forms.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: forms.len() });
        }
        let target = forms.first().map_or(0, |f| f.linear.len());
        if forms.iter().any(|f| f.linear.len() != target) {
            return Err(Error::InvalidParameter("affine forms of mixed arity".into()));
        }
        let mut powers: Vec<Vec<MultiPoly<T>>> = Vec::with_capacity(self.nvars);
        for (v, form) in forms.iter().enumerate() {
            let base = form.to_poly();
            let mut list = vec![MultiPoly::constant(target, T::one())];
            for k in 1..=self.degree_in(v) as usize {
                let next = list[k - 1].mul(&base)?;
                list.push(next);
            }
            powers.push(list);
        }
        let mut out = Self::zero(target);
        for (alpha, c) in &self.terms {
            let mut term = MultiPoly::constant(target, c.clone());
            for (v, &d) in alpha.iter().enumerate() {
                if d > 0 {
                    term = term.mul(&powers[v][d as usize])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Sets variable `v` to `value`, keeping the arity.
    pub fn set_var(&self, v: usize, value: &T) -> Self {
        let mut out = Self::zero(self.nvars);
        for (alpha, c) in &self.terms {
            let mut a = alpha.clone();
            let mut coef = c.clone();
            for _ in 0..a[v] {
                coef = coef * value.clone();
            }
            a[v] = 0;
            out.add_term(a, coef);
        }
        out
    }

    /// Removes the listed variables (which must not occur).
    pub fn drop_vars(&self, keep: &[usize]) -> Self {
        let mut out = Self::zero(keep.len());
        for (alpha, c) in &self.terms {
            out.add_term(keep.iter().map(|&v| alpha[v]).collect(), c.clone());
        }
        out
    }

    /// Restriction `x ↦ f(a + x b)` along a real line.
    pub fn restrict_line(&self, a: &[T], b: &[T]) -> Result<UniPoly<T>> {
        if a.len() != self.nvars || b.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: a.len().min(b.len()) });
        }
        let forms: Vec<AffineForm<T>> = a
            .iter()
            .zip(b)
            .map(|(ai, bi)| AffineForm { constant: ai.clone(), linear: vec![bi.clone()] })
            .collect();
        Ok(self.substitute_affine(&forms)?.to_univariate())
    }

    /// `f(x, x, ..., x)`.
    pub fn diagonal(&self) -> UniPoly<T> {
        let mut coeffs = vec![T::zero(); self.total_degree() as usize + 1];
        for (alpha, c) in &self.terms {
            let d: u32 = alpha.iter().sum();
            coeffs[d as usize] = coeffs[d as usize].clone() + c.clone();
        }
        UniPoly::new(coeffs)
    }

    /// Views a polynomial in at most one variable as univariate.
    pub fn to_univariate(&self) -> UniPoly<T> {
        let mut coeffs = vec![T::zero(); self.total_degree() as usize + 1];
        for (alpha, c) in &self.terms {
            let d = alpha.first().copied().unwrap_or(0) as usize;
            coeffs[d] = coeffs[d].clone() + c.clone();
        }
        UniPoly::new(coeffs)
    }

    pub fn to_f64(&self) -> MultiPoly<f64> {
        let mut out = MultiPoly::zero(self.nvars);
        for (alpha, c) in &self.terms {
            out.add_term(alpha.clone(), c.to_f64());
        }
        out
    }

    /// Largest absolute coefficient difference (over the union of supports).
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (alpha, c) in &self.terms {
            m = m.max((c.to_f64() - other.coeff(alpha).to_f64()).abs());
        }
        for (alpha, c) in &other.terms {
            if !self.terms.contains_key(alpha) {
                m = m.max(c.to_f64().abs());
            }
        }
        m
    }
}

impl<T: Scalar> Serialize for MultiPoly<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<Value> = self
            .terms
            .iter()
            .map(|(alpha, c)| json!({"alpha": alpha, "c": c.to_json()}))
            .collect();
        records.serialize(s)
    }
}

#[derive(Deserialize)]
struct TermRecord {
    alpha: Vec<u32>,
    c: Value,
}

impl<'de, T: Scalar> Deserialize<'de> for MultiPoly<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        let nvars = records.first().map_or(0, |r| r.alpha.len());
        let terms = records
            .into_iter()
            .map(|r| T::from_json(&r.c).map(|c| (r.alpha, c)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        MultiPoly::from_terms(nvars, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn eval_product() {
        let p = MultiPoly::var(2, 0).mul(&MultiPoly::var(2, 1)).unwrap();
        assert_eq!(p.eval(&[2.0, 3.0]).unwrap(), 6.0);
        let v = p.eval_complex(&[Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)]).unwrap();
        assert_eq!(v.value, Complex64::new(6.0, 0.0));
        assert!(p.eval(&[1.0]).is_err());
    }

    #[test]
    fn substitution_and_restriction() {
        // x1 x2 under x1 -> (x1 + x2)/2
        let half = Rational::from_ratio(1, 2);
        let p: MultiPoly<Rational> = MultiPoly::var(2, 0).mul(&MultiPoly::var(2, 1)).unwrap();
        let forms = vec![
            AffineForm { constant: Rational::from_i64(0), linear: vec![half.clone(), half.clone()] },
            AffineForm::var(2, 1),
        ];
        let q = p.substitute_affine(&forms).unwrap();
        assert_eq!(q.coeff(&[1, 1]), half);
        assert_eq!(q.coeff(&[0, 2]), half);
        let line = p
            .restrict_line(&[Rational::from_i64(1), Rational::from_i64(0)], &[Rational::from_i64(1), Rational::from_i64(2)])
            .unwrap();
        // (1 + x)(2x) = 2x + 2x^2
        assert_eq!(line.coeffs(), &[Rational::from_i64(0), Rational::from_i64(2), Rational::from_i64(2)]);
    }

    #[test]
    fn json_records() {
        let p: MultiPoly<Rational> =
            serde_json::from_str(r#"[{"alpha":[1,0],"c":"1/2"},{"alpha":[0,1],"c":"1/2"}]"#).unwrap();
        assert_eq!(p.nvars(), 2);
        assert!(p.is_multi_affine() && p.is_symmetric());
        let back: MultiPoly<Rational> = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
