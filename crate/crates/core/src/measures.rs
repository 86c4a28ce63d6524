//! Probability measures on finite boxes of ℕ^n, identified with their
//! generating functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::{MultiPoly, RootClass, RootSolve, UniPoly};
use crate::tolerances::{Tolerances, BP_ROOT_CUTOFF};

/// Weights on the box `{0..=shape[0]} × … × {0..=shape[n-1]}`, stored
/// row-major (last coordinate fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub shape: Vec<usize>,
    pub weights: Vec<f64>,
    pub tail_bound: f64,
}

/// Rounding slack allowed in the normalization check.
fn mass_slack(len: usize) -> f64 {
    1e-13 + 8.0 * f64::EPSILON * len as f64
}

impl Measure {
    pub fn new(shape: Vec<usize>, weights: Vec<f64>, tail_bound: f64) -> Result<Self> {
        let len: usize = shape.iter().map(|n| n + 1).product();
        if weights.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: weights.len() });
        }
        if !(tail_bound >= 0.0) {
            return Err(Error::InvalidParameter(format!("tail_bound {tail_bound} must be >= 0")));
        }
        if let Some((i, &w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
            return Err(Error::NegativeCoefficient { index: i, value: w });
        }
        let m = Self { shape, weights, tail_bound };
        let total = m.total_mass();
        if (total - 1.0).abs() > tail_bound + mass_slack(len) {
            return Err(Error::InvalidParameter(format!(
                "total mass {total} differs from 1 by more than tail_bound {tail_bound}"
            )));
        }
        Ok(m)
    }

    pub fn univariate(weights: Vec<f64>, tail_bound: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Self::new(vec![weights.len() - 1], weights, tail_bound)
    }

    pub fn point_mass(point: &[usize]) -> Self {
        let shape = point.to_vec();
        let len: usize = shape.iter().map(|n| n + 1).product();
        let mut weights = vec![0.0; len];
        weights[len - 1] = 1.0;
        Self { shape, weights, tail_bound: 0.0 }
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("bernoulli p = {p}")));
        }
        Self::univariate(vec![1.0 - p, p], 0.0)
    }

    /// Poisson(σ) on `{0..=n}` with the cut-off mass as tail bound.
    pub fn poisson(sigma: f64, n: usize) -> Result<Self> {
        let (w, tail) = poisson_weights(sigma, n)?;
        Self::univariate(w, tail)
    }

    /// Independent product of measures.
    pub fn product(factors: &[Measure]) -> Self {
        let mut out = Measure { shape: vec![], weights: vec![1.0], tail_bound: 0.0 };
        for f in factors {
            let mut weights = Vec::with_capacity(out.weights.len() * f.weights.len());
            for &a in &out.weights {
                weights.extend(f.weights.iter().map(|&b| a * b));
            }
            out.shape.extend(&f.shape);
            out.weights = weights;
            // P(some factor truncated) ≤ Σ tails
            out.tail_bound += f.tail_bound;
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Multi-index of a flat position.
    pub fn index_of(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (slot, &n) in idx.iter_mut().zip(&self.shape).rev() {
            *slot = flat % (n + 1);
            flat /= n + 1;
        }
        idx
    }

    pub fn flat_of(&self, idx: &[usize]) -> Option<usize> {
        if idx.len() != self.shape.len() {
            return None;
        }
        let mut flat = 0;
        for (&i, &n) in idx.iter().zip(&self.shape) {
            if i > n {
                return None;
            }
            flat = flat * (n + 1) + i;
        }
        Some(flat)
    }

    pub fn weight(&self, idx: &[usize]) -> f64 {
        self.flat_of(idx).map_or(0.0, |f| self.weights[f])
    }

    /// Measure from a polynomial with nonnegative coefficients.
    pub fn from_pgf(f: &MultiPoly<f64>, tail_bound: f64) -> Result<Self> {
        let shape: Vec<usize> = (0..f.nvars()).map(|v| f.degree_in(v) as usize).collect();
        let len: usize = shape.iter().map(|n| n + 1).product();
        let mut m = Measure { shape, weights: vec![0.0; len], tail_bound };
        for (alpha, &c) in f.terms() {
            let idx: Vec<usize> = alpha.iter().map(|&a| a as usize).collect();
            let flat = m.flat_of(&idx).expect("inside box");
            m.weights[flat] = c;
        }
        Measure::new(m.shape, m.weights, m.tail_bound)
    }

    /// The univariate weights as a polynomial.
    pub fn to_unipoly(&self) -> Result<UniPoly<f64>> {
        if self.nvars() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.nvars() });
        }
        Ok(UniPoly::new(self.weights.clone()))
    }
}

/// Poisson weights `e^{-σ} σ^k / k!` for `k ≤ n` and the mass beyond `n`.
pub fn poisson_weights(sigma: f64, n: usize) -> Result<(Vec<f64>, f64)> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("poisson rate {sigma}")));
    }
    if sigma == 0.0 {
        let mut w = vec![0.0; n + 1];
        w[0] = 1.0;
        return Ok((w, 0.0));
    }
    let log_term = |k: usize| -sigma + k as f64 * sigma.ln() - ln_factorial(k);
    let w: Vec<f64> = (0..=n).map(|k| log_term(k).exp()).collect();
    // tail terms past the mode decrease at least geometrically
    let mut tail = 0.0;
    let mut k = n + 1;
    loop {
        let t = log_term(k).exp();
        tail += t;
        if (k as f64 > sigma && t <= tail * 1e-17) || t == 0.0 && k as f64 > sigma {
            break;
        }
        k += 1;
    }
    Ok((w, tail))
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Total variation distance between weight vectors, zero-padded.
pub fn tv_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    0.5 * (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Coefficient-faithful conversion to a polynomial.
pub fn pgf(mu: &Measure) -> MultiPoly<f64> {
    let mut f = MultiPoly::zero(mu.nvars());
    for (flat, &w) in mu.weights.iter().enumerate() {
        if w != 0.0 {
            let alpha = mu.index_of(flat).into_iter().map(|a| a as u32).collect();
            f.add_term(alpha, w);
        }
    }
    f
}

/// Sums out every coordinate outside `keep` (given in output order).
pub fn project(mu: &Measure, keep: &[usize]) -> Result<Measure> {
    for &k in keep {
        if k >= mu.nvars() {
            return Err(Error::OutOfRange { index: k, limit: mu.nvars() });
        }
    }
    let shape: Vec<usize> = keep.iter().map(|&k| mu.shape[k]).collect();
    let len: usize = shape.iter().map(|n| n + 1).product();
    let mut out = Measure { shape, weights: vec![0.0; len], tail_bound: mu.tail_bound };
    for (flat, &w) in mu.weights.iter().enumerate() {
        let idx = mu.index_of(flat);
        let sub: Vec<usize> = keep.iter().map(|&k| idx[k]).collect();
        let f = out.flat_of(&sub).expect("inside box");
        out.weights[f] += w;
    }
    Ok(out)
}

/// Law of `Σ_{i∈T} η(i)`.
pub fn marginal_sum(mu: &Measure, set: &[usize]) -> Result<Measure> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("marginal_sum needs a nonempty index set".into()));
    }
    for &k in set {
        if k >= mu.nvars() {
            return Err(Error::OutOfRange { index: k, limit: mu.nvars() });
        }
    }
    let top: usize = set.iter().map(|&k| mu.shape[k]).sum();
    let mut weights = vec![0.0; top + 1];
    for (flat, &w) in mu.weights.iter().enumerate() {
        let idx = mu.index_of(flat);
        let s: usize = set.iter().map(|&k| idx[k]).sum();
        weights[s] += w;
    }
    Ok(Measure { shape: vec![top], weights, tail_bound: mu.tail_bound })
}

/// Parameters of the product form `x^q e^{σ(x-1)} Π[(1-p_k) + p_k x]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpDecomposition {
    pub q: usize,
    pub sigma: f64,
    pub p: Vec<f64>,
    pub residual: f64,
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Point mass at `q` convolved with Poisson(σ) and Bernoulli(p_k), cut to
/// `{0..=box_max}`.
pub fn bp_synthesize(q: usize, sigma: f64, p: &[f64], box_max: usize) -> Result<Measure> {
    for &pk in p {
        if !(pk > 0.0 && pk < 1.0) {
            return Err(Error::InvalidParameter(format!("bernoulli parameter {pk} not in (0,1)")));
        }
    }
    // Poisson indices beyond box_max - q can never land inside the box
    let room = box_max.saturating_sub(q);
    let (pw, mut tail) = poisson_weights(sigma, room)?;
    let mut w = vec![0.0; q];
    w.extend(pw);
    for &pk in p {
        w = convolve(&w, &[1.0 - pk, pk]);
    }
    if w.len() > box_max + 1 {
        tail += w[box_max + 1..].iter().sum::<f64>();
        w.truncate(box_max + 1);
    }
    w.resize(box_max + 1, 0.0);
    Measure::new(vec![box_max], w, tail)
}

/// Log of the geometric majorant of `Σ_{k>N} w_k R^k`, or `None` when the
/// majorant diverges at `R`.
fn log_tail_majorant(w: &[f64], tail: f64, r: f64) -> Option<f64> {
    if tail == 0.0 {
        return Some(f64::NEG_INFINITY);
    }
    let n = w.len() - 1;
    let mut rho: f64 = 0.0;
    for k in n.saturating_sub(2).max(1)..=n {
        if w[k - 1] > 0.0 {
            rho = rho.max(w[k] / w[k - 1]);
        } else {
            return None;
        }
    }
    if n == 0 || rho * r >= 0.5 {
        return None;
    }
    let lw = w[n].min(tail).ln();
    // Σ_{j≥1} w_N ρ^j R^{N+j} = w_N R^N ρR/(1-ρR)
    Some(lw + n as f64 * r.ln() + (rho * r).ln() - (1.0 - rho * r).ln())
}

/// Recovers `(q, σ, p_k)` from a univariate measure.
///
/// Real roots in `[-BP_ROOT_CUTOFF, 0)` become Bernoulli factors once the
/// truncated tail provably cannot move them; everything else is absorbed
/// into σ, fitted by least squares on `log f` at 16 Chebyshev nodes of
/// `[0.1, 0.9]`.
pub fn bp_decompose(mu: &Measure, tol: f64) -> Result<BpDecomposition> {
    let poly = mu.to_unipoly()?;
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let q = poly.zero_order();
    let reduced = UniPoly::new(poly.coeffs()[q..].to_vec());
    let tols = Tolerances::default();
    let w = reduced.coeffs();
    let mut p = Vec::new();
    if reduced.degree().unwrap_or(0) > 0 {
        let roots = <f64 as RootSolve>::root_list(&reduced, mu.tail_bound, &tols)?;
        if roots.any_non_real() {
            return Err(Error::NotTStable(format!(
                "{} certified non-real roots",
                roots.roots.iter().filter(|r| r.class == RootClass::NonReal).count()
            )));
        }
        let dp = reduced.derivative();
        for r in &roots.roots {
            let a = r.z().re;
            // rounding can smear clustered roots onto the real axis
            let located = r.radius <= 1e-6 * a.abs().max(1.0);
            if r.class != RootClass::Real || !located || !(-BP_ROOT_CUTOFF..0.0).contains(&a) {
                continue;
            }
            let Some(log_t) = log_tail_majorant(w, mu.tail_bound, -a) else { continue };
            let slope = dp.eval(&a).abs();
            // first-order displacement of the root under the tail
            if log_t - slope.ln() > (1e-6 * a.abs().max(1.0)).ln() {
                continue;
            }
            for _ in 0..r.multiplicity.max(1) {
                p.push(1.0 / (1.0 - a));
            }
        }
    }
    p.sort_by(f64::total_cmp);

    let nodes: Vec<f64> = (0..16)
        .map(|i| 0.5 + 0.4 * ((2 * i + 1) as f64 * std::f64::consts::PI / 32.0).cos())
        .collect();
    let ys: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let mut g = reduced.eval(&x).ln();
            for &pk in &p {
                g -= (1.0 - pk + pk * x).ln();
            }
            g
        })
        .collect();
    let n = nodes.len() as f64;
    let mx = nodes.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = nodes.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = nodes.iter().map(|x| (x - mx) * (x - mx)).sum();
    let mut sigma = sxy / sxx;
    if sigma < 0.0 {
        if sigma < -tol.max(1e-9) {
            return Err(Error::NotTStable(format!("fitted Poisson rate {sigma} is negative")));
        }
        sigma = 0.0;
    }
    let box_max = mu.shape[0];
    let recon = bp_synthesize(q, sigma, &p, box_max)?;
    let residual = recon
        .weights
        .iter()
        .zip(&mu.weights)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(BpDecomposition { q, sigma, p, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::is_real_rooted;

    #[test]
    fn pgf_examples() {
        let f = pgf(&Measure::point_mass(&[1, 0]));
        assert_eq!(f, MultiPoly::var(2, 0));
        let b = Measure::bernoulli(0.5).unwrap();
        let f = pgf(&Measure::product(&[b.clone(), b]));
        assert_eq!(f.coeff(&[1, 1]), 0.25);
        assert_eq!(f.len(), 4);
        let p = Measure::poisson(2.0, 30).unwrap();
        assert!(p.tail_bound > 0.0 && p.tail_bound < 1e-15);
    }

    #[test]
    fn invariant_enforced() {
        assert!(Measure::univariate(vec![0.5, 0.4], 0.0).is_err());
        assert!(Measure::univariate(vec![0.5, 0.4], 0.1).is_ok());
        assert!(Measure::univariate(vec![1.5, -0.5], 0.0).is_err());
    }

    #[test]
    fn project_examples() {
        let m = Measure::product(&[Measure::bernoulli(0.3).unwrap(), Measure::bernoulli(0.6).unwrap()]);
        let p = project(&m, &[0]).unwrap();
        assert!((p.weights[1] - 0.3).abs() < 1e-15);
        let pm = project(&Measure::point_mass(&[2, 3]), &[1]).unwrap();
        assert_eq!(pm, Measure::point_mass(&[3]));
        let empty = project(&m, &[]).unwrap();
        assert_eq!(empty.weights.len(), 1);
        assert!((empty.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn marginal_sum_examples() {
        let (a, b) = (0.3, 0.6);
        let m = Measure::product(&[Measure::bernoulli(a).unwrap(), Measure::bernoulli(b).unwrap()]);
        let s = marginal_sum(&m, &[0, 1]).unwrap();
        let want = [(1.0 - a) * (1.0 - b), a * (1.0 - b) + b * (1.0 - a), a * b];
        for (x, y) in s.weights.iter().zip(want) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(is_real_rooted(&s.to_unipoly().unwrap()).is_stable());
        assert_eq!(marginal_sum(&m, &[1]).unwrap(), project(&m, &[1]).unwrap());
    }

    #[test]
    fn synthesize_examples() {
        let b = bp_synthesize(0, 0.0, &[0.5], 1).unwrap();
        assert_eq!(b.weights, vec![0.5, 0.5]);
        assert_eq!(bp_synthesize(2, 0.0, &[], 2).unwrap(), Measure::point_mass(&[2]));
        let m = bp_synthesize(0, 1.0, &[0.5], 40).unwrap();
        for x in [0.1, 0.5, -0.7, 1.3, 2.0] {
            let direct = (x - 1.0f64).exp() * (0.5 + 0.5 * x);
            let via = m.to_unipoly().unwrap().eval(&x);
            assert!((direct - via).abs() < 1e-13, "{x}: {direct} vs {via}");
        }
        assert!(bp_synthesize(0, 1.0, &[1.2], 10).is_err());
    }

    #[test]
    fn decompose_examples() {
        let d = bp_decompose(&Measure::bernoulli(1.0 / 3.0).unwrap(), 1e-9).unwrap();
        assert_eq!(d.q, 0);
        assert!(d.sigma.abs() < 1e-9);
        assert_eq!(d.p.len(), 1);
        assert!((d.p[0] - 1.0 / 3.0).abs() < 1e-12 && d.residual < 1e-12);

        let d = bp_decompose(&Measure::point_mass(&[3]), 1e-9).unwrap();
        assert_eq!((d.q, d.p.len()), (3, 0));
        assert!(d.sigma.abs() < 1e-9);

        let d = bp_decompose(&Measure::poisson(2.0, 80).unwrap(), 1e-9).unwrap();
        assert!((d.sigma - 2.0).abs() < 1e-6, "{d:?}");
        assert!(d.p.iter().sum::<f64>() < 1e-6);
    }

    #[test]
    fn decompose_rejects_non_real_rooted() {
        let m = Measure::univariate(vec![1.0 / 3.0; 3], 0.0).unwrap();
        assert!(matches!(bp_decompose(&m, 1e-9), Err(Error::NotTStable(_))));
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(Measure::bernoulli(0.25).unwrap()).unwrap();
        assert_eq!(v["shape"], serde_json::json!([1]));
        assert_eq!(v["tail_bound"], 0.0);
        let d = BpDecomposition { q: 1, sigma: 0.5, p: vec![0.2], residual: 0.0 };
        let v = serde_json::to_value(d).unwrap();
        assert!(v.get("p").is_some() && v.get("residual").is_some());
    }
}
