//! Stability and t-stability certificates.
//!
//! Verdicts are asymmetric: a refutation always carries a witness zero in
//! the open upper half-space that re-evaluates to within its rounding
//! bound, while confirmation is only issued where a finite check is
//! conclusive (real-rootedness, symmetric multi-affine polynomials via the
//! diagonal) or, for general multi-affine polynomials, after a budget of
//! line restrictions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::polycore::{Complex64Json, MultiPoly, RootClass, RootSolve, UniPoly};
use crate::scalar::{falling, Scalar};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub verdict: Verdict,
    /// A zero in the open upper half-space (refutations only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<Complex64Json>>,
    /// Index of the refuting approximant for t-stability.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    pub tolerance_used: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl StabilityCertificate {
    fn new(verdict: Verdict, tol: &Tolerances) -> Self {
        Self { verdict, witness: None, m: None, tolerance_used: tol.imag_rel, note: None }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_refuted(&self) -> bool {
        self.verdict == Verdict::Refuted
    }

    pub fn is_stable(&self) -> bool {
        self.verdict == Verdict::Stable
    }

    pub fn witness_point(&self) -> Option<Vec<Complex64>> {
        self.witness.as_ref().map(|w| w.iter().map(|&z| z.into()).collect())
    }
}

/// Newton-polishes a zero in place until `|p(z)|` is within its
/// evaluation bound. Returns whether that succeeded.
fn polish<T: Scalar>(p: &UniPoly<T>, z: &mut Complex64) -> bool {
    let dp = p.derivative();
    for _ in 0..60 {
        let v = p.eval_complex(*z);
        if v.value.norm() <= v.bound {
            return true;
        }
        let d = dp.eval_complex(*z).value;
        if d.norm() == 0.0 {
            return false;
        }
        let step = v.value / d;
        let next = *z - step;
        if p.eval_complex(next).value.norm() >= v.value.norm() {
            return false;
        }
        *z = next;
    }
    let v = p.eval_complex(*z);
    v.value.norm() <= v.bound
}

/// Real-rootedness with default tolerances and no truncated tail.
pub fn is_real_rooted<T: RootSolve>(p: &UniPoly<T>) -> StabilityCertificate {
    is_real_rooted_with(p, 0.0, &Tolerances::default())
}

/// Real-rootedness of `p`, whose coefficients beyond the degree may carry
/// up to `tail` l1 mass.
pub fn is_real_rooted_with<T: RootSolve>(p: &UniPoly<T>, tail: f64, tol: &Tolerances) -> StabilityCertificate {
    if p.is_zero() {
        return StabilityCertificate::new(Verdict::Inconclusive, tol)
            .with_note("identically zero polynomial");
    }
    let roots = match T::root_list(p, tail, tol) {
        Ok(r) => r,
        Err(e) => return StabilityCertificate::new(Verdict::Inconclusive, tol).with_note(e.to_string()),
    };
    if roots.all_real() {
        return StabilityCertificate::new(Verdict::Stable, tol);
    }
    for r in roots.roots.iter().filter(|r| r.class == RootClass::NonReal) {
        let mut z = r.z();
        if z.im < 0.0 {
            z = z.conj();
        }
        let mut polished = z;
        if polish(p, &mut polished) && polished.im > 0.0 {
            z = polished;
        }
        let v = p.eval_complex(z);
        if v.value.norm() <= v.bound && z.im > 0.0 {
            let mut cert = StabilityCertificate::new(Verdict::Refuted, tol);
            cert.witness = Some(vec![z.into()]);
            return cert;
        }
    }
    StabilityCertificate::new(Verdict::Inconclusive, tol)
        .with_note(format!("{} of {} roots certified real", roots.certified_real_count, roots.degree))
}

fn random_line<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> (Vec<T>, Vec<T>) {
    let a = (0..n).map(|_| T::from_ratio(rng.random_range(-24..=24), 8)).collect();
    let b = (0..n).map(|_| T::from_ratio(rng.random_range(1..=16), 8)).collect();
    (a, b)
}

/// Stability of a multivariate polynomial on the open upper half-space.
///
/// Refutation searches `budget` random real lines `a + x b` with `b > 0`:
/// any non-real zero `x0` of the restriction gives the witness
/// `a + x0 b`. Confirmation is exact for symmetric multi-affine input and
/// budget-qualified for other multi-affine input.
pub fn is_stable_multi<T: RootSolve>(f: &MultiPoly<T>, budget: usize, seed: u64) -> StabilityCertificate {
    is_stable_multi_with(f, budget, seed, &Tolerances::default())
}

pub fn is_stable_multi_with<T: RootSolve>(
    f: &MultiPoly<T>,
    budget: usize,
    seed: u64,
    tol: &Tolerances,
) -> StabilityCertificate {
    let n = f.nvars();
    if f.is_zero() {
        return StabilityCertificate::new(Verdict::Inconclusive, tol).with_note("identically zero polynomial");
    }
    if f.total_degree() == 0 {
        return StabilityCertificate::new(Verdict::Stable, tol);
    }
    if n == 1 {
        return is_real_rooted_with(&f.to_univariate(), 0.0, tol);
    }
    let affine = f.is_multi_affine();
    if affine && f.is_symmetric() {
        let diag = is_real_rooted_with(&f.diagonal(), 0.0, tol);
        match diag.verdict {
            Verdict::Stable => return diag.with_note("symmetric multi-affine: diagonal real-rooted"),
            Verdict::Refuted => {
                let z = diag.witness.as_ref().expect("refutation has witness")[0];
                let point = vec![z; n];
                let mut cert = StabilityCertificate::new(Verdict::Refuted, tol);
                cert.witness = Some(point);
                return cert;
            }
            Verdict::Inconclusive => {}
        }
    }
    let outcomes = par::map_range(budget, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let (a, b) = random_line::<T>(&mut rng, n);
        let g = f.restrict_line(&a, &b).ok()?;
        if g.degree().unwrap_or(0) == 0 {
            return Some(LineOutcome::Clean);
        }
        let cert = is_real_rooted_with(&g, 0.0, tol);
        match cert.verdict {
            Verdict::Stable => Some(LineOutcome::Clean),
            Verdict::Inconclusive => Some(LineOutcome::Unclear),
            Verdict::Refuted => {
                let x0: Complex64 = cert.witness.expect("witness")[0].into();
                let point: Vec<Complex64> =
                    a.iter().zip(&b).map(|(ai, bi)| x0 * bi.to_f64() + ai.to_f64()).collect();
                Some(LineOutcome::Witness(point))
            }
        }
    });
    let mut unclear = false;
    for o in outcomes.into_iter().flatten() {
        match o {
            LineOutcome::Witness(point) => {
                let v = f.eval_complex(&point).expect("arity");
                // restriction bound covers the composed evaluation up to rounding of a + x0 b
                let slack = v.bound + 1e3 * f64::EPSILON * (1.0 + v.value.norm());
                if point.iter().all(|z| z.im > 0.0) && v.value.norm() <= slack.max(v.bound * 16.0) {
                    let mut cert = StabilityCertificate::new(Verdict::Refuted, tol);
                    cert.witness = Some(point.into_iter().map(Into::into).collect());
                    return cert;
                }
                unclear = true;
            }
            LineOutcome::Unclear => unclear = true,
            LineOutcome::Clean => {}
        }
    }
    if affine && !unclear {
        StabilityCertificate::new(Verdict::Stable, tol)
            .with_note(format!("multi-affine: {budget} line restrictions real-rooted"))
    } else {
        StabilityCertificate::new(Verdict::Inconclusive, tol)
            .with_note(format!("no zero found in {budget} line restrictions"))
    }
}

enum LineOutcome {
    Clean,
    Unclear,
    Witness(Vec<Complex64>),
}

/// The approximant `f_m = Σ_{α ≤ β_m} (β_m)_α c_α (x/m)^α` with
/// `β_m = (m, ..., m)` and `(β)_α = β!/(β-α)!`.
#[derive(Debug, Clone, PartialEq)]
pub struct TStableApproximant<T: Scalar = f64> {
    pub m: usize,
    pub poly: MultiPoly<T>,
}

fn approximant_factor<T: Scalar>(m: usize, alpha: &[u32]) -> T {
    let mut f = T::one();
    let mt = T::from_i64(m as i64);
    for &a in alpha {
        f = f * falling::<T>(m, a as usize);
        for _ in 0..a {
            f = f / mt.clone();
        }
    }
    f
}

pub fn tstable_approximant<T: Scalar>(c: &MultiPoly<T>, m: usize) -> TStableApproximant<T> {
    let mut poly = MultiPoly::zero(c.nvars());
    for (alpha, coef) in c.terms() {
        if alpha.iter().any(|&a| a as usize > m) {
            continue;
        }
        poly.add_term(alpha.clone(), coef.clone() * approximant_factor::<T>(m, alpha));
    }
    TStableApproximant { m, poly }
}

/// Univariate approximant, propagating coefficient error bounds.
pub fn tstable_approximant_uni<T: Scalar>(c: &UniPoly<T>, m: usize) -> UniPoly<T> {
    let u = T::unit_roundoff();
    let top = c.coeffs().len().min(m + 1);
    let mut coeffs = Vec::with_capacity(top);
    let mut err = Vec::with_capacity(top);
    for k in 0..top {
        let f: T = approximant_factor(m, &[k as u32]);
        let v = c.coeffs()[k].clone() * f.clone();
        err.push(c.errors()[k] * f.to_f64().abs() + u * (2 * k + 2) as f64 * v.to_f64().abs());
        coeffs.push(v);
    }
    UniPoly::with_errors(coeffs, err)
}

/// t-stability of a nonnegative coefficient array.
///
/// Approximants `f_1..f_{m_max}` are checked first; any refutation is
/// sound. With `tail_bound == 0` the input is a polynomial and its own
/// stability decides. With a truncated tail only refutation is possible.
pub fn certify_tstable<T: RootSolve>(
    c: &MultiPoly<T>,
    tail_bound: f64,
    m_max: usize,
    seed: u64,
) -> Result<StabilityCertificate> {
    let tol = Tolerances::default();
    for (alpha, v) in c.terms() {
        if *v < T::zero() {
            let index = alpha.iter().map(|&a| a as usize).sum();
            return Err(Error::NegativeCoefficient { index, value: v.to_f64() });
        }
    }
    let budget = 64;
    let usable = if tail_bound > 0.0 {
        (0..c.nvars()).map(|v| c.degree_in(v) as usize).min().unwrap_or(0).min(m_max)
    } else {
        m_max
    };
    let ms: Vec<usize> = (1..=usable).collect();
    let certs = par::map(&ms, |&m| {
        let fm = tstable_approximant(c, m).poly;
        if c.nvars() == 1 {
            is_real_rooted_with(&fm.to_univariate(), 0.0, &tol)
        } else {
            is_stable_multi_with(&fm, budget, seed ^ m as u64, &tol)
        }
    });
    for (m, cert) in ms.iter().zip(certs) {
        if cert.is_refuted() {
            let mut out = cert;
            out.m = Some(*m);
            return Ok(out);
        }
    }
    if tail_bound > 0.0 {
        return Ok(StabilityCertificate::new(Verdict::Inconclusive, &tol)
            .with_note(format!("truncated input: approximants 1..={usable} not refuted")));
    }
    let direct = if c.nvars() == 1 {
        is_real_rooted_with(&c.to_univariate(), 0.0, &tol)
    } else {
        is_stable_multi_with(c, budget, seed, &tol)
    };
    Ok(direct)
}

/// Univariate convenience wrapper around [`certify_tstable`].
pub fn certify_tstable_uni<T: RootSolve>(
    c: &UniPoly<T>,
    tail_bound: f64,
    m_max: usize,
) -> Result<StabilityCertificate> {
    certify_tstable(&MultiPoly::from_univariate(c), tail_bound, m_max, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::polarize;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn real_rooted_examples() {
        let cube = UniPoly::new(vec![q(1, 1), q(1, 1)]).pow(3);
        assert!(is_real_rooted(&cube).is_stable());

        let p = UniPoly::new(vec![q(1, 1), q(1, 1), q(1, 1)]);
        let cert = is_real_rooted(&p);
        assert!(cert.is_refuted());
        let w = cert.witness_point().unwrap()[0];
        assert!((w - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-12);

        let double = UniPoly::new(vec![0.25, -1.0, 1.0]);
        assert!(is_real_rooted(&double).is_stable());
        assert_eq!(is_real_rooted(&UniPoly::<f64>::zero()).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn multi_examples() {
        let x1: MultiPoly<Rational> = MultiPoly::var(2, 0);
        let x2 = MultiPoly::var(2, 1);
        assert!(is_stable_multi(&x1.add(&x2).unwrap(), 32, 1).is_stable());

        // x1 x2 - 1 is the polarization of x^2 - 1, hence stable
        let p = x1.mul(&x2).unwrap().add(&MultiPoly::constant(2, q(-1, 1))).unwrap();
        assert!(!is_stable_multi(&p, 64, 2).is_refuted());

        // x1 x2 + 1 vanishes at (i, i)
        let p = x1.mul(&x2).unwrap().add(&MultiPoly::constant(2, q(1, 1))).unwrap();
        let cert = is_stable_multi(&p, 64, 3);
        assert!(cert.is_refuted());
        let w = cert.witness_point().unwrap();
        assert!(w.iter().all(|z| z.im > 0.0));
        assert!(p.eval_complex(&w).unwrap().value.norm() < 1e-12);
    }

    #[test]
    fn non_symmetric_refutation_by_lines() {
        // x1^2 + x2^2 has zeros (i, 1)... use 1 + x1^2 x2 which is not stable
        let x1: MultiPoly<f64> = MultiPoly::var(2, 0);
        let x2 = MultiPoly::var(2, 1);
        let p = x1.pow(2).mul(&x2).unwrap().add(&MultiPoly::constant(2, 1.0)).unwrap();
        let cert = is_stable_multi(&p, 64, 9);
        assert!(cert.is_refuted(), "{cert:?}");
        let w = cert.witness_point().unwrap();
        assert!(w.iter().all(|z| z.im > 0.0));
    }

    #[test]
    fn polarization_of_real_rooted_not_refuted() {
        let p = UniPoly::from_roots(&[q(-1, 2), q(-3, 1), q(-1, 1)]);
        let pol = polarize(&p, 4).unwrap();
        assert!(is_stable_multi(&pol, 16, 0).is_stable());
    }

    #[test]
    fn approximant_examples() {
        let c = MultiPoly::from_univariate(&UniPoly::new(vec![q(1, 1)]));
        for m in 1..5 {
            assert_eq!(tstable_approximant(&c, m).poly, c);
        }
        let c = MultiPoly::from_univariate(&UniPoly::new(vec![q(1, 2), q(1, 2)]));
        let f2 = tstable_approximant(&c, 2).poly.to_univariate();
        assert_eq!(f2, UniPoly::new(vec![q(1, 2), q(1, 2)]));
    }

    #[test]
    fn poisson_approximant_is_binomial_power() {
        // c_k = σ^k / k! (the e^{-σ} factor is common)
        let sigma = q(3, 2);
        let mut coeffs = vec![q(1, 1)];
        for k in 1..=30 {
            let prev = coeffs[k - 1].clone();
            coeffs.push(prev * sigma.clone() / q(k as i64, 1));
        }
        let c = MultiPoly::from_univariate(&UniPoly::new(coeffs));
        for m in [1usize, 3, 7, 12] {
            let fm = tstable_approximant(&c, m).poly.to_univariate();
            let closed = UniPoly::new(vec![q(1, 1), sigma.clone() / q(m as i64, 1)]).pow(m as u32);
            assert_eq!(fm, closed);
        }
    }

    #[test]
    fn certify_examples() {
        let third = UniPoly::new(vec![q(1, 3), q(1, 3), q(1, 3)]);
        let cert = certify_tstable_uni(&third, 0.0, 20).unwrap();
        assert!(cert.is_refuted());

        let neg = UniPoly::new(vec![0.25, -0.9, 0.9]);
        assert!(matches!(certify_tstable_uni(&neg, 0.0, 20), Err(Error::NegativeCoefficient { .. })));

        let bern = UniPoly::new(vec![q(1, 2), q(1, 2)]).pow(3);
        assert!(certify_tstable_uni(&bern, 0.0, 20).unwrap().is_stable());
    }

    #[test]
    fn certificate_json_shape() {
        let cert = is_real_rooted(&UniPoly::new(vec![1.0, 1.0, 1.0]));
        let v = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["verdict"], "Refuted");
        assert!(v["witness"][0]["im"].as_f64().unwrap() > 0.0);
        assert!(v.get("m").is_none());
        assert!(v["tolerance_used"].as_f64().is_some());
    }
}
