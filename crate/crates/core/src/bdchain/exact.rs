//! Exact-rational evolution by the truncated exponential series.

use serde::{Deserialize, Serialize};

use super::BirthDeathRates;
use crate::error::{Error, Result};
use crate::polycore::UniPoly;
use crate::scalar::{rational_from_f64, Rational, Scalar};

/// `μ e^{tQ}` with rational coefficients and an l1 bound on the dropped
/// series remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactEvolution {
    pub poly: UniPoly<Rational>,
    pub remainder_bound: f64,
    pub terms: usize,
}

/// Exact evolution of a pure-death chain (the support never grows, so no
/// truncation is involved). Terms are added until the series remainder is
/// below `tol` in l1.
pub fn evolve_exact(mu: &UniPoly<Rational>, rates: &BirthDeathRates, t: &Rational, tol: f64) -> Result<ExactEvolution> {
    if !rates.is_pure_death() {
        return Err(Error::InvalidParameter("exact evolution needs a pure-death chain".into()));
    }
    if *t < Rational::from_i64(0) {
        return Err(Error::InvalidParameter("time must be >= 0".into()));
    }
    let n = mu.degree().ok_or(Error::ZeroPolynomial)?;
    let death: Vec<Rational> = (0..=n).map(|k| rational_from_f64(rates.death.at(k))).collect();
    let lam = (0..=n).map(|k| rates.death.at(k)).fold(0.0, f64::max);
    let x = 2.0 * lam * t.to_f64();
    let mut v: Vec<Rational> = mu.coeffs().to_vec();
    v.resize(n + 1, Rational::from_i64(0));
    let norm: f64 = v.iter().map(|c| c.to_f64().abs()).sum();
    let mut sum = v.clone();
    let mut term = v;
    let mut m = 0usize;
    let mut log_bound = 0.0f64; // log of x^m / m!
    let remainder = loop {
        if x == 0.0 {
            break 0.0;
        }
        // Σ_{i>m} x^i/i! ≤ x^{m+1}/(m+1)! / (1 - x/(m+2))
        let next_log = log_bound + x.ln() - ((m + 1) as f64).ln();
        let r = x / (m + 2) as f64;
        if r < 1.0 {
            let b = norm * next_log.exp() / (1.0 - r);
            if b <= tol {
                break b;
            }
        }
        if m > 100_000 {
            return Err(Error::ToleranceUnreachable { tol, cap: 100_000 });
        }
        m += 1;
        log_bound = next_log;
        // term ← term · Q · t / m
        let scale = t.clone() / Rational::from_i64(m as i64);
        let mut next = vec![Rational::from_i64(0); n + 1];
        for k in 1..=n {
            if term[k] == Rational::from_i64(0) || death[k] == Rational::from_i64(0) {
                continue;
            }
            let flow = term[k].clone() * death[k].clone() * scale.clone();
            next[k - 1] = next[k - 1].clone() + flow.clone();
            next[k] = next[k].clone() - flow;
        }
        for (s, c) in sum.iter_mut().zip(&next) {
            *s = s.clone() + c.clone();
        }
        term = next;
    };
    Ok(ExactEvolution { poly: UniPoly::new(sum), remainder_bound: remainder, terms: m })
}
