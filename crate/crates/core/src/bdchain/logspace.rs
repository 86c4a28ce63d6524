//! Pure-death evolution with every probability kept as a logarithm, for
//! laws whose coefficients span more than the f64 exponent range.

use serde::{Deserialize, Serialize};

use super::poisson::log_poisson_weights;
use super::{generator, BirthDeathRates, EvolvedPGF};
use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::polycore::roots::log_add;
use crate::polycore::{log_roots, LogPoly, RootList, UniPoly};
use crate::tolerances::Tolerances;

const LOG_TAIL: f64 = -80.0;
const MAX_TERMS: usize = 5_000_000;

/// Law of a pure-death chain at time `t` in log-magnitude form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvolution {
    pub poly: LogPoly,
    pub t: f64,
    /// Number of uniformization terms summed.
    pub terms: usize,
}

impl LogEvolution {
    /// Root list of the full law; nothing lies beyond the stored degree.
    pub fn roots(&self, tol: &Tolerances) -> Result<RootList> {
        log_roots(&self.poly, 0.0, None, tol)
    }

    /// The same law with f64 coefficients (underflowing entries become 0).
    pub fn to_evolved(&self, mu: &Measure) -> EvolvedPGF {
        let p = &self.poly;
        let coeffs: Vec<f64> = p.log_abs.iter().map(|l| l.exp()).collect();
        let sub = f64::from_bits(1);
        let err: Vec<f64> = p.log_err.iter().map(|l| l.exp() + sub).collect();
        let rounding: f64 = err.iter().sum();
        let n = coeffs.len().saturating_sub(1);
        EvolvedPGF {
            poly: UniPoly::with_errors(coeffs, err),
            t: self.t,
            tail_bound: mu.tail_bound + rounding,
            escape_bound: mu.tail_bound,
            truncation: n,
        }
    }
}

/// `μ e^{tQ}` for a pure-death chain, summed in log space.
///
/// All summands of the uniformization series are nonnegative, so each
/// coefficient keeps a relative error bound however small it is.
pub fn evolve_log(mu: &Measure, rates: &BirthDeathRates, t: f64) -> Result<LogEvolution> {
    if mu.nvars() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: mu.nvars() });
    }
    if !rates.is_pure_death() {
        return Err(Error::InvalidParameter("log-space evolution needs a pure-death chain".into()));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time {t} must be finite and >= 0")));
    }
    let n = mu.shape[0].max(1);
    let gen = generator(rates, n);
    let lam = gen.max_exit_rate();
    let mut cur: Vec<f64> = mu.weights.iter().map(|w| w.ln()).collect();
    cur.resize(n + 1, f64::NEG_INFINITY);
    let u = f64::EPSILON / 2.0;
    if lam == 0.0 || t == 0.0 {
        let err = cur.iter().map(|l| l + u.ln()).collect();
        let sign = cur.iter().map(|l| if l.is_finite() { 1.0 } else { 0.0 }).collect();
        return Ok(LogEvolution { poly: LogPoly::new(sign, cur, err), t, terms: 1 });
    }
    // U = I + Q/Λ: stay with ln(1 - δ_k/Λ), move down with ln(δ_k/Λ)
    let stay: Vec<f64> = gen.death.iter().map(|d| (1.0 - d / lam).max(0.0).ln()).collect();
    let down: Vec<f64> = gen.death.iter().map(|d| (d / lam).ln()).collect();
    let weights = log_poisson_weights(lam * t, n + 10, LOG_TAIL, MAX_TERMS)?;
    let mut out = vec![f64::NEG_INFINITY; n + 1];
    let mut next = vec![f64::NEG_INFINITY; n + 1];
    let mut biggest = 0.0f64;
    for (j, lw) in weights.lw.iter().enumerate() {
        if j > 0 {
            for k in 0..=n {
                let mut s = cur[k] + stay[k];
                if k < n {
                    s = log_add(s, cur[k + 1] + down[k + 1]);
                }
                next[k] = s;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        for (o, c) in out.iter_mut().zip(&cur) {
            *o = log_add(*o, lw + c);
        }
        biggest = cur.iter().filter(|l| l.is_finite()).fold(biggest, |m, l| m.max(l.abs()));
    }
    let terms = weights.lw.len();
    let log_tail = weights.log_tail;
    // a log of size L carries absolute error ~L u, i.e. relative error L u in
    // the value; every step and accumulation costs a few of those
    let rel = (terms + 2) as f64 * 8.0 * (biggest + 4.0) * u + weights.rel_all;
    // omitted terms: the mass at or above k only decreases along the chain
    let mut g = f64::NEG_INFINITY;
    let mut log_g = vec![f64::NEG_INFINITY; n + 1];
    for k in (0..=n).rev() {
        g = log_add(g, cur[k]);
        log_g[k] = g;
    }
    let err: Vec<f64> = out.iter().zip(&log_g).map(|(o, g)| log_add(o + rel.ln(), log_tail + g)).collect();
    let sign = out.iter().map(|l| if l.is_finite() { 1.0 } else { 0.0 }).collect();
    Ok(LogEvolution { poly: LogPoly::new(sign, out, err), t, terms })
}
