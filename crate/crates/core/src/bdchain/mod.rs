//! Birth-death chains on ℕ: truncated generators, uniformized semigroups
//! and the evolution of generating functions.

mod exact;
mod logspace;
pub(crate) mod poisson;
mod experiments;
mod tracking;

pub use exact::{evolve_exact, ExactEvolution};
pub use logspace::{evolve_log, LogEvolution};
pub use experiments::{
    backward_residual, birth_monotonicity_probe, hermite_root_law, kingman, kingman_log, kummer_root_law,
    lie_split_evolve, quadratic_map_counterexample, strang_split_evolve, wf_residual, CounterexampleReport, LawReport,
    ProbeReport, TRecord,
};
pub use tracking::{match_roots, trajectories_csv};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::par;
use crate::polycore::UniPoly;
use crate::tolerances::{TRUNCATION, UNIFORMIZATION_TAIL};
use poisson::log_poisson_weights;

/// A rate sequence `k ↦ r_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateLaw {
    /// `c[0] + c[1] k + c[2] k²`.
    Polynomial { c: [f64; 3] },
    /// `values[k]` for listed `k`, `tail` beyond.
    Table { values: Vec<f64>, tail: f64 },
}

impl RateLaw {
    pub fn zero() -> Self {
        RateLaw::Polynomial { c: [0.0; 3] }
    }

    pub fn constant(b: f64) -> Self {
        RateLaw::Polynomial { c: [b, 0.0, 0.0] }
    }

    pub fn at(&self, k: usize) -> f64 {
        match self {
            RateLaw::Polynomial { c } => {
                let k = k as f64;
                c[0] + k * (c[1] + k * c[2])
            }
            RateLaw::Table { values, tail } => values.get(k).copied().unwrap_or(*tail),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RateLaw::Polynomial { c } => c.iter().all(|&x| x == 0.0),
            RateLaw::Table { values, tail } => *tail == 0.0 && values.iter().all(|&x| x == 0.0),
        }
    }

    /// Checks nonnegativity on every `k` (finitely many checks suffice).
    fn validate(&self, what: &str) -> Result<()> {
        let bad = |k: usize, v: f64| Error::InvalidParameter(format!("{what} rate {v} at k = {k}"));
        match self {
            RateLaw::Polynomial { c } => {
                if c.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter(format!("{what} rate coefficients not finite")));
                }
                let eventually_ok = c[2] > 0.0 || (c[2] == 0.0 && (c[1] > 0.0 || (c[1] == 0.0 && c[0] >= 0.0)));
                if !eventually_ok {
                    return Err(Error::InvalidParameter(format!("{what} rate negative for large k")));
                }
                // the minimum over integers lies left of the vertex plus one
                let vertex = if c[2] > 0.0 { (-c[1] / (2.0 * c[2])).max(0.0) } else { 0.0 };
                let top = vertex.ceil() as usize + 2;
                for k in 0..=top.min(1 << 20) {
                    let v = self.at(k);
                    if v < 0.0 {
                        return Err(bad(k, v));
                    }
                }
            }
            RateLaw::Table { values, tail } => {
                for (k, &v) in values.iter().enumerate() {
                    if !(v >= 0.0) || !v.is_finite() {
                        return Err(bad(k, v));
                    }
                }
                if !(*tail >= 0.0) || !tail.is_finite() {
                    return Err(bad(values.len(), *tail));
                }
            }
        }
        Ok(())
    }
}

/// Up-rates `β_k` and down-rates `δ_k`, with `δ_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthDeathRates {
    pub birth: RateLaw,
    pub death: RateLaw,
    pub tag: String,
}

impl BirthDeathRates {
    pub fn new(birth: RateLaw, death: RateLaw, tag: impl Into<String>) -> Result<Self> {
        birth.validate("birth")?;
        death.validate("death")?;
        if death.at(0) != 0.0 {
            return Err(Error::InvalidParameter(format!("death rate at 0 must vanish, got {}", death.at(0))));
        }
        Ok(Self { birth, death, tag: tag.into() })
    }

    /// `β_k = b0 + b1 k + b2 k²`, `δ_k = d1 k + d2 k²`.
    pub fn polynomial(b: [f64; 3], d1: f64, d2: f64) -> Result<Self> {
        Self::new(
            RateLaw::Polynomial { c: b },
            RateLaw::Polynomial { c: [0.0, d1, d2] },
            format!("birth {}+{}k+{}k^2, death {}k+{}k^2", b[0], b[1], b[2], d1, d2),
        )
    }

    /// Constant birth `b0`, death `d1 k + d2 k(k-1)`.
    pub fn order_two(b0: f64, d1: f64, d2: f64) -> Result<Self> {
        Self::new(
            RateLaw::constant(b0),
            RateLaw::Polynomial { c: [0.0, d1 - d2, d2] },
            format!("constant-birth {b0}, death {d1}k + {d2}k(k-1)"),
        )
    }

    /// Immigration-death chain `β ≡ b`, `δ_k = d k`.
    pub fn linear(b: f64, d: f64) -> Result<Self> {
        Self::order_two(b, d, 0.0)
    }

    /// Pure death `δ_k = c k(k-1)`.
    pub fn quadratic_death(c: f64) -> Result<Self> {
        Self::order_two(0.0, 0.0, c)
    }

    /// Block-counting chain: `δ_k = k(k-1)/2` if `coalescent`, else `k(k-1)`.
    pub fn kingman(coalescent: bool) -> Self {
        Self::quadratic_death(if coalescent { 0.5 } else { 1.0 }).expect("valid rates")
    }

    /// `β_k = n - k` up to `n`, `δ_k = k`.
    pub fn ehrenfest(n: usize) -> Result<Self> {
        let values = (0..=n).map(|k| (n - k) as f64).collect();
        Self::new(
            RateLaw::Table { values, tail: 0.0 },
            RateLaw::Polynomial { c: [0.0, 1.0, 0.0] },
            format!("ehrenfest n={n}"),
        )
    }

    pub fn is_pure_death(&self) -> bool {
        self.birth.is_zero()
    }
}

/// Tridiagonal generator on `{0..=n}`; `β_n` is clamped to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub n: usize,
    pub birth: Vec<f64>,
    pub death: Vec<f64>,
    /// Whether a positive `β_n` was dropped at the boundary.
    pub clamped: bool,
}

impl Generator {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            -(self.birth[i] + self.death[i])
        } else if j == i + 1 {
            self.birth[i]
        } else if j + 1 == i {
            self.death[i]
        } else {
            0.0
        }
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        (0..=self.n).map(|i| (0..=self.n).map(|j| self.entry(i, j)).collect()).collect()
    }

    pub fn max_exit_rate(&self) -> f64 {
        self.birth.iter().zip(&self.death).map(|(b, d)| b + d).fold(0.0, f64::max)
    }

    /// Same chain with state `n` made absorbing.
    fn absorbing(&self) -> Self {
        let mut g = self.clone();
        g.death[self.n] = 0.0;
        g
    }

    /// `out = v U` with `U = I + Q/Λ`.
    fn step(&self, v: &[f64], lambda: f64, out: &mut [f64]) {
        let n = self.n;
        for k in 0..=n {
            let mut s = v[k] * (1.0 - (self.birth[k] + self.death[k]) / lambda);
            if k > 0 {
                s += v[k - 1] * (self.birth[k - 1] / lambda);
            }
            if k < n {
                s += v[k + 1] * (self.death[k + 1] / lambda);
            }
            out[k] = s;
        }
    }
}

pub fn generator(rates: &BirthDeathRates, n: usize) -> Generator {
    let mut birth: Vec<f64> = (0..=n).map(|k| rates.birth.at(k)).collect();
    let death: Vec<f64> = (0..=n).map(|k| rates.death.at(k)).collect();
    let clamped = birth[n] > 0.0;
    birth[n] = 0.0;
    Generator { n, birth, death, clamped }
}

/// Result of `v e^{tQ}` by uniformization.
#[derive(Debug, Clone)]
pub(crate) struct Uniformized {
    pub out: Vec<f64>,
    /// Mass of the neglected Poisson terms.
    pub poisson_tail: f64,
    /// Bound on mass lost to rounding across all terms.
    pub rounding: f64,
    /// Per-entry error bounds.
    pub err: Vec<f64>,
}

const MAX_TERMS: usize = 10_000_000;

/// `v e^{tQ}` as the Poisson(Λt) mixture of `v U^j`.
///
/// Terms run at least to `j = n + 10` so that small probabilities keep
/// relative accuracy; every summand is nonnegative.
pub(crate) fn uniformize(
    v: &[f64],
    gen: &Generator,
    t: f64,
    lambda: Option<f64>,
    tail_tol: f64,
    monotone: bool,
) -> Result<Uniformized> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time {t} must be finite and >= 0")));
    }
    if v.len() != gen.n + 1 {
        return Err(Error::DimensionMismatch { expected: gen.n + 1, got: v.len() });
    }
    let lam_min = gen.max_exit_rate();
    let lam = lambda.unwrap_or(lam_min).max(lam_min);
    let u = f64::EPSILON / 2.0;
    if lam == 0.0 || t == 0.0 {
        let err = v.iter().map(|x| x.abs() * u).collect();
        return Ok(Uniformized { out: v.to_vec(), poisson_tail: 0.0, rounding: 0.0, err });
    }
    let weights = log_poisson_weights(lam * t, gen.n + 10, tail_tol.ln(), MAX_TERMS)?;
    let mut cur = v.to_vec();
    let mut next = vec![0.0; v.len()];
    let mut out = vec![0.0; v.len()];
    for (j, lw) in weights.lw.iter().enumerate() {
        if j > 0 {
            gen.step(&cur, lam, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        let w = lw.exp();
        if w > 0.0 {
            for (o, c) in out.iter_mut().zip(&cur) {
                *o += w * c;
            }
        }
    }
    let tail = weights.tail();
    let terms = weights.lw.len();
    // per term: the step costs ≤ 7u relative mass, accumulation ≤ 2u more
    let scale = (terms + 2) as f64 * 10.0 * u + weights.rel_visible;
    // absolute floor for entries that went subnormal
    let denorm = (terms + 2) as f64 * f64::from_bits(1);
    let err = if monotone {
        // pure death: later terms can only move mass downward
        let mut g = 0.0;
        let mut err = vec![0.0; out.len()];
        for k in (0..out.len()).rev() {
            g += out[k];
            err[k] = out[k] * scale + tail * g / (1.0 - tail) + denorm;
        }
        err
    } else {
        out.iter().map(|c| c * scale + tail + denorm).collect()
    };
    let rounding = scale * out.iter().map(|x| x.abs()).sum::<f64>();
    Ok(Uniformized { out, poisson_tail: tail, rounding, err })
}

/// Transition probabilities on `{0..=n}` at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSemigroup {
    pub n: usize,
    pub t: f64,
    /// Row `j` is the law at time `t` started from `j`.
    pub matrix: Vec<Vec<f64>>,
    /// Per-row bound on mass lost to the boundary or the series cut.
    pub row_errors: Vec<f64>,
    pub trunc_error: f64,
}

impl TruncatedSemigroup {
    pub fn p(&self, j: usize, k: usize) -> f64 {
        self.matrix[j][k]
    }
}

pub fn transition(rates: &BirthDeathRates, t: f64, n: usize, tol: f64) -> Result<TruncatedSemigroup> {
    transition_with_lambda(rates, t, n, tol, None)
}

/// As [`transition`] with an explicit uniformization rate (raised to the
/// minimum if too small).
pub fn transition_with_lambda(
    rates: &BirthDeathRates,
    t: f64,
    n: usize,
    tol: f64,
    lambda: Option<f64>,
) -> Result<TruncatedSemigroup> {
    if n == 0 {
        return Err(Error::InvalidParameter("truncation level must be >= 1".into()));
    }
    let gen = generator(rates, n);
    let absorbing = gen.absorbing();
    let pure = rates.is_pure_death();
    let rows = par::map_range(n + 1, |j| -> Result<(Vec<f64>, f64)> {
        let mut e = vec![0.0; n + 1];
        e[j] = 1.0;
        let main = uniformize(&e, &gen, t, lambda, tol, pure)?;
        let mut bound = main.poisson_tail;
        if gen.clamped {
            let esc = uniformize(&e, &absorbing, t, lambda, tol, false)?;
            bound += esc.out[n] + esc.poisson_tail;
        }
        Ok((main.out, bound))
    });
    let mut matrix = Vec::with_capacity(n + 1);
    let mut row_errors = Vec::with_capacity(n + 1);
    for r in rows {
        let (row, e) = r?;
        matrix.push(row);
        row_errors.push(e);
    }
    let trunc_error = row_errors.iter().copied().fold(0.0, f64::max);
    Ok(TruncatedSemigroup { n, t, matrix, row_errors, trunc_error })
}

/// The law `φ(t, ·)` of the chain at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolvedPGF {
    pub poly: UniPoly<f64>,
    pub t: f64,
    /// Total mass possibly missing from `poly`.
    pub tail_bound: f64,
    /// Part of `tail_bound` that may sit beyond the truncation level.
    pub escape_bound: f64,
    pub truncation: usize,
}

impl EvolvedPGF {
    pub fn coeffs(&self) -> Vec<f64> {
        let mut c = self.poly.coeffs().to_vec();
        c.resize(self.truncation + 1, 0.0);
        c
    }

    pub fn to_measure(&self) -> Result<Measure> {
        Measure::univariate(self.coeffs(), self.tail_bound)
    }
}

const MAX_TRUNCATION: usize = 1 << 16;

pub fn evolve(mu: &Measure, rates: &BirthDeathRates, t: f64) -> Result<EvolvedPGF> {
    evolve_with(mu, rates, t, TRUNCATION, None)
}

/// [`evolve`] with an explicit escape tolerance and optional starting
/// truncation level.
pub fn evolve_with(
    mu: &Measure,
    rates: &BirthDeathRates,
    t: f64,
    tol: f64,
    start: Option<usize>,
) -> Result<EvolvedPGF> {
    if mu.nvars() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: mu.nvars() });
    }
    let support = mu.shape[0];
    let pure = rates.is_pure_death();
    let mut n = if pure {
        support.max(1)
    } else {
        let b = rates.birth.at(support).max(rates.birth.at(0));
        support + (10.0 + 5.0 * b * t).ceil() as usize
    };
    if let Some(s) = start {
        n = n.max(s);
    }
    loop {
        let gen = generator(rates, n);
        let mut v = mu.weights.clone();
        v.resize(n + 1, 0.0);
        let main = uniformize(&v, &gen, t, None, UNIFORMIZATION_TAIL, pure)?;
        let escape = if gen.clamped {
            let esc = uniformize(&v, &gen.absorbing(), t, None, UNIFORMIZATION_TAIL, false)?;
            esc.out[n] + esc.poisson_tail
        } else {
            0.0
        };
        if escape <= tol || pure {
            let escape_bound = mu.tail_bound + escape;
            let mut err = main.err;
            for e in err.iter_mut() {
                *e += escape;
            }
            return Ok(EvolvedPGF {
                poly: UniPoly::with_errors(main.out, err),
                t,
                tail_bound: escape_bound + main.poisson_tail + main.rounding,
                escape_bound,
                truncation: n,
            });
        }
        if n >= MAX_TRUNCATION {
            return Err(Error::TruncationCap { level: n, escaped: escape });
        }
        n = (2 * n).min(MAX_TRUNCATION);
    }
}
