//! Particle systems on a finite set of sites: independent per-particle
//! chains with immigration (order-1 reaction-diffusion), their exact PGF
//! transform, a truncated-generator oracle and a Gillespie sampler.

mod gillespie;
mod truncated;

pub use gillespie::{empirical_law, gillespie_batch, gillespie_sample, samples_csv, MAX_EVENTS};
pub use truncated::{truncated_generator_evolve, truncated_generator_evolve_with, PARTICLE_ESCAPE};

use serde::{Deserialize, Serialize};

use crate::bdchain::poisson::log_poisson_weights;
use crate::error::{Error, Result};
use crate::measures::{pgf, poisson_weights, Measure};
use crate::polycore::{AffineForm, MultiPoly};

/// Rates of a particle system on sites `0..n`.
///
/// At configuration `η`: a particle is born at `i` at rate `birth[i]`, each
/// particle at `i` dies at rate `death[i]` and jumps to `j` at rate
/// `jump[i][j]`. `pair_death[i]` adds a death rate `pair_death[i]·η_i(η_i-1)`,
/// which leaves the order-1 class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteSystem {
    pub n: usize,
    pub jump: Vec<Vec<f64>>,
    pub birth: Vec<f64>,
    pub death: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pair_death: Vec<f64>,
}

impl SiteSystem {
    pub fn new(jump: Vec<Vec<f64>>, birth: Vec<f64>, death: Vec<f64>) -> Result<Self> {
        let mut s = Self { n: birth.len(), jump, birth, death, pair_death: vec![] };
        s.normalize()?;
        Ok(s)
    }

    /// Jump rates `η(i) p(i, j)` from a stochastic kernel.
    pub fn from_kernel(eta: &[f64], kernel: Vec<Vec<f64>>, birth: Vec<f64>, death: Vec<f64>) -> Result<Self> {
        if kernel.len() != eta.len() {
            return Err(Error::DimensionMismatch { expected: eta.len(), got: kernel.len() });
        }
        let jump = kernel.into_iter().zip(eta).map(|(row, e)| row.into_iter().map(|p| e * p).collect()).collect();
        Self::new(jump, birth, death)
    }

    pub fn with_pair_death(mut self, pair_death: Vec<f64>) -> Result<Self> {
        self.pair_death = pair_death;
        self.normalize()?;
        Ok(self)
    }

    /// Validates sizes and signs and zeroes the jump diagonal.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.n;
        let sized = |v: &Vec<f64>| v.len() == n;
        if !sized(&self.birth) || !sized(&self.death) || self.jump.len() != n || !self.jump.iter().all(sized) {
            return Err(Error::DimensionMismatch { expected: n, got: self.jump.len() });
        }
        if !self.pair_death.is_empty() && !sized(&self.pair_death) {
            return Err(Error::DimensionMismatch { expected: n, got: self.pair_death.len() });
        }
        let all = self.birth.iter().chain(&self.death).chain(&self.pair_death).chain(self.jump.iter().flatten());
        if let Some(bad) = all.copied().find(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(Error::InvalidParameter(format!("rate {bad} must be finite and >= 0")));
        }
        for i in 0..n {
            self.jump[i][i] = 0.0;
        }
        Ok(())
    }

    pub fn is_order_one(&self) -> bool {
        self.pair_death.iter().all(|c| *c == 0.0)
    }

    pub fn death_rate(&self, i: usize, k: u64) -> f64 {
        let k = k as f64;
        let pair = self.pair_death.get(i).copied().unwrap_or(0.0);
        self.death[i] * k + pair * k * (k - 1.0)
    }

    /// Per-particle generator on the live sites (rows leak the death rate).
    pub fn particle_generator(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                let mut row = self.jump[i].clone();
                row[i] = -self.death[i] - self.jump[i].iter().sum::<f64>();
                row
            })
            .collect()
    }
}

/// Occupation numbers per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub counts: Vec<u64>,
}

impl Configuration {
    pub fn new(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// `f(x)` with `x_i ← p x_j + (1-p) x_i`: one particle's move from `i` to
/// `j` with probability `p`.
pub fn single_jump_transform(f: &MultiPoly<f64>, i: usize, j: usize, p: f64) -> Result<MultiPoly<f64>> {
    let n = f.nvars();
    if i == j {
        return Err(Error::InvalidParameter("jump needs distinct sites".into()));
    }
    if i >= n || j >= n {
        return Err(Error::OutOfRange { index: i.max(j), limit: n });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p}")));
    }
    let mut forms: Vec<AffineForm<f64>> = (0..n).map(|v| AffineForm::var(n, v)).collect();
    forms[i].linear[i] = 1.0 - p;
    forms[i].linear[j] = p;
    f.substitute_affine(&forms)
}

/// Per-particle fate after time `t` and the accumulated immigration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleKernel {
    /// `location[i][j]`: P(alive at `j` | started at `i`).
    pub location: Vec<Vec<f64>>,
    /// P(dead by `t` | started at `i`).
    pub dead: Vec<f64>,
    /// Poisson means of immigrants alive at each site.
    pub lambda: Vec<f64>,
}

/// `exp(t C)` for `C = [[0, bᵀ], [0, A]]`, `A` the per-particle generator:
/// the lower block is the location kernel, the top row `bᵀ∫₀ᵗe^{sA}ds`.
/// Computed by uniformization since `C` has nonnegative off-diagonal part.
pub fn particle_kernel(system: &SiteSystem, t: f64) -> Result<ParticleKernel> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time {t} must be finite and >= 0")));
    }
    let n = system.n;
    let a = system.particle_generator();
    let m = n + 1;
    let mut c = vec![vec![0.0; m]; m];
    for j in 0..n {
        c[0][j + 1] = system.birth[j];
        for k in 0..n {
            c[j + 1][k + 1] = a[j][k];
        }
    }
    let lam = (0..n).map(|i| -a[i][i]).fold(0.0, f64::max).max(1.0);
    let mut e = vec![vec![0.0; m]; m];
    if t == 0.0 {
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = 1.0;
        }
    } else {
        // U = I + C/Λ ≥ 0; rows of e accumulate Σ_k w_k U^k
        let u_mat: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| c[i][j] / lam + if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let weights = log_poisson_weights(lam * t, 0, -80.0, 10_000_000)?;
        let mut power: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        for (k, lw) in weights.lw.iter().enumerate() {
            if k > 0 {
                power = power
                    .iter()
                    .map(|row| (0..m).map(|j| (0..m).map(|l| row[l] * u_mat[l][j]).sum()).collect())
                    .collect();
            }
            let w = lw.exp();
            for i in 0..m {
                for j in 0..m {
                    e[i][j] += w * power[i][j];
                }
            }
        }
    }
    let location: Vec<Vec<f64>> = (0..n).map(|i| e[i + 1][1..].to_vec()).collect();
    let dead = location.iter().map(|row| (1.0 - row.iter().sum::<f64>()).max(0.0)).collect();
    let lambda = e[0][1..].to_vec();
    Ok(ParticleKernel { location, dead, lambda })
}

/// A PGF of the form `f(x) · Π_i e^{λ_i (x_i - 1)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgfTransform {
    pub poly: MultiPoly<f64>,
    pub lambda: Vec<f64>,
}

impl PgfTransform {
    pub fn from_poly(poly: MultiPoly<f64>) -> Self {
        let lambda = vec![0.0; poly.nvars()];
        Self { poly, lambda }
    }

    pub fn from_measure(mu: &Measure) -> Self {
        Self::from_poly(pgf(mu))
    }

    /// Evolves by the order-1 system for time `t`.
    ///
    /// Every particle present moves independently, so each `x_i` becomes
    /// `s_i = dead_i + Σ_j location[i][j] x_j`; the exponential factor maps to
    /// `λ·location` since `s_i - 1 = Σ_j location[i][j](x_j - 1)`.
    pub fn evolve(&self, system: &SiteSystem, t: f64) -> Result<Self> {
        if !system.is_order_one() {
            return Err(Error::InvalidParameter("exact transform needs order-1 rates".into()));
        }
        let n = system.n;
        if self.poly.nvars() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.poly.nvars() });
        }
        let k = particle_kernel(system, t)?;
        let forms: Vec<AffineForm<f64>> = (0..n)
            .map(|i| AffineForm { constant: k.dead[i], linear: k.location[i].clone() })
            .collect();
        let poly = self.poly.substitute_affine(&forms)?;
        let lambda = (0..n)
            .map(|j| k.lambda[j] + (0..n).map(|i| self.lambda[i] * k.location[i][j]).sum::<f64>())
            .collect();
        Ok(Self { poly, lambda })
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let f = self.poly.eval(x)?;
        let e: f64 = self.lambda.iter().zip(x).map(|(l, xi)| l * (xi - 1.0)).sum();
        Ok(f * e.exp())
    }

    /// Coefficients on the box `shape`; mass outside becomes the tail bound.
    pub fn to_measure(&self, shape: &[usize]) -> Result<Measure> {
        let n = self.poly.nvars();
        if shape.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: shape.len() });
        }
        let len: usize = shape.iter().map(|s| s + 1).product();
        let mut mu = Measure { shape: shape.to_vec(), weights: vec![0.0; len], tail_bound: 0.0 };
        let mut outside = 0.0;
        for (alpha, &c) in self.poly.terms() {
            let idx: Vec<usize> = alpha.iter().map(|&a| a as usize).collect();
            match mu.flat_of(&idx).filter(|_| idx.iter().zip(shape).all(|(a, s)| a <= s)) {
                Some(f) => mu.weights[f] += c,
                None => outside += c.abs(),
            }
        }
        for (v, &l) in self.lambda.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let (pw, _) = poisson_weights(l, shape[v])?;
            let mut next = vec![0.0; len];
            for (flat, &w) in mu.weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let mut idx = mu.index_of(flat);
                let base = idx[v];
                for (k, p) in pw.iter().enumerate().take(shape[v] - base + 1) {
                    idx[v] = base + k;
                    next[mu.flat_of(&idx).expect("inside box")] += w * p;
                }
            }
            mu.weights = next;
        }
        let inside: f64 = mu.weights.iter().sum();
        let slack = 1e-13 + 8.0 * f64::EPSILON * len as f64;
        mu.tail_bound = (1.0 - inside).max(0.0).max(outside) + slack;
        Measure::new(mu.shape, mu.weights, mu.tail_bound)
    }
}

/// `f(s_1(t), …, s_n(t)) · Π e^{λ_i(t)(x_i - 1)}` for an order-1 system.
pub fn exact_pgf_transform(f: &MultiPoly<f64>, system: &SiteSystem, t: f64) -> Result<PgfTransform> {
    PgfTransform::from_poly(f.clone()).evolve(system, t)
}
