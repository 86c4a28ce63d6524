//! Poisson(x) mixing weights for uniformization, in log form.

use crate::error::{Error, Result};

/// Normalized `ln w_j` for `j = 0..=J` and the bound on the mass past `J`.
#[derive(Debug, Clone)]
pub(crate) struct LogWeights {
    pub lw: Vec<f64>,
    /// `ln` of an upper bound on `Σ_{j>J} w_j`.
    pub log_tail: f64,
    /// Relative error bound for weights with `ln w_j > -745` (those visible
    /// in f64).
    pub rel_visible: f64,
    /// Relative error bound over all weights.
    pub rel_all: f64,
}

impl LogWeights {
    pub fn tail(&self) -> f64 {
        self.log_tail.exp()
    }
}

/// Compensated running sum.
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Weights from the mode outward, so that log magnitudes only grow away
/// from it, stopping at the first `J ≥ min_terms` past the mode whose tail
/// bound is at most `exp(log_tol)`.
pub(crate) fn log_poisson_weights(x: f64, min_terms: usize, log_tol: f64, max_terms: usize) -> Result<LogWeights> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("poisson mean {x}")));
    }
    let u = f64::EPSILON / 2.0;
    let ln_x = x.ln();
    let mode = x.floor() as usize;
    if mode > max_terms {
        return Err(Error::ToleranceUnreachable { tol: log_tol.exp(), cap: max_terms });
    }
    let mut lw = vec![0.0; mode + 1];
    let mut acc = Neumaier { sum: 0.0, c: 0.0 };
    for j in (0..mode).rev() {
        acc.add(((j + 1) as f64).ln() - ln_x);
        lw[j] = acc.value();
    }
    let mut acc = Neumaier { sum: 0.0, c: 0.0 };
    let mut j = mode;
    let log_tail = loop {
        let r = x / (j + 2) as f64;
        if j >= min_terms && r < 1.0 {
            // Σ_{i>j} w_i ≤ w_{j+1} / (1 - r)
            let bound = lw[j] + ln_x - ((j + 1) as f64).ln() - (1.0 - r).ln();
            if bound <= log_tol {
                break bound;
            }
        }
        if j >= max_terms {
            return Err(Error::ToleranceUnreachable { tol: log_tol.exp(), cap: max_terms });
        }
        acc.add(ln_x - ((j + 1) as f64).ln());
        lw.push(acc.value());
        j += 1;
    };
    let mut total = Neumaier { sum: 0.0, c: 0.0 };
    for l in &lw {
        total.add(l.exp());
    }
    let ln_s = total.value().ln();
    for l in lw.iter_mut() {
        *l -= ln_s;
    }
    let log_tail = log_tail - ln_s;
    let terms = lw.len() as f64;
    // per weight: each ln term is off by ~u ln(j), the compensated sum by
    // 2u|ln w|, the exp by u|ln w|; normalization by terms*u
    let base = terms * u * (ln_x.abs() + terms.ln() + 4.0) + 2.0 * terms * u;
    let rel_for = |l: f64| base + 4.0 * u * (l.abs() + 1.0);
    let rel_visible = rel_for(745.0_f64.min(lw.iter().fold(0.0, |m, l| m.max(l.abs()))));
    let rel_all = rel_for(lw.iter().fold(0.0, |m, l| m.max(l.abs())));
    Ok(LogWeights { lw, log_tail, rel_visible: rel_visible + log_tail.exp(), rel_all: rel_all + log_tail.exp() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_to_one() {
        for x in [0.3, 5.0, 480.0, 39_900.0] {
            let w = log_poisson_weights(x, 0, -40.0, 10_000_000).unwrap();
            let s: f64 = w.lw.iter().map(|l| l.exp()).sum();
            assert!((s - 1.0).abs() < 1e-13, "{x}: {s}");
            assert!(w.tail() < 1e-17);
            assert!(w.rel_visible < 1e-9);
        }
    }

    #[test]
    fn matches_direct_formula() {
        let x: f64 = 7.5;
        let w = log_poisson_weights(x, 30, -40.0, 1000).unwrap();
        assert!(w.lw.len() > 31);
        let mut lf = 0.0;
        for (j, l) in w.lw.iter().enumerate() {
            if j > 0 {
                lf += (j as f64).ln();
            }
            let direct = -x + j as f64 * x.ln() - lf;
            assert!((l - direct).abs() < 1e-12, "{j}");
        }
    }
}
