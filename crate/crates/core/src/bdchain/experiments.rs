//! Checks of the evolution equations, the small-time root laws, and the
//! probes showing where stability preservation fails.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{evolve, evolve_exact, evolve_log, LogEvolution, evolve_with, generator, transition, uniformize, BirthDeathRates, EvolvedPGF, TruncatedSemigroup};
use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::par;
use crate::polycore::{falling_factorial_limit, hermite_physics, kummer_x_zeros, real_roots, Complex64Json, RootSolve, UniPoly};
use crate::scalar::{rational_from_f64, Rational, Scalar};
use crate::stability::{is_real_rooted, tstable_approximant_uni, StabilityCertificate, Verdict};
use crate::tolerances::{Tolerances, TRUNCATION, UNIFORMIZATION_TAIL};

/// One time point of an experiment sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TRecord {
    pub t: f64,
    pub roots: Vec<Complex64Json>,
    pub verdict: Verdict,
    pub report_value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub corrected_value: Option<f64>,
}

/// Fourth-order time derivative from samples at `t + i h`, `i ∈ offsets`.
fn time_derivative<F>(t: f64, h: f64, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    let (offsets, weights): (&[f64], &[f64]) = if t >= 2.0 * h {
        (&[-2.0, -1.0, 1.0, 2.0], &[1.0, -8.0, 8.0, -1.0])
    } else {
        (&[0.0, 1.0, 2.0, 3.0, 4.0], &[-25.0, 48.0, -36.0, 16.0, -3.0])
    };
    let samples = par::map(offsets, |&o| f(t + o * h));
    let mut d: Option<Vec<f64>> = None;
    for (s, &w) in samples.into_iter().zip(weights) {
        let s = s?;
        let acc = d.get_or_insert_with(|| vec![0.0; s.len()]);
        for (a, x) in acc.iter_mut().zip(&s) {
            *a += w * x;
        }
    }
    Ok(d.expect("nonempty stencil").into_iter().map(|x| x / (12.0 * h)).collect())
}

fn step_size(t: f64) -> f64 {
    1e-4 * t.max(1.0)
}

/// `|∂_t p_t(j,k) - (β_j p_t(j+1,k) + δ_j p_t(j-1,k) - (β_j+δ_j) p_t(j,k))|`.
pub fn backward_residual(rates: &BirthDeathRates, sg: &TruncatedSemigroup, j: usize, k: usize) -> Result<f64> {
    let n = sg.n;
    if j >= n || k > n {
        return Err(Error::OutOfRange { index: j.max(k), limit: n });
    }
    let gen = generator(rates, n);
    let h = step_size(sg.t);
    let dp = time_derivative(sg.t, h, |tau| {
        let mut e = vec![0.0; n + 1];
        e[j] = 1.0;
        Ok(uniformize(&e, &gen, tau, None, 1e-17, rates.is_pure_death())?.out)
    })?;
    let p = &sg.matrix;
    let mut rhs = gen.entry(j, j) * p[j][k] + gen.entry(j, j + 1) * p[j + 1][k];
    if j > 0 {
        rhs += gen.entry(j, j - 1) * p[j - 1][k];
    }
    Ok((dp[k] - rhs).abs())
}

/// Residual of `∂_t φ = z(1-z) ∂_z² φ` for the chain `δ_k = k(k-1)`.
pub fn wf_residual(mu: &Measure, t: f64, z_samples: &[Complex64]) -> Result<f64> {
    if let Some(z) = z_samples.iter().find(|z| z.norm() > 0.9 + 1e-15) {
        return Err(Error::InvalidParameter(format!("sample {z} outside |z| <= 0.9")));
    }
    let rates = BirthDeathRates::quadratic_death(1.0)?;
    let n = mu.shape[0].max(1);
    let coeffs_at = |tau: f64| -> Result<Vec<f64>> {
        let ev = evolve_with(mu, &rates, tau, TRUNCATION, Some(n))?;
        Ok(ev.coeffs())
    };
    let h = step_size(t);
    let dt = time_derivative(t, h, coeffs_at)?;
    let now = UniPoly::new(coeffs_at(t)?);
    let second = now.nth_derivative(2);
    let dt = UniPoly::new(dt);
    Ok(z_samples
        .iter()
        .map(|&z| (dt.eval_complex(z).value - z * (1.0 - z) * second.eval_complex(z).value).norm())
        .fold(0.0, f64::max))
}

/// `T_t[(x-r)²]` under `δ_k = k(k-1)`, extended linearly to coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub r: f64,
    pub t: f64,
    pub poly: UniPoly<f64>,
    pub certificate: StabilityCertificate,
    pub discriminant: f64,
    pub closed_form_discriminant: f64,
    pub roots: Vec<Complex64Json>,
}

pub fn quadratic_map_counterexample(r: f64, t: f64) -> Result<CounterexampleReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(format!("r = {r} must lie in (0,1)")));
    }
    let rates = BirthDeathRates::quadratic_death(1.0)?;
    let sg = transition(&rates, t, 2, UNIFORMIZATION_TAIL)?;
    // T_t 1 = 1, T_t x = x (δ_1 = 0), T_t x² = p(2,1) x + p(2,2) x²
    let p = &sg.matrix;
    let coeffs = vec![
        r * r * p[0][0] - 2.0 * r * p[1][0] + p[2][0],
        r * r * p[0][1] - 2.0 * r * p[1][1] + p[2][1],
        r * r * p[0][2] - 2.0 * r * p[1][2] + p[2][2],
    ];
    let u = f64::EPSILON;
    let err = vec![8.0 * u * (r * r + 2.0 * r + 1.0) + sg.trunc_error; 3];
    let poly = UniPoly::with_errors(coeffs.clone(), err);
    let certificate = is_real_rooted(&poly);
    let (c, b, a) = (coeffs[0], coeffs[1], coeffs[2]);
    let discriminant = b * b - 4.0 * a * c;
    let e2 = (-2.0 * t).exp();
    let closed_form_discriminant = (1.0 - e2 - 2.0 * r).powi(2) - 4.0 * r * r * e2;
    let roots = <f64 as RootSolve>::root_list(&poly, 0.0, &Tolerances::default())?
        .values()
        .into_iter()
        .map(Into::into)
        .collect();
    Ok(CounterexampleReport { r, t, poly, certificate, discriminant, closed_form_discriminant, roots })
}

/// Verdicts of the approximant `f_{k+2}` of `δ_k e^{tQ}` over a t-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub k: usize,
    pub m: usize,
    pub records: Vec<TRecord>,
}

pub fn birth_monotonicity_probe(rates: &BirthDeathRates, k: usize, t_grid: &[f64]) -> Result<ProbeReport> {
    if !(rates.birth.at(k) > 0.0 && rates.birth.at(k + 1) > 0.0) {
        return Err(Error::InvalidParameter(format!("birth rates at {k} and {} must be positive", k + 1)));
    }
    let m = k + 2;
    let mu = Measure::point_mass(&[k]);
    let records = par::map(t_grid, |&t| -> Result<TRecord> {
        let ev = evolve(&mu, rates, t)?;
        let f = tstable_approximant_uni(&ev.poly, m);
        let cert = is_real_rooted(&f);
        let roots = <f64 as RootSolve>::root_list(&f, 0.0, &Tolerances::default())?.values();
        let report_value = roots.iter().map(|z| z.im.abs() / z.norm().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
        Ok(TRecord {
            t,
            roots: roots.into_iter().map(Into::into).collect(),
            verdict: cert.verdict,
            report_value,
            corrected_value: None,
        })
    });
    Ok(ProbeReport { k, m, records: records.into_iter().collect::<Result<_>>()? })
}

/// Law of the block count started from `n` blocks.
pub fn kingman(n: usize, coalescent: bool, t: f64) -> Result<EvolvedPGF> {
    if n == 0 {
        return Err(Error::InvalidParameter("kingman needs n >= 1".into()));
    }
    evolve(&Measure::point_mass(&[n]), &BirthDeathRates::kingman(coalescent), t)
}

/// [`kingman`] in log-magnitude form, which keeps every coefficient of the
/// degree-`n` law (most underflow in f64) for root certification.
pub fn kingman_log(n: usize, coalescent: bool, t: f64) -> Result<LogEvolution> {
    if n == 0 {
        return Err(Error::InvalidParameter("kingman needs n >= 1".into()));
    }
    evolve_log(&Measure::point_mass(&[n]), &BirthDeathRates::kingman(coalescent), t)
}

/// Lie splitting: alternate exact steps of `(β ≡ b0, δ = d1 k)` and
/// `(δ = d2 k(k-1))`, each of length `t / steps`.
pub fn lie_split_evolve(mu: &Measure, b0: f64, d1: f64, d2: f64, t: f64, steps: usize) -> Result<EvolvedPGF> {
    split_evolve(mu, b0, d1, d2, t, steps, false)
}

/// Strang splitting: half step of the linear chain, full step of the
/// quadratic death chain, half step of the linear chain.
pub fn strang_split_evolve(mu: &Measure, b0: f64, d1: f64, d2: f64, t: f64, steps: usize) -> Result<EvolvedPGF> {
    split_evolve(mu, b0, d1, d2, t, steps, true)
}

fn split_evolve(mu: &Measure, b0: f64, d1: f64, d2: f64, t: f64, steps: usize, strang: bool) -> Result<EvolvedPGF> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let combined = BirthDeathRates::order_two(b0, d1, d2)?;
    let chain1 = BirthDeathRates::linear(b0, d1)?;
    let chain2 = BirthDeathRates::quadratic_death(d2)?;
    // truncation fitted to the combined chain, then doubled for the linear part
    let n = evolve(mu, &combined, t)?.truncation.max(mu.shape[0] + (10.0 + 10.0 * b0 * t).ceil() as usize);
    let h = t / steps as f64;
    let p1 = transition(&chain1, if strang { h / 2.0 } else { h }, n, UNIFORMIZATION_TAIL)?;
    let p2 = transition(&chain2, h, n, UNIFORMIZATION_TAIL)?;
    let apply = |v: &[f64], sg: &TruncatedSemigroup, lost: &mut f64| -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0.0 {
                continue;
            }
            *lost += vj * sg.row_errors[j];
            for (o, p) in out.iter_mut().zip(&sg.matrix[j]) {
                *o += vj * p;
            }
        }
        out
    };
    let mut v = mu.weights.clone();
    v.resize(n + 1, 0.0);
    let mut lost = 0.0;
    for _ in 0..steps {
        v = apply(&v, &p1, &mut lost);
        v = apply(&v, &p2, &mut lost);
        if strang {
            v = apply(&v, &p1, &mut lost);
        }
    }
    let tail_bound = mu.tail_bound + lost;
    let err = v.iter().map(|x| x * 6.0 * f64::EPSILON * steps as f64 + lost).collect();
    Ok(EvolvedPGF { poly: UniPoly::with_errors(v, err), t, tail_bound, escape_bound: tail_bound, truncation: n })
}

/// Small-time root law report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub law: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub w: Option<f64>,
    /// Predicted limits of the rescaled roots, ascending.
    pub predicted: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub corrected_predicted: Option<Vec<f64>>,
    pub records: Vec<TRecord>,
}

impl LawReport {
    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.report_value).collect()
    }

    /// Whether successive report values shrink by at least `ratio`.
    pub fn decreasing(&self, ratio: f64) -> bool {
        self.values().windows(2).all(|w| w[1] < ratio * w[0] || w[0] == 0.0 && w[1] == 0.0)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn exact_real_roots(p: &UniPoly<Rational>) -> Result<(Vec<f64>, bool)> {
    let rl = real_roots(p)?;
    let all_real = rl.all_real();
    let mut v = Vec::new();
    for r in &rl.roots {
        if r.class == crate::polycore::RootClass::Real {
            v.extend(std::iter::repeat_n(r.z().re, r.multiplicity));
        }
    }
    v.sort_by(f64::total_cmp);
    Ok((v, all_real))
}

const LAW_SERIES_TOL: f64 = 1e-80;

/// Roots of `φ(t,·)` near a root `w < 0` of multiplicity `n` in the
/// initial law `∝ (z-w)^n q(z)`, chain `δ_k = k(k-1)`.
///
/// `report_value = max_i |(root_i - w)/√t - 2√(w(w-1)) h_i|` with `h_i` the
/// zeros of the physicists' Hermite polynomial.
pub fn hermite_root_law(w: f64, n: usize, q_roots: &[f64], t_grid: &[f64]) -> Result<LawReport> {
    if !(w < 0.0) || n == 0 {
        return Err(Error::InvalidParameter(format!("need w < 0 and n >= 1, got w={w}, n={n}")));
    }
    let wq = rational_from_f64(w);
    let mut roots: Vec<Rational> = vec![wq.clone(); n];
    roots.extend(q_roots.iter().map(|&r| rational_from_f64(r)));
    let raw = UniPoly::from_roots(&roots);
    let total = raw.eval(&Rational::from_i64(1));
    if total <= Rational::from_i64(0) {
        return Err(Error::InvalidParameter("initial polynomial must be positive at 1".into()));
    }
    let init = raw.scale(&(Rational::from_i64(1) / total));
    if let Some((i, c)) = init.coeffs().iter().enumerate().find(|(_, c)| **c < Rational::from_i64(0)) {
        return Err(Error::NegativeCoefficient { index: i, value: c.to_f64() });
    }
    let scale = 2.0 * (w * (w - 1.0)).sqrt();
    let predicted: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        exact_real_roots(&hermite_physics(n))?.0.into_iter().map(|h| scale * h).collect()
    };
    let rates = BirthDeathRates::quadratic_death(1.0)?;
    let records = par::map(t_grid, |&t| -> Result<TRecord> {
        let ev = evolve_exact(&init, &rates, &rational_from_f64(t), LAW_SERIES_TOL)?;
        let (all, all_real) = exact_real_roots(&ev.poly)?;
        let mut near = all.clone();
        near.sort_by(|a, b| (a - w).abs().total_cmp(&(b - w).abs()));
        near.truncate(n);
        near.sort_by(f64::total_cmp);
        let scaled: Vec<f64> = near.iter().map(|r| (r - w) / t.sqrt()).collect();
        Ok(TRecord {
            t,
            roots: near.iter().map(|&r| Complex64::new(r, 0.0).into()).collect(),
            verdict: if all_real { Verdict::Stable } else { Verdict::Inconclusive },
            report_value: if scaled.len() == n { max_abs_diff(&scaled, &predicted) } else { f64::INFINITY },
            corrected_value: None,
        })
    });
    Ok(LawReport {
        law: "hermite".into(),
        n,
        w: Some(w),
        predicted,
        corrected_predicted: None,
        records: records.into_iter().collect::<Result<_>>()?,
    })
}

/// The `n - 1` nonzero roots of `φ(t,·)` for `φ(0,z) = z^n`, chain
/// `δ_k = k(k-1)`, rescaled by `1/t`.
///
/// `report_value` compares against the x-zeros of `₁F₁[1-n; 1; -1/x]`;
/// `corrected_value` against the zeros of the small-time expansion
/// `Σ_k [n]_k [n-1]_k / k! α^{n-k-1}`.
pub fn kummer_root_law(n: usize, t_grid: &[f64]) -> Result<LawReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("kummer law needs n >= 1".into()));
    }
    let predicted = kummer_x_zeros(n);
    let corrected = if n >= 2 { exact_real_roots(&falling_factorial_limit(n))?.0 } else { vec![] };
    let init = UniPoly::monomial(n, Rational::from_i64(1));
    let rates = BirthDeathRates::quadratic_death(1.0)?;
    let records = par::map(t_grid, |&t| -> Result<TRecord> {
        let ev = evolve_exact(&init, &rates, &rational_from_f64(t), LAW_SERIES_TOL)?;
        // state 1 is absorbing, so z divides φ(t, ·) exactly
        let q = ev.poly.zero_order();
        let reduced = UniPoly::new(ev.poly.coeffs()[q..].to_vec());
        let (roots, all_real) = if reduced.degree().unwrap_or(0) > 0 { exact_real_roots(&reduced)? } else { (vec![], true) };
        let scaled: Vec<f64> = roots.iter().map(|r| r / t).collect();
        let report_value = if scaled.len() == predicted.len() { max_abs_diff(&scaled, &predicted) } else { f64::INFINITY };
        let corrected_value = if scaled.len() == corrected.len() { max_abs_diff(&scaled, &corrected) } else { f64::INFINITY };
        Ok(TRecord {
            t,
            roots: roots.iter().map(|&r| Complex64::new(r, 0.0).into()).collect(),
            verdict: if all_real { Verdict::Stable } else { Verdict::Inconclusive },
            report_value,
            corrected_value: Some(corrected_value),
        })
    });
    Ok(LawReport {
        law: "kummer".into(),
        n,
        w: None,
        predicted,
        corrected_predicted: Some(corrected),
        records: records.into_iter().collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::tv_distance;

    #[test]
    fn backward_residual_examples() {
        let rates = BirthDeathRates::linear(0.0, 1.0).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let sg = transition(&rates, t, 6, 1e-16).unwrap();
            for j in 0..6 {
                for k in 0..=6 {
                    assert!(backward_residual(&rates, &sg, j, k).unwrap() < 1e-6);
                }
            }
        }
        let king = BirthDeathRates::kingman(true);
        let sg = transition(&king, 0.4, 10, 1e-16).unwrap();
        for j in 0..10 {
            for k in 0..=10 {
                assert!(backward_residual(&king, &sg, j, k).unwrap() < 1e-6);
            }
        }
    }

    #[test]
    fn wf_examples() {
        let zs: Vec<Complex64> = (0..20).map(|i| Complex64::from_polar(0.9 * (i as f64 + 1.0) / 20.0, i as f64)).collect();
        assert!(wf_residual(&Measure::point_mass(&[1]), 0.3, &zs).unwrap() < 1e-12);
        assert!(wf_residual(&Measure::point_mass(&[3]), 0.1, &zs).unwrap() < 1e-6);
        assert!(wf_residual(&Measure::point_mass(&[3]), 0.1, &[Complex64::new(0.95, 0.0)]).is_err());
    }

    #[test]
    fn counterexample_examples() {
        let rep = quadratic_map_counterexample(0.5, 0.1).unwrap();
        assert_eq!(rep.certificate.verdict, Verdict::Refuted);
        assert!((rep.discriminant - rep.closed_form_discriminant).abs() < 1e-12);
        let im = (-rep.discriminant).sqrt() / (2.0 * rep.poly.coeff(2));
        assert!(rep.roots.iter().all(|z| (z.im.abs() - im).abs() < 1e-12));
        let rep = quadratic_map_counterexample(0.5, 0.0).unwrap();
        assert_eq!(rep.certificate.verdict, Verdict::Stable);
        assert!(quadratic_map_counterexample(1.5, 0.1).is_err());
    }

    #[test]
    fn kingman_examples() {
        let one = kingman(1, true, 2.0).unwrap();
        assert_eq!(one.coeffs()[1], 1.0);
        let two = kingman(2, true, 0.7).unwrap();
        assert!((two.coeffs()[1] - (1.0 - (-0.7f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn probe_examples() {
        use super::super::RateLaw;
        let grid = [1e-3, 1e-4];
        let flat = BirthDeathRates::new(RateLaw::constant(1.0), RateLaw::zero(), "b=1").unwrap();
        let rep = birth_monotonicity_probe(&flat, 0, &grid).unwrap();
        assert!(rep.records.iter().all(|r| r.verdict != Verdict::Refuted));
        let up = BirthDeathRates::new(RateLaw::Table { values: vec![1.0, 2.0], tail: 1.0 }, RateLaw::zero(), "up").unwrap();
        let rep = birth_monotonicity_probe(&up, 0, &grid).unwrap();
        assert!(rep.records.iter().all(|r| r.verdict == Verdict::Refuted), "{rep:?}");
        let down = BirthDeathRates::new(RateLaw::Table { values: vec![2.0, 1.0], tail: 1.0 }, RateLaw::zero(), "down").unwrap();
        let rep = birth_monotonicity_probe(&down, 0, &grid).unwrap();
        assert!(rep.records.iter().all(|r| r.verdict == Verdict::Stable), "{rep:?}");
    }

    #[test]
    fn hermite_examples() {
        let rep = hermite_root_law(-1.0, 2, &[], &[1e-2, 1e-4, 1e-6]).unwrap();
        assert!(rep.values()[2] < 1e-2, "{:?}", rep.values());
        assert!(rep.decreasing(0.9));
        let one = hermite_root_law(-1.0, 1, &[-3.0], &[1e-2, 1e-4]).unwrap();
        assert!(one.values().iter().all(|v| *v < 1.0));
    }

    #[test]
    fn kummer_examples() {
        let rep = kummer_root_law(2, &[1e-5]).unwrap();
        assert!(rep.records[0].corrected_value.unwrap() < 1e-3);
        assert!(kummer_root_law(1, &[1e-3]).unwrap().records[0].roots.is_empty());
    }

    #[test]
    fn lie_split_examples() {
        let mu = Measure::point_mass(&[3]);
        let exact = evolve(&mu, &BirthDeathRates::order_two(1.0, 1.0, 0.0).unwrap(), 0.4).unwrap();
        let mut prev = f64::INFINITY;
        for steps in [4, 16, 64] {
            let split = lie_split_evolve(&mu, 1.0, 1.0, 0.0, 0.4, steps).unwrap();
            let tv = tv_distance(&split.coeffs(), &exact.coeffs());
            assert!(tv <= prev + 1e-14);
            prev = tv;
        }
        let same = lie_split_evolve(&mu, 1.0, 1.0, 1.0, 0.0, 3).unwrap();
        assert_eq!(same.coeffs()[3], 1.0);
    }

    #[test]
    fn strang_is_second_order() {
        let mu = Measure::point_mass(&[5]);
        let exact = evolve(&mu, &BirthDeathRates::order_two(1.0, 1.0, 1.0).unwrap(), 0.5).unwrap();
        let tv = |s| tv_distance(&strang_split_evolve(&mu, 1.0, 1.0, 1.0, 0.5, s).unwrap().coeffs(), &exact.coeffs());
        let (a, b) = (tv(16), tv(64));
        assert!(a / b > 12.0, "{a} {b}");
    }
}
