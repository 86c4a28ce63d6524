//! Root finding with per-root perturbation radii.
//!
//! Float polynomials go through Aberth–Ehrlich simultaneous iteration
//! seeded from the Newton polygon. Each computed root `z` then gets a
//! radius bounding how far a root can sit from `z` given the residual,
//! the rounding of the evaluation and the stored coefficient errors:
//! with `b_m` the Taylor coefficients of `p(z(1+y))` and `E` the total
//! perturbation, the radius is `2|z| min_m (E/|b_m|)^(1/m)`, which tracks
//! both simple roots (m = 1) and clusters (m > 1).
//!
//! Exact rational polynomials are certified in [`super::sturm`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sturm;
use super::unipoly::{gamma, UniPoly};
use crate::error::{Error, Result};
use crate::par;
use crate::scalar::{Rational, Scalar};
use crate::tolerances::Tolerances;

/// Degree cap of the float solver (binomial tables stay finite below it).
pub const MAX_FLOAT_DEGREE: usize = 1000;
const MAX_ITERATIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    /// Within the perturbation radius of the real axis.
    Real,
    /// Certainly off the real axis, even allowing for truncated tails.
    NonReal,
    /// Neither of the above at the working tolerance.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: Complex64Json,
    /// Perturbation radius from rounding and coefficient errors.
    pub radius: f64,
    /// Radius that also accounts for a truncated tail (infinite when the
    /// tail cannot be controlled at this root).
    pub tail_radius: f64,
    pub multiplicity: usize,
    /// Exact isolating interval for certified real roots.
    pub interval: Option<(f64, f64)>,
    pub class: RootClass,
}

/// Serializable complex number, `{re, im}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex64Json {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex64Json {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Complex64Json> for Complex64 {
    fn from(z: Complex64Json) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl Root {
    pub fn z(&self) -> Complex64 {
        self.value.into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootList {
    pub roots: Vec<Root>,
    /// Roots (with multiplicity) classified real.
    pub certified_real_count: usize,
    pub degree: usize,
    pub exact: bool,
}

impl RootList {
    /// All roots expanded by multiplicity.
    pub fn values(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.z(), r.multiplicity))
            .collect()
    }

    pub fn all_real(&self) -> bool {
        self.certified_real_count == self.degree
    }

    pub fn any_non_real(&self) -> bool {
        self.roots.iter().any(|r| r.class == RootClass::NonReal)
    }

    /// Real parts of the real roots, sorted ascending, with multiplicity.
    pub fn real_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .roots
            .iter()
            .filter(|r| r.class == RootClass::Real)
            .flat_map(|r| std::iter::repeat_n(r.value.re, r.multiplicity))
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Fields whose polynomials can be root-analyzed.
pub trait RootSolve: Scalar {
    /// Roots of `p`; `tail` bounds the l1 mass of coefficients truncated
    /// beyond the degree.
    fn root_list(p: &UniPoly<Self>, tail: f64, tol: &Tolerances) -> Result<RootList>;
}

impl RootSolve for f64 {
    fn root_list(p: &UniPoly<f64>, tail: f64, tol: &Tolerances) -> Result<RootList> {
        float_roots(p, tail, tol)
    }
}

impl RootSolve for Rational {
    fn root_list(p: &UniPoly<Rational>, tail: f64, tol: &Tolerances) -> Result<RootList> {
        sturm::exact_roots(p, tail, tol)
    }
}

/// Roots of `p` with default tolerances and no truncated tail.
pub fn real_roots<T: RootSolve>(p: &UniPoly<T>) -> Result<RootList> {
    T::root_list(p, 0.0, &Tolerances::default())
}

pub(crate) fn classify(z: Complex64, radius: f64, tail_radius: f64, tol: &Tolerances) -> RootClass {
    let floor = tol.imag_rel * z.norm().max(1.0);
    let im = z.im.abs();
    if im <= floor.max(radius) {
        RootClass::Real
    } else if im > tol.refute_margin * floor.max(tail_radius) {
        RootClass::NonReal
    } else {
        RootClass::Undetermined
    }
}

/// Real polynomial stored as signs and log-magnitudes, so coefficients far
/// outside the f64 range keep full relative precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPoly {
    /// `-1`, `0` or `1` per coefficient.
    pub sign: Vec<f64>,
    /// `ln |a_k|` (`-inf` for zero).
    pub log_abs: Vec<f64>,
    /// `ln` of the absolute error bound of `a_k` (`-inf` for none).
    pub log_err: Vec<f64>,
}

impl LogPoly {
    pub fn from_unipoly(p: &UniPoly<f64>) -> Self {
        let a = p.coeffs();
        Self {
            sign: a.iter().map(|c| if *c == 0.0 { 0.0 } else { c.signum() }).collect(),
            log_abs: a.iter().map(|c| c.abs().ln()).collect(),
            log_err: p.errors().iter().map(|e| e.ln()).collect(),
        }
    }

    /// Drops trailing zero coefficients.
    pub fn new(sign: Vec<f64>, log_abs: Vec<f64>, log_err: Vec<f64>) -> Self {
        let mut p = Self { sign, log_abs, log_err };
        while p.sign.last() == Some(&0.0) {
            p.sign.pop();
            p.log_abs.pop();
            p.log_err.pop();
        }
        p
    }

    pub fn degree(&self) -> Option<usize> {
        self.sign.len().checked_sub(1)
    }

    pub fn zero_order(&self) -> usize {
        self.sign.iter().take_while(|s| **s == 0.0).count()
    }

    fn shifted(&self, q: usize) -> Self {
        Self { sign: self.sign[q..].to_vec(), log_abs: self.log_abs[q..].to_vec(), log_err: self.log_err[q..].to_vec() }
    }

    /// Plain f64 coefficients when every magnitude is comfortably in range.
    fn as_f64(&self) -> Option<Vec<f64>> {
        let (lo, hi) = self
            .log_abs
            .iter()
            .zip(&self.sign)
            .filter(|(_, s)| **s != 0.0)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (l, _)| (lo.min(*l), hi.max(*l)));
        (lo > -600.0 && hi < 600.0 && hi - lo < 460.0)
            .then(|| self.sign.iter().zip(&self.log_abs).map(|(s, l)| s * l.exp()).collect())
    }
}

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Coefficient access shared by the Horner and scaled evaluators.
struct Coeffs<'a> {
    poly: &'a LogPoly,
    plain: Option<Vec<f64>>,
}

impl Coeffs<'_> {
    fn n(&self) -> usize {
        self.poly.sign.len() - 1
    }

    /// `p(z)/p'(z)` and whether `|p(z)|` is at the rounding level.
    fn newton_ratio(&self, z: Complex64) -> (Complex64, bool) {
        match &self.plain {
            Some(a) if z.norm() <= 1.0 || z.norm().ln() * self.n() as f64 <= 600.0 => newton_ratio(a, z),
            _ => self.newton_ratio_scaled(z),
        }
    }

    /// Every term scaled by the largest `|a_k z^k|`.
    fn newton_ratio_scaled(&self, z: Complex64) -> (Complex64, bool) {
        let n = self.n();
        let g = gamma(4 * n + 2);
        if z.norm() == 0.0 {
            let p = &self.poly;
            let a0 = p.sign[0] * p.log_abs[0].exp();
            let a1 = if n >= 1 { p.sign[1] * p.log_abs[1].exp() } else { 0.0 };
            return (safe_div(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0)), a0 == 0.0);
        }
        let lz = z.norm().ln();
        let arg = z.arg();
        let p = &self.poly;
        let m = (0..=n).map(|k| p.log_abs[k] + k as f64 * lz).fold(f64::NEG_INFINITY, f64::max);
        let mut val = Complex64::new(0.0, 0.0);
        let mut zdp = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for k in 0..=n {
            if p.sign[k] == 0.0 {
                continue;
            }
            let mag = (p.log_abs[k] + k as f64 * lz - m).exp();
            let term = Complex64::from_polar(mag, k as f64 * arg) * p.sign[k];
            val += term;
            zdp += term * k as f64;
            abs += mag;
        }
        let small = val.norm() <= g * abs;
        (safe_div(z * val, zdp), small)
    }
}

fn newton_ratio(a: &[f64], z: Complex64) -> (Complex64, bool) {
    let n = a.len() - 1;
    let g = gamma(4 * n + 2);
    if z.norm() <= 1.0 {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        let r = z.norm();
        for &c in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            abs = abs * r + c.abs();
        }
        let small = p.norm() <= g * abs;
        (safe_div(p, dp), small)
    } else {
        let y = z.inv();
        let ry = y.norm();
        let mut r = Complex64::new(0.0, 0.0);
        let mut dr = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for &c in a {
            dr = dr * y + r;
            r = r * y + c;
            abs = abs * ry + c.abs();
        }
        let small = r.norm() <= g * abs;
        let denom = r * n as f64 - y * dr;
        (safe_div(z * r, denom), small)
    }
}

fn safe_div(num: Complex64, den: Complex64) -> Complex64 {
    if den.norm() == 0.0 {
        if num.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            num * 1e-3 / num.norm()
        }
    } else {
        num / den
    }
}

/// Initial guesses on circles whose radii come from the upper convex hull
/// of `(k, ln|a_k|)`.
fn newton_polygon_guesses(logs: &[f64]) -> Vec<Complex64> {
    let n = logs.len() - 1;
    let pts: Vec<(usize, f64)> = logs.iter().copied().enumerate().filter(|(_, l)| l.is_finite()).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - x1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut guesses = Vec::with_capacity(n);
    let sigma = 0.7;
    for w in hull.windows(2) {
        let ((i, li), (j, lj)) = (w[0], w[1]);
        let count = j - i;
        let radius = ((li - lj) / count as f64).exp();
        for m in 0..count {
            let angle = std::f64::consts::TAU * (m as f64 / count as f64)
                + std::f64::consts::TAU * i as f64 / n as f64
                + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

fn aberth(c: &Coeffs) -> Vec<Complex64> {
    let n = c.n();
    let mut z = newton_polygon_guesses(&c.poly.log_abs);
    let mut done = vec![false; n];
    let u = f64::EPSILON / 2.0;
    for _ in 0..MAX_ITERATIONS {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            all = false;
            let (ratio, small) = c.newton_ratio(z[i]);
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += d.inv();
                    }
                }
            }
            let w = safe_div(ratio, Complex64::new(1.0, 0.0) - ratio * s);
            if small {
                done[i] = true;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * u * z[i].norm() || !w.is_finite() {
                done[i] = true;
            }
        }
        if all {
            break;
        }
    }
    z
}

fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n + 1]; n + 1];
    for k in 0..=n {
        t[k][0] = 1.0;
        for m in 1..=k {
            t[k][m] = t[k - 1][m - 1] + if m < k { t[k - 1][m] } else { 0.0 };
        }
    }
    t
}

/// Log of the perturbation a truncated tail of l1 mass `tail` can cause
/// at modulus `r`; `tail_degree` bounds the degrees it may occupy.
fn log_tail_effect(tail: f64, tail_degree: Option<usize>, r: f64) -> f64 {
    if tail <= 0.0 {
        f64::NEG_INFINITY
    } else if r <= 1.0 {
        tail.ln()
    } else {
        match tail_degree {
            Some(d) => tail.ln() + d as f64 * r.ln(),
            None => f64::INFINITY,
        }
    }
}

/// `(radius, tail_radius)` around a computed root `z` of the polynomial
/// (in the full, undeflated coefficients).
fn perturbation_radius(p: &LogPoly, tail: f64, tail_degree: Option<usize>, binom: &[Vec<f64>], z: Complex64) -> (f64, f64) {
    let n = p.sign.len() - 1;
    let lg = gamma(4 * n + 2).ln();
    let log_e = |k: usize| log_add(p.log_err[k], lg + p.log_abs[k]);
    if z.norm() == 0.0 {
        let le = log_add(log_e(0), p.log_abs[0]);
        let lt = log_add(le, log_tail_effect(tail, tail_degree, 0.0));
        let radius_for = |le: f64| {
            (1..=n)
                .filter(|&m| p.sign[m] != 0.0)
                .map(|m| ((binom[n][m].ln() + le - p.log_abs[m]) / m as f64).exp())
                .fold(f64::INFINITY, f64::min)
        };
        return (radius_for(le), radius_for(lt));
    }
    let r = z.norm();
    let lz = r.ln();
    let unit = z / r;
    let mut m_log = f64::NEG_INFINITY;
    let mut logs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let la = p.log_abs[k] + k as f64 * lz;
        let le = log_e(k) + k as f64 * lz;
        m_log = m_log.max(la).max(le);
        logs.push((la, le));
    }
    let mut phase = Complex64::new(1.0, 0.0);
    let mut s = Vec::with_capacity(n + 1);
    let mut e_scaled = 0.0;
    for (k, &(la, le)) in logs.iter().enumerate() {
        s.push(phase * (p.sign[k] * (la - m_log).exp()));
        e_scaled += (le - m_log).exp();
        phase *= unit;
    }
    let b0: Complex64 = s.iter().sum();
    let e_total = e_scaled + b0.norm();
    let tail_term = (log_tail_effect(tail, tail_degree, r) - m_log).exp();
    // |e_m(1/(z - z_j))| <= C(n, m) / d^m bounds the distance d to the
    // nearest root of any admissible perturbation, clusters included.
    let mut best = f64::INFINITY;
    let mut best_tail = f64::INFINITY;
    for m in 1..=n {
        let bm: Complex64 = (m..=n).map(|k| s[k] * binom[k][m]).sum();
        let em: f64 = (m..=n).map(|k| (logs[k].1 - m_log).exp() * binom[k][m]).sum();
        let bn = bm.norm() - em;
        if bn <= 0.0 {
            continue;
        }
        let inv = 1.0 / m as f64;
        let c = binom[n][m];
        best = best.min((c * e_total / bn).powf(inv));
        best_tail = best_tail.min((c * (e_total + tail_term) / bn).powf(inv));
    }
    (r * best, r * best_tail)
}

/// Sign of `p(x)` when it exceeds the evaluation error, computed with all
/// terms scaled by the largest `|a_k x^k|`.
fn certified_sign(p: &LogPoly, tail: f64, tail_degree: Option<usize>, x: f64) -> Option<f64> {
    let n = p.sign.len() - 1;
    let lx = x.abs().ln();
    let m = (0..=n)
        .map(|k| p.log_abs[k].max(p.log_err[k]) + k as f64 * lx)
        .fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return None;
    }
    let mut value = 0.0;
    let mut abs_sum = 0.0;
    let mut bound = 0.0;
    for k in 0..=n {
        let mag = (p.log_abs[k] + k as f64 * lx - m).exp();
        let odd = k % 2 == 1 && x < 0.0;
        let sign = if odd { -p.sign[k] } else { p.sign[k] };
        value += sign * mag;
        abs_sum += mag;
        bound += (p.log_err[k] + k as f64 * lx - m).exp();
    }
    bound += gamma(4 * n + 4) * abs_sum;
    bound += (log_tail_effect(tail, tail_degree, x.abs()) - m).exp();
    (value.abs() > bound).then(|| value.signum())
}

/// Upgrades roots to certified real where `p` changes sign (beyond its
/// error bound) across separators placed between consecutive candidates.
fn certify_sign_changes(p: &LogPoly, tail: f64, tail_degree: Option<usize>, roots: &mut [Root]) {
    let mut idx: Vec<usize> = (0..roots.len())
        .filter(|&i| roots[i].class != RootClass::NonReal && roots[i].multiplicity == 1)
        .collect();
    idx.sort_by(|&i, &j| roots[i].value.re.total_cmp(&roots[j].value.re));
    if idx.is_empty() {
        return;
    }
    let xs: Vec<f64> = idx.iter().map(|&i| roots[i].value.re).collect();
    let between = |l: f64, r: f64| {
        if l < 0.0 && r < 0.0 && l / r > 1.5 {
            -(l * r).sqrt()
        } else if l > 0.0 && r > 0.0 && r / l > 1.5 {
            (l * r).sqrt()
        } else {
            0.5 * (l + r)
        }
    };
    let first = xs[0];
    let last = xs[xs.len() - 1];
    let outer = |x: f64, dir: f64| {
        // twice as far from the origin when moving outward, else a half step
        if x * dir > 0.0 {
            2.0 * x
        } else {
            x + dir * 0.5 * x.abs().max(1e-3)
        }
    };
    let mut seps = Vec::with_capacity(xs.len() + 1);
    seps.push(outer(first, -1.0));
    for w in xs.windows(2) {
        seps.push(between(w[0], w[1]));
    }
    seps.push(outer(last, 1.0));
    let signs: Vec<Option<f64>> = par::map(&seps, |&x| certified_sign(p, tail, tail_degree, x));
    for (slot, &i) in idx.iter().enumerate() {
        let (lo, hi) = (seps[slot], seps[slot + 1]);
        if !(lo < xs[slot] && xs[slot] < hi) {
            continue;
        }
        if let (Some(sl), Some(sr)) = (signs[slot], signs[slot + 1]) {
            if sl != sr {
                let r = &mut roots[i];
                r.value = Complex64::new(r.value.re, 0.0).into();
                r.class = RootClass::Real;
                r.interval = Some((lo, hi));
            }
        }
    }
}

/// Roots of a float polynomial with radii and three-way classification.
pub fn float_roots(p: &UniPoly<f64>, tail: f64, tol: &Tolerances) -> Result<RootList> {
    if p.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter("non-finite coefficient".into()));
    }
    log_roots(&LogPoly::from_unipoly(p), tail, None, tol)
}

/// Roots of a log-magnitude polynomial. A positive `tail` is l1 mass
/// beyond the stored degree, confined to degrees `<= tail_degree` when
/// given (unbounded otherwise).
pub fn log_roots(p: &LogPoly, tail: f64, tail_degree: Option<usize>, tol: &Tolerances) -> Result<RootList> {
    let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
    if p.sign.iter().all(|s| *s == 0.0) {
        return Err(Error::ZeroPolynomial);
    }
    if degree > MAX_FLOAT_DEGREE {
        return Err(Error::DegreeBound { degree, bound: MAX_FLOAT_DEGREE });
    }
    if p.log_abs.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(Error::InvalidParameter("non-finite coefficient".into()));
    }
    let mut roots = Vec::with_capacity(degree);
    let binom = binomial_table(degree);
    let q = p.zero_order();
    if q > 0 {
        let (radius, tail_radius) = perturbation_radius(p, tail, tail_degree, &binom, Complex64::new(0.0, 0.0));
        roots.push(Root {
            value: Complex64::new(0.0, 0.0).into(),
            radius,
            tail_radius,
            multiplicity: q,
            interval: None,
            class: RootClass::Real,
        });
    }
    if degree > q {
        let deflated = p.shifted(q);
        let found = if degree - q == 1 {
            let a0 = deflated.sign[0];
            let a1 = deflated.sign[1];
            vec![Complex64::new(-a0 * a1 * (deflated.log_abs[0] - deflated.log_abs[1]).exp(), 0.0)]
        } else {
            let coeffs = Coeffs { plain: deflated.as_f64(), poly: &deflated };
            aberth(&coeffs)
        };
        let radii = par::map(&found, |&z| perturbation_radius(p, tail, tail_degree, &binom, z));
        let start = roots.len();
        for (z, (radius, tail_radius)) in found.into_iter().zip(radii) {
            roots.push(Root {
                value: z.into(),
                radius,
                tail_radius,
                multiplicity: 1,
                interval: None,
                class: classify(z, radius, tail_radius, tol),
            });
        }
        if tail == 0.0 || q == 0 {
            // deflation by x^q keeps signs away from 0; the tail bound is only
            // used with q = 0
            certify_sign_changes(&deflated, tail, tail_degree, &mut roots[start..]);
        }
    }
    roots.sort_by(|x, y| x.value.re.total_cmp(&y.value.re).then(x.value.im.total_cmp(&y.value.im)));
    let certified_real_count = roots
        .iter()
        .filter(|r| r.class == RootClass::Real)
        .map(|r| r.multiplicity)
        .sum();
    Ok(RootList { roots, certified_real_count, degree, exact: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_linear_factors() {
        let p = UniPoly::from_roots(&[-1.0, -2.0]);
        let rl = float_roots(&p, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(rl.certified_real_count, 2);
        let v = rl.real_values();
        assert!((v[0] + 2.0).abs() < 1e-14 && (v[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn no_real_roots() {
        let p = UniPoly::new(vec![1.0, 0.0, 1.0]);
        let rl = float_roots(&p, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(rl.certified_real_count, 0);
        assert!(rl.roots.iter().all(|r| r.class == RootClass::NonReal));
    }

    #[test]
    fn death_chain_quadratic_is_complex() {
        let t: f64 = 0.1;
        let e = (-2.0 * t).exp();
        let p = UniPoly::new(vec![0.25, -e, e]);
        let rl = float_roots(&p, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(rl.certified_real_count, 0);
        let im = (e - e * e).sqrt() / (2.0 * e);
        for r in &rl.roots {
            assert!((r.value.im.abs() - im).abs() < 1e-12);
        }
    }

    #[test]
    fn double_root_counts_real() {
        let p = UniPoly::new(vec![0.25, -1.0, 1.0]);
        let rl = float_roots(&p, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(rl.certified_real_count, 2, "{rl:?}");
    }

    #[test]
    fn wide_dynamic_range() {
        // roots -10^k for k = 0..12
        let roots: Vec<f64> = (0..12).map(|k| -(10f64.powi(k))).collect();
        let p = UniPoly::from_roots(&roots);
        let rl = float_roots(&p, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(rl.certified_real_count, 12, "{rl:?}");
        for (got, want) in rl.real_values().iter().zip(roots.iter().rev()) {
            assert!((got / want - 1.0).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_roots_are_factored() {
        let p = UniPoly::new(vec![0.0, 0.0, 2.0, 1.0]);
        let rl = float_roots(&p, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(rl.degree, 3);
        assert_eq!(rl.certified_real_count, 3);
        assert_eq!(rl.roots.iter().map(|r| r.multiplicity).sum::<usize>(), 3);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(float_roots(&UniPoly::zero(), 0.0, &Tolerances::default()), Err(Error::ZeroPolynomial));
    }
}
