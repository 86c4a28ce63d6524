//! Exact real-root certification over the rationals.
//!
//! Yun's square-free factorization splits `p = Π s_i^i`; each square-free
//! factor is isolated with a Sturm chain and refined by sign bisection.
//! Non-real roots are located numerically but counted exactly.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::roots::{float_roots, Root, RootClass, RootList};
use super::unipoly::UniPoly;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::tolerances::Tolerances;

type QPoly = UniPoly<Rational>;

fn monic(p: &QPoly) -> QPoly {
    match p.leading() {
        Some(l) => p.scale(&(Rational::one() / l.clone())),
        None => p.clone(),
    }
}

pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let (_, r) = x.div_rem(&y).expect("nonzero divisor");
        x = y;
        y = r;
    }
    monic(&x)
}

/// `[(s_1, 1), (s_2, 2), ...]` with `p = lc · Π s_i^i`, each `s_i`
/// square-free and pairwise coprime. Constant factors are skipped.
pub fn squarefree_decomposition(p: &QPoly) -> Vec<(QPoly, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = gcd(p, &dp);
    let mut b = p.div_rem(&a0).expect("gcd nonzero").0;
    let mut c = dp.div_rem(&a0).expect("gcd nonzero").0;
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = gcd(&b, &d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_rem(&a).expect("gcd nonzero").0;
        c = d.div_rem(&a).expect("gcd nonzero").0;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

struct SturmChain {
    chain: Vec<QPoly>,
}

impl SturmChain {
    fn new(p: &QPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]).expect("nonzero");
            if r.is_zero() {
                break;
            }
            chain.push(-&r);
        }
        Self { chain }
    }

    fn variations_at(&self, x: &Rational) -> usize {
        count_changes(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        count_changes(self.chain.iter().map(|p| {
            let d = p.degree().unwrap_or(0);
            let s = sign(p.leading().expect("nonzero"));
            if positive || d % 2 == 0 { s } else { -s }
        }))
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }
}

fn sign(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn count_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Number of distinct real roots of a square-free polynomial.
pub fn distinct_real_count(p: &QPoly) -> usize {
    let chain = SturmChain::new(p);
    chain.variations_at_infinity(false) - chain.variations_at_infinity(true)
}

/// Isolating intervals `(lo, hi]` of width at most `width` for the real
/// roots of a square-free polynomial, ascending.
pub fn isolate(p: &QPoly, width: &Rational) -> Vec<(Rational, Rational)> {
    let chain = SturmChain::new(p);
    let lead = Scalar::abs(p.leading().expect("nonzero"));
    let bound = p
        .coeffs()
        .iter()
        .map(|c| Scalar::abs(c) / lead.clone())
        .fold(Rational::zero(), |m, c| if c > m { c } else { m })
        + Rational::one();
    let mut stack = vec![(-bound.clone(), bound)];
    let mut isolated = Vec::new();
    let two = Rational::from_i64(2);
    while let Some((lo, hi)) = stack.pop() {
        let c = chain.count(&lo, &hi);
        if c == 0 {
            continue;
        }
        if c == 1 {
            isolated.push(refine(p, lo, hi, width));
            continue;
        }
        let mid = (lo.clone() + hi.clone()) / two.clone();
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    isolated.sort_by(|a, b| a.0.cmp(&b.0));
    isolated
}

fn refine(p: &QPoly, mut lo: Rational, mut hi: Rational, width: &Rational) -> (Rational, Rational) {
    let two = Rational::from_i64(2);
    if p.eval(&hi).is_zero() {
        return (hi.clone(), hi);
    }
    let s_hi = sign(&p.eval(&hi));
    while hi.clone() - lo.clone() > *width {
        let mid = (lo.clone() + hi.clone()) / two.clone();
        let s = sign(&p.eval(&mid));
        if s == 0 {
            return (mid.clone(), mid);
        }
        if s == s_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

pub(crate) fn exact_roots(p: &QPoly, tail: f64, tol: &Tolerances) -> Result<RootList> {
    let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
    let width = <Rational as Scalar>::from_f64(tol.isolation_width);
    let mut roots = Vec::new();
    let mut certified = 0;
    for (factor, mult) in squarefree_decomposition(p) {
        for (lo, hi) in isolate(&factor, &width) {
            let (l, h) = (lo.to_f64(), hi.to_f64());
            let mid = 0.5 * (l + h);
            roots.push(Root {
                value: Complex64::new(mid, 0.0).into(),
                radius: 0.5 * (h - l),
                tail_radius: 0.5 * (h - l),
                multiplicity: mult,
                interval: Some((l, h)),
                class: RootClass::Real,
            });
            certified += mult;
        }
    }
    let missing = degree - certified;
    if missing > 0 {
        let float = float_roots(&p.to_f64(), tail, tol)?;
        let mut candidates: Vec<Root> = float
            .roots
            .into_iter()
            .flat_map(|r| std::iter::repeat_n(Root { multiplicity: 1, ..r.clone() }, r.multiplicity))
            .collect();
        candidates.sort_by(|a, b| b.value.im.abs().total_cmp(&a.value.im.abs()));
        for mut r in candidates.into_iter().take(missing) {
            r.class = RootClass::NonReal;
            roots.push(r);
        }
    }
    roots.sort_by(|x, y| x.value.re.total_cmp(&y.value.re).then(x.value.im.total_cmp(&y.value.im)));
    Ok(RootList { roots, certified_real_count: certified, degree, exact: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn squarefree_parts() {
        // (x+1)^2 (x-2)
        let p = QPoly::from_roots(&[q(-1, 1), q(-1, 1), q(2, 1)]);
        let parts = squarefree_decomposition(&p);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (QPoly::from_roots(&[q(2, 1)]), 1));
        assert_eq!(parts[1], (QPoly::from_roots(&[q(-1, 1)]), 2));
    }

    #[test]
    fn exact_isolation() {
        let p = QPoly::from_roots(&[q(-1, 1), q(-2, 1)]);
        let rl = exact_roots(&p, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(rl.certified_real_count, 2);
        let v = rl.real_values();
        assert!((v[0] + 2.0).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);
        let none = exact_roots(&QPoly::new(vec![q(1, 1), q(0, 1), q(1, 1)]), 0.0, &Tolerances::default()).unwrap();
        assert_eq!(none.certified_real_count, 0);
        assert_eq!(none.roots.len(), 2);
    }

    #[test]
    fn double_root_exact() {
        let p = QPoly::new(vec![q(1, 4), q(-1, 1), q(1, 1)]);
        let rl = exact_roots(&p, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(rl.certified_real_count, 2);
        assert_eq!(rl.roots.len(), 1);
        assert_eq!(rl.roots[0].multiplicity, 2);
        assert_eq!(rl.roots[0].value.re, 0.5);
    }

    #[test]
    fn irrational_roots_refined() {
        // x^2 - 2
        let p = QPoly::new(vec![q(-2, 1), q(0, 1), q(1, 1)]);
        let iv = isolate(&p, &q(1, 1_000_000_000_000));
        assert_eq!(iv.len(), 2);
        let (lo, hi) = (&iv[1].0, &iv[1].1);
        assert!(lo.to_f64() <= 2f64.sqrt() && 2f64.sqrt() <= hi.to_f64());
        assert!((hi.clone() - lo.clone()).to_f64() <= 1e-12);
        assert_eq!(distinct_real_count(&p), 2);
    }
}
