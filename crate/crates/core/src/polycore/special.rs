//! Special polynomial families arising in the root asymptotics of the
//! quadratic-death chain.

use num_traits::Zero;

use super::sturm::isolate;
use super::unipoly::UniPoly;
use crate::scalar::{falling, Rational, Scalar};

fn factorial(n: usize) -> Rational {
    falling(n, n)
}

/// `Σ_k (-1)^k n!/(k!(n-2k)!) α^(n-2k)`, the monic normalization
/// (no `2^(n-2k)` factor).
pub fn hermite_monic(n: usize) -> UniPoly<Rational> {
    hermite_with_base(n, 1)
}

/// Standard physicists' Hermite polynomial `H_n`, with
/// `hermite_physics(n)(x) == hermite_monic(n)(2x)`.
pub fn hermite_physics(n: usize) -> UniPoly<Rational> {
    hermite_with_base(n, 2)
}

fn hermite_with_base(n: usize, base: i64) -> UniPoly<Rational> {
    let mut coeffs = vec![Rational::zero(); n + 1];
    let nf = factorial(n);
    for k in 0..=n / 2 {
        let mut c = nf.clone() / (factorial(k) * factorial(n - 2 * k));
        for _ in 0..n - 2 * k {
            c *= Rational::from_i64(base);
        }
        if k % 2 == 1 {
            c = -c;
        }
        coeffs[n - 2 * k] = c;
    }
    UniPoly::new(coeffs)
}

/// `₁F₁[1-n; 1; y] = Σ_{k<n} (1-n)_k / (k!)^2 y^k`, a polynomial in `y`
/// of degree `n - 1`.
pub fn kummer_1f1_poly(n: usize) -> UniPoly<Rational> {
    assert!(n >= 1, "kummer_1f1_poly needs n >= 1");
    let mut coeffs = Vec::with_capacity(n);
    let mut poch = Rational::from_i64(1);
    for k in 0..n {
        let kf = factorial(k);
        coeffs.push(poch.clone() / (kf.clone() * kf));
        poch *= Rational::from_i64(1 - n as i64 + k as i64);
    }
    UniPoly::new(coeffs)
}

/// Zeros in `x` of `₁F₁[1-n; 1; -1/x]`, ascending. Each is `-1/y` for a
/// (positive) zero `y` of [`kummer_1f1_poly`].
pub fn kummer_x_zeros(n: usize) -> Vec<f64> {
    let p = kummer_1f1_poly(n);
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let width = Rational::from_ratio(1, 1_000_000_000_000_000);
    let mut xs: Vec<f64> = isolate(&p, &width)
        .into_iter()
        .map(|(lo, hi)| {
            let y = 0.5 * (lo.to_f64() + hi.to_f64());
            -1.0 / y
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

/// Small-time limit polynomial of the quadratic-death chain started at
/// `n`: `Σ_{k<n} [n]_k [n-1]_k / k! α^(n-k)` divided by `α`, so its zeros
/// are the `n - 1` nonzero limits of `root / t`.
pub fn falling_factorial_limit(n: usize) -> UniPoly<Rational> {
    assert!(n >= 1, "falling_factorial_limit needs n >= 1");
    let mut coeffs = vec![Rational::zero(); n];
    for k in 0..n {
        let c: Rational = falling::<Rational>(n, k) * falling::<Rational>(n - 1, k) / factorial(k);
        coeffs[n - k - 1] = c;
    }
    UniPoly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::real_roots;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_monic(1), UniPoly::new(vec![q(0, 1), q(1, 1)]));
        assert_eq!(hermite_monic(2), UniPoly::new(vec![q(-2, 1), q(0, 1), q(1, 1)]));
        assert_eq!(hermite_monic(3), UniPoly::new(vec![q(0, 1), q(-6, 1), q(0, 1), q(1, 1)]));
        let roots = real_roots(&hermite_monic(3)).unwrap().real_values();
        let s6 = 6f64.sqrt();
        assert!((roots[0] + s6).abs() < 1e-11 && roots[1].abs() < 1e-11 && (roots[2] - s6).abs() < 1e-11);
        // physicists' H_2 = 4x^2 - 2
        assert_eq!(hermite_physics(2), UniPoly::new(vec![q(-2, 1), q(0, 1), q(4, 1)]));
    }

    #[test]
    fn hermite_scaling_relation() {
        for n in 0..8 {
            let doubled = hermite_monic(n).compose_affine(&q(2, 1), &q(0, 1));
            assert_eq!(doubled, hermite_physics(n));
        }
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_1f1_poly(1), UniPoly::new(vec![q(1, 1)]));
        assert!(kummer_x_zeros(1).is_empty());
        assert_eq!(kummer_1f1_poly(3), UniPoly::new(vec![q(1, 1), q(-2, 1), q(1, 2)]));
        let z = kummer_x_zeros(3);
        let r = 0.5f64.sqrt();
        assert!((z[0] - (-1.0 - r)).abs() < 1e-12 && (z[1] - (-1.0 + r)).abs() < 1e-12);
        assert_eq!(kummer_x_zeros(5).len(), 4);
    }

    #[test]
    fn falling_factorial_limit_examples() {
        // n = 2: α + 2; n = 3: α^2 + 6α + 6
        assert_eq!(falling_factorial_limit(2), UniPoly::new(vec![q(2, 1), q(1, 1)]));
        assert_eq!(falling_factorial_limit(3), UniPoly::new(vec![q(6, 1), q(6, 1), q(1, 1)]));
        assert_eq!(falling_factorial_limit(1), UniPoly::new(vec![q(1, 1)]));
    }
}
