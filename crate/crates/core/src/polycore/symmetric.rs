//! Elementary symmetric polynomials and polarization.

use super::multipoly::MultiPoly;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};
use crate::scalar::{binomial, Scalar};

/// Largest polarization arity (the output has up to 2^N terms).
pub const MAX_POLARIZATION: usize = 20;

/// `e_k(values)` via the prefix recurrence `e_j ← e_j + x e_{j-1}`.
pub fn elem_sym<T: Scalar>(k: usize, values: &[T]) -> Result<T> {
    if k > values.len() {
        return Err(Error::OutOfRange { index: k, limit: values.len() });
    }
    let mut e = vec![T::zero(); k + 1];
    e[0] = T::one();
    for x in values {
        for j in (1..=k).rev() {
            e[j] = e[j].clone() + x.clone() * e[j - 1].clone();
        }
    }
    Ok(e[k].clone())
}

/// All `e_0..=e_m` of `values` at once.
pub fn elem_sym_all<T: Scalar>(values: &[T]) -> Vec<T> {
    let m = values.len();
    let mut e = vec![T::zero(); m + 1];
    e[0] = T::one();
    for (i, x) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] = e[j].clone() + x.clone() * e[j - 1].clone();
        }
    }
    e
}

/// Subsets of `{0..n}` of size `k`, as sorted index lists.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// `N`-th polarization `Σ_k a_k e_k(x_1..x_N) / C(N, k)`: multi-affine,
/// symmetric, and equal to `p` on the diagonal.
pub fn polarize<T: Scalar>(p: &UniPoly<T>, n: usize) -> Result<MultiPoly<T>> {
    let deg = p.degree().unwrap_or(0);
    if deg > n {
        return Err(Error::DegreeBound { degree: deg, bound: n });
    }
    if n > MAX_POLARIZATION {
        return Err(Error::InvalidParameter(format!("polarization arity {n} > {MAX_POLARIZATION}")));
    }
    let mut out = MultiPoly::zero(n);
    for (k, a) in p.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let c = a.clone() / binomial::<T>(n, k);
        for s in subsets(n, k) {
            let mut alpha = vec![0u32; n];
            for i in s {
                alpha[i] = 1;
            }
            out.add_term(alpha, c.clone());
        }
    }
    Ok(out)
}

/// Polarizes every variable of `f` to `N` copies; variable `v` becomes
/// `v*N .. v*N + N - 1` of the result.
pub fn polarize_multi<T: Scalar>(f: &MultiPoly<T>, n: usize) -> Result<MultiPoly<T>> {
    let deg = f.max_var_degree() as usize;
    if deg > n {
        return Err(Error::DegreeBound { degree: deg, bound: n });
    }
    let nv = f.nvars();
    if nv * n > 8 * MAX_POLARIZATION {
        return Err(Error::InvalidParameter("polarized arity too large".into()));
    }
    let mut out = MultiPoly::zero(nv * n);
    for (alpha, c) in f.terms() {
        // expand Π_v e_{α_v}(x_v·) / C(N, α_v)
        let mut partial: Vec<(Vec<u32>, T)> = vec![(vec![0; nv * n], c.clone())];
        for (v, &d) in alpha.iter().enumerate() {
            let d = d as usize;
            let scale = T::one() / binomial::<T>(n, d);
            let choices = subsets(n, d);
            let mut next = Vec::with_capacity(partial.len() * choices.len());
            for (base, coef) in &partial {
                for s in &choices {
                    let mut a = base.clone();
                    for &i in s {
                        a[v * n + i] = 1;
                    }
                    next.push((a, coef.clone() * scale.clone()));
                }
            }
            partial = next;
        }
        for (a, coef) in partial {
            out.add_term(a, coef);
        }
    }
    Ok(out)
}
