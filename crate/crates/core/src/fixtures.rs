//! Seeded generators for randomized checks: real-rooted PGFs, t-stable
//! measures on small boxes and order-1 site systems.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::measures::{pgf, Measure};
use crate::particles::{single_jump_transform, SiteSystem};
use crate::polycore::UniPoly;

/// PGF with `degree ≤ max_degree` and all roots drawn uniformly from
/// `(lo, hi)` with `hi ≤ 0`, normalized to total mass one.
pub fn random_real_rooted_pgf(rng: &mut ChaCha8Rng, max_degree: usize, lo: f64, hi: f64) -> (UniPoly<f64>, Vec<f64>) {
    let degree = rng.random_range(1..=max_degree.max(1));
    let roots: Vec<f64> = (0..degree).map(|_| rng.random_range(lo..hi)).collect();
    let p = UniPoly::from_roots(&roots);
    let total: f64 = p.coeffs().iter().sum();
    (UniPoly::new(p.coeffs().iter().map(|c| c / total).collect()), roots)
}

/// Law of a sum of `count` independent Bernoullis with random parameters.
fn bernoulli_sum(rng: &mut ChaCha8Rng, count: usize) -> Measure {
    let mut w = vec![1.0];
    for _ in 0..count {
        let p: f64 = rng.random_range(0.05..0.95);
        let mut next = vec![0.0; w.len() + 1];
        for (k, x) in w.iter().enumerate() {
            next[k] += x * (1.0 - p);
            next[k + 1] += x * p;
        }
        w = next;
    }
    Measure::univariate(w, 0.0).expect("probability vector")
}

/// Random t-stable measure on at most `cap` cells: a product of per-site
/// Bernoulli sums followed by one random particle jump.
pub fn random_tstable_measure(rng: &mut ChaCha8Rng, cap: usize) -> Result<Measure> {
    // shapes after the jump from site 0 to site 1: (a, a+b, c…)
    loop {
        let n = rng.random_range(2..=4usize);
        let mut shape: Vec<usize> = (0..n).map(|_| rng.random_range(0..=2usize)).collect();
        shape[0] = shape[0].max(1);
        let mut after = shape.clone();
        after[1] += shape[0];
        if after.iter().map(|s| s + 1).product::<usize>() > cap {
            continue;
        }
        let factors: Vec<Measure> = shape.iter().map(|&s| bernoulli_sum(rng, s)).collect();
        let mu = Measure::product(&factors);
        let p: f64 = rng.random_range(0.0..1.0);
        let f = single_jump_transform(&pgf(&mu), 0, 1, p)?;
        let mut out = Measure::from_pgf(&f, 0.0)?;
        // from_pgf sizes the box by degree; pad back to the full shape
        if out.shape != after {
            let mut padded = vec![0.0; after.iter().map(|s| s + 1).product()];
            let frame = Measure { shape: after.clone(), weights: vec![], tail_bound: 0.0 };
            for (flat, &w) in out.weights.iter().enumerate() {
                padded[frame.flat_of(&out.index_of(flat)).expect("inside box")] += w;
            }
            out = Measure::new(after, padded, 0.0)?;
        }
        return Ok(out);
    }
}

/// Random order-1 system on `n` sites with moderate rates.
pub fn random_order_one_system(rng: &mut ChaCha8Rng, n: usize) -> SiteSystem {
    let jump = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { rng.random_range(0.0..1.0) }).collect()).collect();
    let birth = (0..n).map(|_| rng.random_range(0.0..0.5)).collect();
    let death = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    SiteSystem::new(jump, birth, death).expect("valid rates")
}
