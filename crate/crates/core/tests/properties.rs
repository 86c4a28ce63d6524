use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stable_pgf::bdchain::{evolve, BirthDeathRates};
use stable_pgf::fixtures::random_real_rooted_pgf;
use stable_pgf::measures::{bp_decompose, bp_synthesize, marginal_sum, project, tv_distance, Measure};
use stable_pgf::nacheck::na_all_splits;
use stable_pgf::polycore::{elem_sym, polarize, UniPoly};
use stable_pgf::stability::{is_real_rooted, is_stable_multi};
use stable_pgf::{Rational, Scalar, Verdict};

fn brute_elem_sym(k: usize, xs: &[i64]) -> i64 {
    (0u32..1 << xs.len())
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..xs.len()).filter(|i| m >> i & 1 == 1).map(|i| xs[i]).product::<i64>())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elem_sym_matches_subsets(xs in prop::collection::vec(-5i64..=5, 0..7), k in 0usize..8) {
        prop_assume!(k <= xs.len());
        let vals: Vec<Rational> = xs.iter().map(|&x| Rational::from_i64(x)).collect();
        prop_assert_eq!(elem_sym(k, &vals).unwrap(), Rational::from_i64(brute_elem_sym(k, &xs)));
    }

    #[test]
    fn polarization_of_real_rooted_is_never_refuted(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, _) = random_real_rooted_pgf(&mut rng, 5, -3.0, 0.0);
        let deg = p.degree().unwrap_or(0);
        let pol = polarize(&p, deg.max(n)).unwrap();
        prop_assert!(pol.is_multi_affine());
        prop_assert_ne!(is_stable_multi(&pol, 64, seed).verdict, Verdict::Refuted);
        prop_assert!((pol.diagonal().eval(&0.7) - p.eval(&0.7)).abs() < 1e-12);
    }

    #[test]
    fn real_rooted_inputs_certify(roots in prop::collection::vec(-50i64..0, 1..8)) {
        let rs: Vec<Rational> = roots.iter().map(|&r| Rational::from_ratio(r, 7)).collect();
        let p = UniPoly::from_roots(&rs);
        prop_assert_eq!(is_real_rooted(&p).verdict, Verdict::Stable);
        prop_assert_eq!(is_real_rooted(&p.to_f64()).verdict == Verdict::Refuted, false);
    }

    #[test]
    fn evolution_conserves_mass(b in 0.0f64..3.0, d1 in 0.0f64..2.0, d2 in 0.0f64..2.0, k in 0usize..8, t in 0.01f64..2.0) {
        let rates = BirthDeathRates::order_two(b, d1, d2).unwrap();
        let ev = evolve(&Measure::point_mass(&[k]), &rates, t).unwrap();
        let mass: f64 = ev.coeffs().iter().sum();
        prop_assert!(ev.coeffs().iter().all(|c| *c >= -1e-15));
        prop_assert!(mass <= 1.0 + 1e-12 && mass + ev.tail_bound >= 1.0 - 1e-12, "mass {} tail {}", mass, ev.tail_bound);
    }

    #[test]
    fn tv_is_a_metric(a in prop::collection::vec(0.0f64..1.0, 1..10), b in prop::collection::vec(0.0f64..1.0, 1..10)) {
        let n = a.len().min(b.len());
        let norm = |v: &[f64]| { let s: f64 = v.iter().sum::<f64>().max(1e-12); v.iter().map(|x| x / s).collect::<Vec<_>>() };
        let (a, b) = (norm(&a[..n]), norm(&b[..n]));
        let d = tv_distance(&a, &b);
        prop_assert!((d - tv_distance(&b, &a)).abs() < 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert_eq!(tv_distance(&a, &a), 0.0);
    }

    // Bernoulli roots −(1−p)/p stay inside the zero-free disc of the
    // truncated exponential (radius ≈ 0.278·60/σ)
    #[test]
    fn bp_roundtrip(q in 0usize..3, sigma in 0.0f64..1.5, p in prop::collection::vec(0.25f64..0.95, 0..4)) {
        let mu = bp_synthesize(q, sigma, &p, 60).unwrap();
        let d = bp_decompose(&mu, 1e-8).unwrap();
        prop_assert_eq!(d.q, q);
        prop_assert!(d.residual < 1e-8, "residual {}", d.residual);
        let back = bp_synthesize(d.q, d.sigma, &d.p, 60).unwrap();
        prop_assert!(tv_distance(&mu.weights, &back.weights) < 1e-6);
    }

    #[test]
    fn products_of_bernoullis_are_na(ps in prop::collection::vec(0.0f64..=1.0, 2..=4)) {
        let mu = Measure::product(&ps.iter().map(|&p| Measure::bernoulli(p).unwrap()).collect::<Vec<_>>());
        prop_assert!(na_all_splits(&mu).unwrap().passed());
        let first = project(&mu, &[0]).unwrap();
        prop_assert!((first.weights[1] - ps[0]).abs() < 1e-15);
        let sum = marginal_sum(&mu, &(0..ps.len()).collect::<Vec<_>>()).unwrap();
        prop_assert!((sum.weights.iter().enumerate().map(|(k, w)| k as f64 * w).sum::<f64>() - ps.iter().sum::<f64>()).abs() < 1e-12);
    }
}
