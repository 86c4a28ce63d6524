use num_complex::Complex64;

use stable_pgf::bdchain::{backward_residual, evolve, generator, quadratic_map_counterexample, transition, BirthDeathRates};
use stable_pgf::measures::{bp_synthesize, marginal_sum, pgf, project, Measure};
use stable_pgf::nacheck::{enumerate_upsets, na_all_splits};
use stable_pgf::particles::{single_jump_transform, truncated_generator_evolve, SiteSystem};
use stable_pgf::polycore::{
    elem_sym, hermite_monic, kummer_1f1_poly, kummer_x_zeros, polarize, polarize_multi, real_roots, MultiPoly, UniPoly,
};
use stable_pgf::stability::{is_real_rooted, is_stable_multi};
use stable_pgf::{Rational, Scalar, Verdict};

fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

fn qpoly(c: &[i64]) -> UniPoly<Rational> {
    UniPoly::new(c.iter().map(|&v| q(v)).collect())
}

#[test]
fn polynomial_basics() {
    let p = UniPoly::new(vec![1.0, 1.0]);
    assert_eq!(p.eval_complex(Complex64::new(0.0, 1.0)).value, Complex64::new(1.0, 1.0));
    let xy = MultiPoly::from_terms(2, [(vec![1, 1], 1.0)]).unwrap();
    assert_eq!(xy.eval(&[2.0, 3.0]).unwrap(), 6.0);
    let cube = qpoly(&[1, 2]).pow(3);
    assert_eq!(cube.eval(&Rational::from_ratio(-1, 2)), q(0));
    assert_eq!(qpoly(&[0, 0, 0, 1]).derivative().coeffs(), qpoly(&[0, 0, 3]).coeffs());
    assert_eq!(qpoly(&[0, 0, 1]).compose_affine(&q(-1), &q(1)).coeffs(), qpoly(&[1, -2, 1]).coeffs());
    assert_eq!((&qpoly(&[1, 1]) * &qpoly(&[2, 1])).coeffs(), qpoly(&[2, 3, 1]).coeffs());
}

#[test]
fn symmetric_functions_and_polarization() {
    assert_eq!(elem_sym(0, &[q(4), q(5)]).unwrap(), q(1));
    assert_eq!(elem_sym(2, &[q(1), q(2), q(3)]).unwrap(), q(11));
    assert_eq!(elem_sym(3, &[q(1), q(1), q(1)]).unwrap(), q(1));
    let p = polarize(&qpoly(&[0, 0, 1]), 2).unwrap();
    assert_eq!(p.coeff(&[1, 1]), q(1));
    assert_eq!(p.len(), 1);
    let p = polarize(&qpoly(&[1, 2]), 2).unwrap();
    assert_eq!((p.coeff(&[0, 0]), p.coeff(&[1, 0]), p.coeff(&[0, 1])), (q(1), q(1), q(1)));
    let xy = MultiPoly::from_terms(2, [(vec![1, 1], q(1))]).unwrap();
    assert_eq!(polarize_multi(&xy, 1).unwrap().coeff(&[1, 1]), q(1));
    let x2 = MultiPoly::from_terms(1, [(vec![2], q(1))]).unwrap();
    let pol = polarize_multi(&x2, 2).unwrap();
    assert!(pol.is_multi_affine());
    assert_eq!(pol.coeff(&[1, 1]), q(1));
}

#[test]
fn roots_and_special_polynomials() {
    let r = real_roots(&qpoly(&[2, 3, 1])).unwrap();
    assert_eq!(r.certified_real_count, 2);
    let mut v = r.real_values();
    v.sort_by(f64::total_cmp);
    assert_eq!(v, vec![-2.0, -1.0]);
    assert_eq!(real_roots(&qpoly(&[1, 0, 1])).unwrap().certified_real_count, 0);
    let e = (-0.2f64).exp();
    let r = real_roots(&UniPoly::new(vec![0.25, -e, e])).unwrap();
    let z = r.values();
    assert!(z[0].im != 0.0 && (z[0] - z[1].conj()).norm() < 1e-12);

    assert_eq!(hermite_monic(1).coeffs(), qpoly(&[0, 1]).coeffs());
    assert_eq!(hermite_monic(2).coeffs(), qpoly(&[-2, 0, 1]).coeffs());
    assert_eq!(hermite_monic(3).coeffs(), qpoly(&[0, -6, 0, 1]).coeffs());
    assert_eq!(kummer_1f1_poly(1).coeffs(), qpoly(&[1]).coeffs());
    assert_eq!(kummer_1f1_poly(3).coeffs(), &[q(1), q(-2), Rational::from_ratio(1, 2)]);
    let z = kummer_x_zeros(3);
    let s = 0.5f64.sqrt();
    assert!((z[0] - (-1.0 - s)).abs() < 1e-12 && (z[1] - (-1.0 + s)).abs() < 1e-12);
}

#[test]
fn stability_verdicts() {
    assert_eq!(is_real_rooted(&qpoly(&[1, 3, 3, 1])).verdict, Verdict::Stable);
    let c = is_real_rooted(&qpoly(&[1, 1, 1]));
    assert_eq!(c.verdict, Verdict::Refuted);
    let w: Complex64 = c.witness.expect("witness")[0].into();
    assert!((w - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-12);
    assert_eq!(is_real_rooted(&UniPoly::new(vec![0.25, -1.0, 1.0])).verdict, Verdict::Stable);
    let sum = MultiPoly::from_terms(2, [(vec![1, 0], 1.0), (vec![0, 1], 1.0)]).unwrap();
    assert_eq!(is_stable_multi(&sum, 64, 1).verdict, Verdict::Stable);
}

#[test]
fn measures() {
    let pm = Measure::point_mass(&[1, 0]);
    assert_eq!(pgf(&pm).coeff(&[1, 0]), 1.0);
    let (a, b) = (0.3, 0.6);
    let mu = Measure::product(&[Measure::bernoulli(a).unwrap(), Measure::bernoulli(b).unwrap()]);
    assert!((project(&mu, &[0]).unwrap().weights[1] - a).abs() < 1e-15);
    assert_eq!(project(&Measure::point_mass(&[2, 3]), &[1]).unwrap().weights, vec![0.0, 0.0, 0.0, 1.0]);
    let s = marginal_sum(&mu, &[0, 1]).unwrap();
    let expect = [(1.0 - a) * (1.0 - b), a * (1.0 - b) + b * (1.0 - a), a * b];
    assert!(s.weights.iter().zip(expect).all(|(x, y)| (x - y).abs() < 1e-15));
    assert_eq!(bp_synthesize(0, 0.0, &[0.5], 5).unwrap().weights[..2], [0.5, 0.5]);
    assert_eq!(bp_synthesize(2, 0.0, &[], 5).unwrap().weights[2], 1.0);
    assert!(Measure::univariate(vec![0.25, -0.9, 0.9], 0.0).is_err());
}

#[test]
fn chains() {
    let death = BirthDeathRates::linear(0.0, 1.0).unwrap();
    assert_eq!(generator(&death, 2).dense(), vec![vec![0.0, 0.0, 0.0], vec![1.0, -1.0, 0.0], vec![0.0, 2.0, -2.0]]);
    let sg = transition(&death, 0.0, 3, 1e-12).unwrap();
    assert!((0..=3).all(|j| sg.p(j, j) == 1.0));
    let kingman = BirthDeathRates::kingman(true);
    let sg = transition(&kingman, 0.3, 10, 1e-13).unwrap();
    assert!(backward_residual(&kingman, &sg, 9, 4).unwrap() < 1e-6);
    let ev = evolve(&Measure::point_mass(&[1]), &kingman, 2.0).unwrap();
    assert!((ev.coeffs()[1] - 1.0).abs() < 1e-15);
    let rep = quadratic_map_counterexample(0.5, 0.0).unwrap();
    assert_eq!(rep.certificate.verdict, Verdict::Stable);
}

#[test]
fn particles_and_na() {
    let x1 = MultiPoly::from_terms(2, [(vec![1, 0], 1.0)]).unwrap();
    assert_eq!(single_jump_transform(&x1, 0, 1, 1.0).unwrap().coeff(&[0, 1]), 1.0);
    let x1x2 = MultiPoly::from_terms(2, [(vec![1, 1], 1.0)]).unwrap();
    let g = single_jump_transform(&x1x2, 0, 1, 0.5).unwrap();
    assert_eq!((g.coeff(&[1, 1]), g.coeff(&[0, 2])), (0.5, 0.5));
    let still = SiteSystem::new(vec![vec![0.0; 2]; 2], vec![0.0; 2], vec![0.0; 2]).unwrap();
    let mu = Measure::point_mass(&[1, 2]);
    let out = truncated_generator_evolve(&mu, &still, 1.0, &[1, 2]).unwrap();
    assert_eq!(out.weights, mu.weights);

    assert_eq!(enumerate_upsets(&[1]).unwrap().len(), 3);
    assert_eq!(enumerate_upsets(&[2]).unwrap().len(), 4);
    assert_eq!(enumerate_upsets(&[1, 1]).unwrap().len(), 6);
    let rep = na_all_splits(&Measure::product(&[Measure::bernoulli(0.3).unwrap(), Measure::bernoulli(0.7).unwrap()])).unwrap();
    assert!(rep.passed() && rep.worst_slack <= 1e-16);
    let mix = na_all_splits(&Measure::new(vec![1, 1], vec![0.5, 0.0, 0.0, 0.5], 0.0).unwrap()).unwrap();
    assert!(!mix.passed());
    assert!((mix.first_violation().unwrap().worst_slack - 0.25).abs() < 1e-15);
}
