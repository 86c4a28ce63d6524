use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use stable_pgf::bdchain::{
    birth_monotonicity_probe, evolve, kingman, kingman_log, lie_split_evolve, quadratic_map_counterexample,
    strang_split_evolve, wf_residual, BirthDeathRates, RateLaw,
};
use stable_pgf::fixtures::random_real_rooted_pgf;
use stable_pgf::measures::{bp_decompose, tv_distance, Measure};
use num_complex::Complex64;
use stable_pgf::stability::is_real_rooted_with;
use stable_pgf::{par, Tolerances, Verdict};

use super::log_grid;
use crate::params::{spec, Kind, ParamSpec, Params};
use crate::{Check, CliError, Experiment, Outcome};

pub const QUAD_DEATH: Experiment = Experiment {
    name: "quad-death-preserve",
    anchor: "quadratic death rates preserve real-rootedness (if-direction)",
    summary: "Evolves random real-rooted PGFs under δ_k = c·k(k−1) and certifies real-rootedness at every time",
    params: quad_params,
    csv: &[],
    run: quad_run,
};

fn quad_params() -> Vec<ParamSpec> {
    vec![
        spec("samples", Kind::Int, json!(100), "number of random initial laws"),
        spec("max_degree", Kind::Int, json!(8), "maximal degree of the initial PGF"),
        spec("root_min", Kind::Float, json!(-3.0), "roots drawn from (root_min, root_max)"),
        spec("root_max", Kind::Float, json!(0.0), "upper end of the root interval (<= 0)"),
        spec("rate", Kind::Float, json!(1.0), "c in δ_k = c·k(k−1)"),
        spec("t_min_exp", Kind::Float, json!(-3.0), "log10 of the smallest time"),
        spec("t_max_exp", Kind::Float, json!(0.0), "log10 of the largest time"),
        spec("t_points", Kind::Int, json!(13), "time grid size"),
    ]
}

fn quad_run(p: &Params, seed: u64) -> Result<Outcome, CliError> {
    let (lo, hi) = (p.f64("root_min"), p.f64("root_max"));
    if !(lo < hi && hi <= 0.0) {
        return Err(CliError::Config("need root_min < root_max <= 0".into()));
    }
    let rates = BirthDeathRates::quadratic_death(p.f64("rate"))?;
    let grid = log_grid(p.f64("t_min_exp"), p.f64("t_max_exp"), p.usize("t_points"));
    let max_degree = p.usize("max_degree");
    let tol = Tolerances::default();
    let rows = par::map_range(p.usize("samples"), |s| -> Result<Vec<Verdict>, CliError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let (poly, _) = random_real_rooted_pgf(&mut rng, max_degree, lo, hi);
        let mu = Measure::univariate(poly.coeffs().to_vec(), 1e-14)?;
        grid.iter()
            .map(|&t| {
                let ev = evolve(&mu, &rates, t)?;
                Ok(is_real_rooted_with(&ev.poly, ev.escape_bound, &tol).verdict)
            })
            .collect()
    });
    let mut counts = [0usize; 3];
    let mut refuted = Vec::new();
    for (s, row) in rows.into_iter().enumerate() {
        for (t, v) in grid.iter().zip(row?) {
            counts[v as usize] += 1;
            if v == Verdict::Refuted {
                refuted.push(json!({"sample": s, "t": t}));
            }
        }
    }
    Ok(Outcome {
        checks: vec![Check::holds("never refuted", refuted.is_empty(), json!(refuted.len()))],
        report: json!({"t_grid": grid, "stable": counts[0], "refuted": counts[1], "inconclusive": counts[2], "refuted_at": refuted}),
        csv: vec![],
    })
}

pub const DOUBLE_ROOT: Experiment = Experiment {
    name: "double-root-counterexample",
    anchor: "a double root inside (0,1) is not mapped to a stable polynomial",
    summary: "Applies the quadratic death semigroup to (x−r)² and checks the complex roots against the closed form",
    params: || {
        vec![
            spec("r", Kind::Float, json!(0.5), "double root in (0,1)"),
            spec("t", Kind::Float, json!(0.1), "time"),
            spec("tol", Kind::Float, json!(1e-12), "agreement with the closed form"),
        ]
    },
    csv: &[],
    run: |p, _| {
        let (r, t, tol) = (p.f64("r"), p.f64("t"), p.f64("tol"));
        let rep = quadratic_map_counterexample(r, t)?;
        let e2 = (-2.0 * t).exp();
        // closed-form coefficients c + b x + a x²
        let (a, b) = (e2, 1.0 - e2 - 2.0 * r);
        let closed_im = (-rep.closed_form_discriminant).max(0.0).sqrt() / (2.0 * a);
        let closed_re = -b / (2.0 * a);
        let im = rep.roots.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let re = rep.roots.first().map_or(f64::NAN, |z| z.re);
        let checks = vec![
            Check::holds("refuted", rep.certificate.is_refuted(), json!(rep.certificate.verdict)),
            Check::below("discriminant vs closed form", (rep.discriminant - rep.closed_form_discriminant).abs(), tol),
            Check::below("|Im| vs quadratic formula", (im - closed_im).abs(), tol),
            Check::below("Re vs quadratic formula", (re - closed_re).abs(), tol),
        ];
        Ok(Outcome { checks, report: serde_json::to_value(&rep).expect("json"), csv: vec![] })
    },
};

pub const BIRTH_MONOTONICITY: Experiment = Experiment {
    name: "birth-monotonicity",
    anchor: "constant birth rates are necessary: small-time discriminant sign",
    summary: "Evolves δ_k under the given births and checks the degree-(k+2) approximant verdict over small t",
    params: || {
        vec![
            spec("beta", Kind::FloatList, json!([1.0, 2.0]), "β_0, β_1, …"),
            spec("beta_tail", Kind::Float, json!(1.0), "β beyond the listed values"),
            spec("k", Kind::Int, json!(0), "initial state"),
            spec("t_grid", Kind::FloatList, json!([1e-3, 3e-4, 1e-4]), "small times"),
        ]
    },
    csv: &[],
    run: |p, _| {
        let k = p.usize("k");
        let rates = BirthDeathRates::new(
            RateLaw::Table { values: p.f64_list("beta"), tail: p.f64("beta_tail") },
            RateLaw::zero(),
            "table",
        )?;
        let expect_refuted = rates.birth.at(k) < rates.birth.at(k + 1);
        let rep = birth_monotonicity_probe(&rates, k, &p.f64_list("t_grid"))?;
        let agree = rep.records.iter().all(|r| (r.verdict == Verdict::Refuted) == expect_refuted);
        let checks = vec![Check::holds(
            if expect_refuted { "refuted on the grid" } else { "not refuted on the grid" },
            agree,
            json!(rep.records.iter().map(|r| r.verdict).collect::<Vec<_>>()),
        )];
        Ok(Outcome { checks, report: serde_json::to_value(&rep).expect("json"), csv: vec![] })
    },
};

pub const KINGMAN: Experiment = Experiment {
    name: "kingman-bp",
    anchor: "the number of ancestors is a sum of independent Bernoulli and Poisson variables",
    summary: "Evolves the coalescent block count, certifies real-rootedness and fits the Bernoulli–Poisson form",
    params: || {
        vec![
            spec("n", Kind::Int, json!(100), "initial number of lineages"),
            spec("t", Kind::Float, json!(0.5), "time"),
            spec("coalescent", Kind::Bool, json!(true), "δ_k = k(k−1)/2 (else k(k−1))"),
            spec("tol", Kind::Float, json!(1e-8), "bound on the decomposition residual"),
            spec("doubling", Kind::Bool, json!(true), "repeat at 2n and compare residuals"),
            spec("stability_factor", Kind::Float, json!(10.0), "allowed residual growth on doubling"),
        ]
    },
    csv: &[],
    run: |p, _| {
        let (n, t, c, tol) = (p.usize("n"), p.f64("t"), p.bool("coalescent"), p.f64("tol"));
        let one = |n: usize| -> Result<serde_json::Value, CliError> {
            let roots = kingman_log(n, c, t)?.roots(&Tolerances::default())?;
            let ev = kingman(n, c, t)?;
            let d = bp_decompose(&ev.to_measure()?, tol)?;
            Ok(json!({
                "n": n,
                "degree": roots.degree,
                "certified_real": roots.certified_real_count,
                "residual": d.residual,
                "q": d.q,
                "sigma": d.sigma,
                "bernoulli_p": d.p,
            }))
        };
        let first = one(n)?;
        let mut checks = vec![
            Check::holds("real-rooted", first["certified_real"] == first["degree"], first["certified_real"].clone()),
            Check::below("residual", first["residual"].as_f64().unwrap_or(f64::NAN), tol),
            Check::holds("q in {0,1}", first["q"].as_u64().is_some_and(|q| q <= 1), first["q"].clone()),
        ];
        let mut runs = vec![first];
        if p.bool("doubling") {
            let second = one(2 * n)?;
            let (r1, r2) = (runs[0]["residual"].as_f64().unwrap_or(f64::NAN), second["residual"].as_f64().unwrap_or(f64::NAN));
            checks.push(Check::holds("real-rooted at 2n", second["certified_real"] == second["degree"], second["certified_real"].clone()));
            // the ratio is only meaningful above rounding level
            let floor = 1e-15;
            checks.push(Check::below("residual growth on doubling", r2.max(floor) / r1.max(floor), p.f64("stability_factor")));
            runs.push(second);
        }
        Ok(Outcome { checks, report: json!({"runs": runs}), csv: vec![] })
    },
};

pub const WRIGHT_FISHER: Experiment = Experiment {
    name: "wright-fisher",
    anchor: "the generating function solves ∂_t φ = z(1−z) ∂_z² φ",
    summary: "Evaluates the PDE residual of the evolved PGF at random complex points",
    params: || {
        vec![
            spec("n", Kind::Int, json!(5), "initial point mass"),
            spec("t_grid", Kind::FloatList, json!([0.05, 0.2]), "times"),
            spec("samples", Kind::Int, json!(20), "random points in the disk"),
            spec("radius", Kind::Float, json!(0.9), "sample disk radius (<= 0.9)"),
            spec("tol", Kind::Float, json!(1e-6), "bound on the residual"),
        ]
    },
    csv: &[],
    run: |p, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let radius = p.f64("radius");
        let zs: Vec<Complex64> = (0..p.usize("samples"))
            .map(|_| Complex64::from_polar(radius * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>()))
            .collect();
        let mu = Measure::point_mass(&[p.usize("n")]);
        let mut checks = vec![];
        let mut rows = vec![];
        for t in p.f64_list("t_grid") {
            let r = wf_residual(&mu, t, &zs)?;
            checks.push(Check::below(&format!("residual at t={t}"), r, p.f64("tol")));
            rows.push(json!({"t": t, "residual": r}));
        }
        let points: Vec<[f64; 2]> = zs.iter().map(|z| [z.re, z.im]).collect();
        Ok(Outcome { checks, report: json!({"points": points, "residuals": rows}), csv: vec![] })
    },
};

pub const TROTTER: Experiment = Experiment {
    name: "trotter-split",
    anchor: "Trotter product of the linear and quadratic-death semigroups",
    summary: "Compares Lie (and, for reference, Strang) splitting with the combined order-2 chain",
    params: || {
        vec![
            spec("b0", Kind::Float, json!(1.0), "constant birth rate"),
            spec("d1", Kind::Float, json!(1.0), "linear death coefficient"),
            spec("d2", Kind::Float, json!(1.0), "quadratic death coefficient"),
            spec("n", Kind::Int, json!(5), "initial point mass"),
            spec("t", Kind::Float, json!(0.5), "time"),
            spec("steps", Kind::IntList, json!([16, 64, 256, 1024, 4096]), "step counts, increasing"),
            spec("tol", Kind::Float, json!(1e-6), "bound on TV at the largest step count"),
        ]
    },
    csv: &[("trotter.csv", "steps,tv_lie,tv_strang")],
    run: |p, _| {
        let (b0, d1, d2, t) = (p.f64("b0"), p.f64("d1"), p.f64("d2"), p.f64("t"));
        let mu = Measure::point_mass(&[p.usize("n")]);
        let exact = evolve(&mu, &BirthDeathRates::order_two(b0, d1, d2)?, t)?;
        let steps = p.usize_list("steps");
        let rows = par::map(&steps, |&s| -> Result<(f64, f64), CliError> {
            let lie = lie_split_evolve(&mu, b0, d1, d2, t, s)?;
            let strang = strang_split_evolve(&mu, b0, d1, d2, t, s)?;
            Ok((tv_distance(&lie.coeffs(), &exact.coeffs()), tv_distance(&strang.coeffs(), &exact.coeffs())))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let lie: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let monotone = lie.windows(2).all(|w| w[1] < w[0]);
        let last = lie.last().copied().unwrap_or(f64::NAN);
        let checks = vec![
            Check::below("lie TV at largest step count", last, p.f64("tol")),
            Check::holds("lie TV decreasing", monotone, json!(lie)),
        ];
        let mut csv = String::from("steps,tv_lie,tv_strang\n");
        for (s, (l, st)) in steps.iter().zip(&rows) {
            csv.push_str(&format!("{s},{l:e},{st:e}\n"));
        }
        let strang: Vec<f64> = rows.iter().map(|r| r.1).collect();
        Ok(Outcome {
            checks,
            report: json!({"steps": steps, "tv_lie": lie, "tv_strang": strang}),
            csv: vec![("trotter.csv".into(), csv)],
        })
    },
};
