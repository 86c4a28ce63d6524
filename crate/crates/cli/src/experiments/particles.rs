use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use stable_pgf::fixtures::{random_order_one_system, random_tstable_measure};
use stable_pgf::measures::{tv_distance, Measure};
use stable_pgf::nacheck::na_all_splits;
use stable_pgf::par;
use stable_pgf::particles::{
    empirical_law, gillespie_batch, samples_csv, truncated_generator_evolve, Configuration, PgfTransform,
};

use crate::params::{spec, Kind};
use crate::{Check, CliError, Experiment, Outcome};

pub const PARTICLES_NA: Experiment = Experiment {
    name: "particles-na",
    anchor: "t-stable laws are negatively associated; order-1 particle systems act by an exact PGF transform",
    summary: "Checks NA on random t-stable box measures and cross-checks the exact transform against the truncated generator and Gillespie sampling",
    params: || {
        vec![
            spec("measures", Kind::Int, json!(50), "random t-stable measures"),
            spec("cap", Kind::Int, json!(16), "cells per measure"),
            spec("tol", Kind::Float, json!(1e-12), "bound on the worst NA slack"),
            spec("systems", Kind::Int, json!(20), "random 2-site order-1 systems (0 skips the cross-oracle)"),
            spec("box", Kind::Int, json!(12), "per-site truncation of the generator oracle"),
            spec("t", Kind::Float, json!(0.5), "evolution time"),
            spec("oracle_tol", Kind::Float, json!(1e-6), "bound on TV(exact, truncated)"),
            spec("gillespie_samples", Kind::Int, json!(100000), "samples for the first system (0 skips)"),
        ]
    },
    csv: &[("gillespie.csv", "seed,sample,site_0,site_1")],
    run: |p, seed| {
        let cap = p.usize("cap");
        let results = par::map_range(p.usize("measures"), |i| -> Result<(f64, bool), CliError> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mu = random_tstable_measure(&mut rng, cap)?;
            let rep = na_all_splits(&mu)?;
            Ok((rep.worst_slack, rep.passed()))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
        let mut checks = vec![
            Check::below("worst NA slack", worst, p.f64("tol") * (1.0 + f64::EPSILON)),
            Check::holds("all NA", results.iter().all(|r| r.1), json!(results.iter().filter(|r| !r.1).count())),
        ];
        let mixture = Measure::new(vec![1, 1], vec![0.5, 0.0, 0.0, 0.5], 0.0)?;
        let mix = na_all_splits(&mixture)?;
        let witness = mix.first_violation().cloned();
        checks.push(Check::holds("diagonal mixture is not NA", !mix.passed(), serde_json::to_value(&witness).expect("json")));

        let (b, t) = (p.usize("box"), p.f64("t"));
        let shape = [b, b];
        let mut oracle = vec![];
        let mut csv = vec![];
        let mut gillespie = serde_json::Value::Null;
        for s in 0..p.usize("systems") {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5157);
            rng.set_stream(s as u64);
            let system = random_order_one_system(&mut rng, 2);
            let init = [rng.random_range(0..=2usize), rng.random_range(0..=2usize)];
            let mu = Measure::point_mass(&init);
            let exact = PgfTransform::from_measure(&mu).evolve(&system, t)?.to_measure(&shape)?;
            let trunc = truncated_generator_evolve(&mu, &system, t, &shape)?;
            let tv = tv_distance(&exact.weights, &trunc.weights) + 0.5 * (exact.tail_bound + trunc.tail_bound);
            oracle.push(tv);
            let n = p.usize("gillespie_samples");
            if s == 0 && n > 0 {
                let start = Configuration::new(init.iter().map(|&k| k as u64).collect());
                let samples = gillespie_batch(&system, &start, t, seed, n)?;
                let (w, outside) = empirical_law(&samples, &shape);
                let tv = tv_distance(&w, &trunc.weights) + 0.5 * outside;
                let states = trunc.weights.len() as f64;
                let bound = 4.0 * (states / n as f64).sqrt();
                checks.push(Check::below("Gillespie TV", tv, bound));
                gillespie = json!({"samples": n, "tv": tv, "bound": bound, "system": system, "init": init});
                csv.push(("gillespie.csv".to_string(), samples_csv(seed, &samples)));
            }
        }
        if !oracle.is_empty() {
            let worst_tv = oracle.iter().copied().fold(0.0, f64::max);
            checks.push(Check::below("TV(exact transform, truncated generator)", worst_tv, p.f64("oracle_tol")));
        }
        Ok(Outcome {
            checks,
            report: json!({
                "na": {"measures": results.len(), "worst_slack": worst, "mixture": mix},
                "cross_oracle_tv": oracle,
                "gillespie": gillespie,
            }),
            csv,
        })
    },
};
