use serde_json::json;

use stable_pgf::measures::Measure;
use num_complex::Complex64;
use stable_pgf::polycore::UniPoly;
use stable_pgf::stability::{certify_tstable_uni, tstable_approximant_uni};
use stable_pgf::Verdict;

use crate::params::{spec, Kind};
use crate::{Check, CliError, Experiment, Outcome};

pub const TSTABLE: Experiment = Experiment {
    name: "tstable-certify",
    anchor: "t-stable functions are limits of the approximants f_m = Σ c_α [m]_α / m^{|α|} x^α",
    summary: "Certifies or refutes t-stability of a coefficient array through its approximants",
    params: || {
        vec![
            spec("input", Kind::Str, json!("poisson"), "`poisson`, `bernoulli` or `coeffs`"),
            spec("sigma", Kind::Float, json!(1.0), "Poisson rate"),
            spec("truncate", Kind::Int, json!(60), "Poisson truncation degree"),
            spec("p", Kind::FloatList, json!([0.3, 0.5]), "Bernoulli parameters"),
            spec("coeffs", Kind::FloatList, json!([]), "explicit nonnegative coefficients"),
            spec("m_max", Kind::Int, json!(20), "approximants checked"),
            spec("expect", Kind::Str, json!("not-refuted"), "`not-refuted` or `refuted`"),
            spec("m_list", Kind::IntList, json!([5, 10, 20]), "approximants whose sup error on |x| ≤ 1 must decrease"),
        ]
    },
    csv: &[],
    run: |p, _| {
        let expect = p.str("expect");
        if expect != "not-refuted" && expect != "refuted" {
            return Err(CliError::Config(format!("expect must be `not-refuted` or `refuted`, got `{expect}`")));
        }
        let (coeffs, tail) = match p.str("input") {
            "poisson" => {
                let m = Measure::poisson(p.f64("sigma"), p.usize("truncate"))?;
                (m.weights, m.tail_bound)
            }
            "bernoulli" => {
                let ps = p.f64_list("p");
                let mut w = vec![1.0];
                for &q in &ps {
                    w = (&UniPoly::new(w) * &UniPoly::new(vec![1.0 - q, q])).coeffs().to_vec();
                }
                (w, 0.0)
            }
            "coeffs" => (p.f64_list("coeffs"), 0.0),
            other => return Err(CliError::Config(format!("unknown input `{other}`"))),
        };
        if coeffs.is_empty() {
            return Err(CliError::Config("empty coefficient array".into()));
        }
        let f = UniPoly::new(coeffs.clone());
        let cert = certify_tstable_uni(&f, tail, p.usize("m_max"))?;
        let refuted = cert.verdict == Verdict::Refuted;
        let mut checks = vec![Check::holds(expect, refuted == (expect == "refuted"), json!(cert.verdict))];
        let mut sup = vec![];
        if p.str("input") == "poisson" {
            let sigma = p.f64("sigma");
            // f(x) = e^{σ(x−1)} on the closed unit disk, sampled on the circle
            // and the real segment
            let pts: Vec<Complex64> = (0..256)
                .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 256.0))
                .chain((0..=64).map(|k| Complex64::new(-1.0 + k as f64 / 32.0, 0.0)))
                .collect();
            for m in p.usize_list("m_list") {
                let fm = tstable_approximant_uni(&f, m);
                let err = pts
                    .iter()
                    .map(|&z| (fm.eval_complex(z).value - (sigma * (z - 1.0)).exp()).norm())
                    .fold(0.0, f64::max);
                sup.push(json!({"m": m, "sup_error": err}));
            }
            let errs: Vec<f64> = sup.iter().map(|v| v["sup_error"].as_f64().unwrap_or(f64::NAN)).collect();
            checks.push(Check::holds("sup error decreasing in m", errs.windows(2).all(|w| w[1] < w[0]), json!(errs)));
        }
        Ok(Outcome {
            checks,
            report: json!({"coefficients": coeffs.len(), "tail_bound": tail, "certificate": cert, "approximant_errors": sup}),
            csv: vec![],
        })
    },
};
