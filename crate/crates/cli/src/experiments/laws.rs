use serde_json::json;

use stable_pgf::bdchain::{hermite_root_law, kummer_root_law, trajectories_csv};
use stable_pgf::polycore::kummer_x_zeros;

use crate::params::{spec, Kind};
use crate::{Check, CliError, Experiment, Outcome};

pub const HERMITE: Experiment = Experiment {
    name: "hermite-law",
    anchor: "roots near a multiple root w < 0 spread like Hermite zeros: (root − w)/√t → 2√(w(w−1))·h_i",
    summary: "Tracks the roots split off an n-fold root under quadratic death at small t",
    params: || {
        vec![
            spec("n", Kind::Int, json!(3), "multiplicity of the initial root"),
            spec("w", Kind::Float, json!(-0.5), "initial root (< 0)"),
            spec("q_roots", Kind::FloatList, json!([]), "further roots of the initial law"),
            spec("j_min", Kind::Int, json!(4), "grid t = 4^-j starts at j_min"),
            spec("j_max", Kind::Int, json!(10), "and ends at j_max"),
            spec("t_final", Kind::Float, json!(1e-6), "time of the threshold check"),
            spec("tol", Kind::Float, json!(1e-2), "bound on the deviation at t_final"),
        ]
    },
    csv: &[("hermite_roots.csv", "t,root_index,re,im")],
    run: |p, _| {
        let (j_min, j_max) = (p.usize("j_min"), p.usize("j_max"));
        if j_min > j_max {
            return Err(CliError::Config("j_min must not exceed j_max".into()));
        }
        let mut grid: Vec<f64> = (j_min..=j_max).map(|j| 4f64.powi(-(j as i32))).collect();
        let final_t = p.f64("t_final");
        grid.push(final_t);
        let rep = hermite_root_law(p.f64("w"), p.usize("n"), &p.f64_list("q_roots"), &grid)?;
        let values = rep.values();
        let on_grid = &values[..values.len() - 1];
        let checks = vec![
            Check::below(&format!("deviation at t={final_t}"), values[values.len() - 1], p.f64("tol")),
            Check::holds("decreasing along 4^-j", on_grid.windows(2).all(|w| w[1] < w[0]), json!(on_grid)),
        ];
        let csv = trajectories_csv(&rep.records);
        Ok(Outcome { checks, report: serde_json::to_value(&rep).expect("json"), csv: vec![("hermite_roots.csv".into(), csv)] })
    },
};

pub const KUMMER: Experiment = Experiment {
    name: "kummer-law",
    anchor: "roots near 0 scale like t times the zeros of 1F1[1−n, 1, −1/x]",
    summary: "Tracks the roots of the evolved x^n at small t against the Kummer-function zeros (or the expansion zeros)",
    params: || {
        vec![
            spec("n", Kind::Int, json!(3), "initial point mass"),
            spec("t_grid", Kind::FloatList, json!([1e-3, 1e-4, 1e-5]), "times, decreasing; the last one is checked"),
            spec("tol", Kind::Float, json!(1e-3), "bound on |root/t − z_i| at the last time"),
            spec("reference", Kind::Str, json!("1f1"), "`1f1` (Kummer zeros) or `expansion` (falling-factorial expansion zeros)"),
            spec("count_max", Kind::Int, json!(12), "check n−1 negative Kummer zeros for n ≤ count_max"),
        ]
    },
    csv: &[("kummer_roots.csv", "t,root_index,re,im")],
    run: |p, _| {
        let reference = p.str("reference");
        if reference != "1f1" && reference != "expansion" {
            return Err(CliError::Config(format!("reference must be `1f1` or `expansion`, got `{reference}`")));
        }
        let grid = p.f64_list("t_grid");
        if grid.is_empty() {
            return Err(CliError::Config("t_grid must not be empty".into()));
        }
        let rep = kummer_root_law(p.usize("n"), &grid)?;
        let last = rep.records.last().expect("nonempty grid");
        let value = if reference == "1f1" { last.report_value } else { last.corrected_value.unwrap_or(f64::INFINITY) };
        let counts: Vec<usize> = (1..=p.usize("count_max")).map(|n| kummer_x_zeros(n).iter().filter(|z| **z < 0.0).count()).collect();
        let counts_ok = counts.iter().enumerate().all(|(i, &c)| c == i);
        let checks = vec![
            Check::below(&format!("deviation ({reference}) at t={}", last.t), value, p.f64("tol")),
            Check::holds("n−1 negative Kummer zeros", counts_ok, json!(counts)),
        ];
        let csv = trajectories_csv(&rep.records);
        Ok(Outcome { checks, report: serde_json::to_value(&rep).expect("json"), csv: vec![("kummer_roots.csv".into(), csv)] })
    },
};
