//! The experiment registry.

mod chains;
mod laws;
mod particles;
mod tstable;

use crate::Experiment;

pub static ALL: [Experiment; 10] = [
    chains::QUAD_DEATH,
    chains::DOUBLE_ROOT,
    chains::BIRTH_MONOTONICITY,
    laws::HERMITE,
    laws::KUMMER,
    chains::KINGMAN,
    chains::WRIGHT_FISHER,
    chains::TROTTER,
    particles::PARTICLES_NA,
    tstable::TSTABLE,
];

/// Log-spaced grid `10^{lo} … 10^{hi}` with `points` entries.
pub(crate) fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![hi];
    }
    (0..points).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (points - 1) as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut names: Vec<&str> = ALL.iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 10);
    }

    #[test]
    fn defaults_validate() {
        for e in &ALL {
            let schema = (e.params)();
            crate::params::Params::resolve(&schema, &Default::default()).unwrap();
        }
    }

    #[test]
    fn grid() {
        let g = log_grid(-3.0, 0.0, 4);
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[3] - 1.0).abs() < 1e-15);
    }
}
