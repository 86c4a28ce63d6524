//! Default numerical tolerances, kept in one place.

use serde::{Deserialize, Serialize};

/// Width to which exact isolating intervals are refined.
pub const ISOLATION_WIDTH: f64 = 1e-12;
/// Relative |Im| threshold below which a float root counts as real.
pub const IMAG_REL: f64 = 1e-8;
/// Absolute tolerance on the Poisson tail dropped by uniformization.
pub const UNIFORMIZATION_TAIL: f64 = 1e-16;
/// Escaping-mass target when a truncation level is auto-selected.
pub const TRUNCATION: f64 = 1e-12;
/// Default number of approximants checked by t-stability certification.
pub const M_MAX: usize = 20;
/// Roots of a decomposed PGF beyond this magnitude are folded into σ.
pub const BP_ROOT_CUTOFF: f64 = 1e6;
/// Cell cap for exhaustive up-set enumeration.
pub const UPSET_CELL_CAP: usize = 16;
/// Per-unit-mass slack for negative-association pass/fail.
pub const NA_SLACK: f64 = 1e-12;
/// Refutations need |Im| beyond this multiple of the perturbation radius.
pub const REFUTE_MARGIN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub isolation_width: f64,
    pub imag_rel: f64,
    pub uniformization_tail: f64,
    pub truncation: f64,
    pub refute_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            isolation_width: ISOLATION_WIDTH,
            imag_rel: IMAG_REL,
            uniformization_tail: UNIFORMIZATION_TAIL,
            truncation: TRUNCATION,
            refute_margin: REFUTE_MARGIN,
        }
    }
}
