//! Stable and t-stable probability generating functions on ℕ^n.
//!
//! The crate is organised bottom-up:
//!
//! * [`polycore`]: dense univariate / sparse multivariate polynomials over
//!   exact rationals or floats with forward error bounds, elementary
//!   symmetric functions, polarization and root finding.
//! * [`stability`]: real-rootedness, multivariate stability and t-stability
//!   certificates.
//! * [`measures`]: measures on finite boxes of ℕ^n identified with their
//!   generating functions, plus the Bernoulli–Poisson product form.
//! * [`bdchain`]: birth-death chains on truncated state spaces and the
//!   experiments built on their evolved generating functions.
//! * [`particles`]: multi-site independent-chain / order-1 reaction-diffusion
//!   systems (exact transform, truncated generator, Gillespie sampler).
//! * [`nacheck`]: exhaustive negative-association checks on small boxes.
//! * [`fixtures`]: seeded random inputs for the randomized checks.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bdchain;
pub mod error;
pub mod fixtures;
pub mod measures;
pub mod nacheck;
pub mod par;
pub mod particles;
pub mod polycore;
pub mod scalar;
pub mod stability;
pub mod tolerances;

pub use error::{Error, Result};
pub use measures::{BpDecomposition, Measure};
pub use polycore::{MultiPoly, Root, RootList, UniPoly};
pub use scalar::{Rational, Scalar};
pub use stability::{StabilityCertificate, Verdict};
pub use tolerances::Tolerances;
