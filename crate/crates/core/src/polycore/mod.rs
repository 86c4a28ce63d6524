//! Polynomial arithmetic, symmetric functions, polarization and roots.

mod multipoly;
pub(crate) mod roots;
mod special;
pub mod sturm;
mod symmetric;
mod unipoly;

pub use multipoly::{AffineForm, MultiPoly};
pub use roots::{float_roots, log_roots, real_roots, LogPoly, Complex64Json, Root, RootClass, RootList, RootSolve};
pub use special::{
    falling_factorial_limit, hermite_monic, hermite_physics, kummer_1f1_poly, kummer_x_zeros,
};
pub use symmetric::{elem_sym, elem_sym_all, polarize, polarize_multi};
pub use unipoly::{gamma, ComplexEval, UniPoly};
