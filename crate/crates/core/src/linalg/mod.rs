//! Dense complex matrices, LU with partial pivoting, log-determinants,
//! linear solves and smallest-singular-value estimation.

mod lu;
mod matrix;
mod singular;

pub use lu::{lu_logdet, solve, LogDet, LuFactorization};
pub(crate) use lu::wrap_phase;
pub use matrix::ComplexMatrix;
pub use singular::smallest_singular;
