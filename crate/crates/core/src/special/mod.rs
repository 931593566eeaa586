//! Special functions and quadrature rules.

mod barnes;
mod gamma;
mod laguerre;
mod quadrature;

pub use barnes::{barnes_g, log_barnes_g, ZETA_PRIME_MINUS_ONE};
pub use gamma::{gamma, log_gamma};
pub use laguerre::{laguerre_eval, laguerre_sequence};
pub use quadrature::{QuadFamily, QuadNode, QuadratureRule, TANH_SINH_WEIGHT_FLOOR};

/// `true` if `z` is a nonpositive integer (a pole of Γ, a zero of G).
pub(crate) fn is_nonpositive_integer(z: num_complex::Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}
