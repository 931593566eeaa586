//! Nyström evaluation of Fredholm determinants `det(I + K)` for the even-sine
//! kernel on `(0, R)` and for the regularized and limit kernels on `(-r, r)`
//! and `(-1, 1)`, the quotient of the two limit determinants, and size
//! diagnostics for `K_R^0 - H_n^0` and `I + H_n^0`.

mod diagnostics;
mod kernels;
mod nystrom;
mod quotient;

use num_complex::Complex64 as C64;

pub use diagnostics::{diff_norm_diag, min_sv_i_plus_h, DiffNorm, DiffNormOptions};
pub use kernels::{kernel_eval, Kernel, KernelSpec};
pub use nystrom::{
    nystrom_det, nystrom_det_on, nystrom_det_with, nystrom_matrix, NystromOptions,
    NystromResult, NODE_CAP,
};
pub use quotient::{quotient_det, quotient_det_with, quotient_on, QuotientResult, SINGULAR_PIVOT};

use crate::error::Result;
use crate::symbols::JumpParams;
use crate::toeplitz_hankel::log_theorem_constant;

/// `e^{-2iαR} R^{-3α²} 2^{4α²} G(1 - 2α) G(1 + 2α)`.
pub fn wh_prediction(big_r: f64, p: &JumpParams) -> Result<C64> {
    let a = p.alpha();
    let c = log_theorem_constant(p)?;
    Ok((c - 3.0 * a * a * big_r.ln() - C64::new(0.0, 2.0) * a * big_r).exp())
}
