use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::kernels::KernelSpec;
use super::nystrom::{nystrom_matrix, relative_change, NystromOptions, Refinement};
use crate::error::{invalid, Error, Result};
use crate::linalg::{LogDet, LuFactorization};
use crate::special::QuadNode;
use crate::symbols::JumpParams;

/// Pivots of `I + H_n^0` below this modulus are treated as singular.
pub const SINGULAR_PIVOT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientResult {
    /// `e^{-2iαR}·det((I + K_R^0)(I + H_n^0)^{-1})`
    pub value: C64,
    pub logdet_wh: LogDet,
    pub logdet_th: LogDet,
    pub node_count: usize,
    pub refinement_gap: f64,
    pub converged: bool,
    /// Smallest pivot modulus met while factoring `I + H_n^0`.
    pub smallest_pivot: f64,
}

/// The quotient at a fixed node set shared by both kernels.
pub fn quotient_on(
    big_r: f64,
    n: u32,
    p: &JumpParams,
    nodes: &[QuadNode],
) -> Result<QuotientResult> {
    let a = nystrom_matrix(&KernelSpec::wh_limit(big_r, *p)?, nodes);
    let b = nystrom_matrix(&KernelSpec::th_limit(n, *p)?, nodes);
    let lu_b = LuFactorization::new(&b)?;
    let (index, pivot) = lu_b.smallest_pivot();
    if pivot < SINGULAR_PIVOT {
        return Err(Error::Singular { index, pivot });
    }
    let logdet_wh = LuFactorization::new(&a)?.logdet();
    let logdet_th = lu_b.logdet();
    let ratio = logdet_wh.div(&logdet_th);
    let phase = (C64::new(0.0, -2.0) * p.alpha() * big_r).exp();
    Ok(QuotientResult {
        value: phase * ratio.value(),
        logdet_wh,
        logdet_th,
        node_count: nodes.len(),
        refinement_gap: f64::INFINITY,
        converged: false,
        smallest_pivot: pivot,
    })
}

/// `e^{-2iαR}·det((I + K_R^0)(I + H_n^0)^{-1})` on a shared tanh-sinh node set,
/// raising the level until the quotient changes by less than `tol`.
///
/// The individual determinants need not converge: both kernels share the
/// same non-compact behaviour at the corners `x = ±1, y = ∓1`, which cancels
/// in the quotient.
pub fn quotient_det(big_r: f64, n: u32, p: &JumpParams, tol: f64) -> Result<QuotientResult> {
    let opts = NystromOptions {
        start: Some(4),
        ..NystromOptions::with_tol(tol)
    };
    quotient_det_with(big_r, n, p, &opts)
}

pub fn quotient_det_with(
    big_r: f64,
    n: u32,
    p: &JumpParams,
    opts: &NystromOptions,
) -> Result<QuotientResult> {
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let spec = KernelSpec::wh_limit(big_r, *p)?;
    let mut refine = Refinement::new(&spec, opts.family, opts.start, opts.max_nodes);
    let first = refine
        .next_rule()?
        .ok_or_else(|| invalid("starting resolution exceeds the node cap"))?;
    let mut best = quotient_on(big_r, n, p, &first.mapped(-1.0, 1.0))?;
    while let Some(rule) = refine.next_rule()? {
        let next = quotient_on(big_r, n, p, &rule.mapped(-1.0, 1.0))?;
        let gap = relative_change(&LogDet::from_value(best.value), &LogDet::from_value(next.value));
        best = QuotientResult {
            refinement_gap: gap,
            converged: gap < opts.tol,
            ..next
        };
        if best.converged {
            break;
        }
    }
    Ok(best)
}
