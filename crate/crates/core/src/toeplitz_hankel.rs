//! Finite Toeplitz+Hankel matrices `(φ_{j-k} + φ_{j+k+1})`, their
//! determinants and large-`n` prediction, and truncation checks of the exact
//! identities satisfied by smooth even symbols.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{lu_logdet, ComplexMatrix, LogDet, LuFactorization};
use crate::special::{log_barnes_g, QuadratureRule};
use crate::symbols::{FourierSymbol, JumpParams, RegularizedParams, SmoothEvenSymbol};

/// `T_n(φ) + H_n(φ)` together with its dimension.
#[derive(Debug, Clone)]
pub struct THMatrix {
    pub n: usize,
    pub matrix: ComplexMatrix,
}

/// Coefficients `φ_k` for `k` in `lo..=hi`, indexed from zero.
struct CoeffTable {
    lo: i64,
    values: Vec<C64>,
}

impl CoeffTable {
    fn new(sym: &(impl FourierSymbol + ?Sized), lo: i64, hi: i64) -> Self {
        CoeffTable {
            lo,
            values: (lo..=hi).map(|k| sym.coeff(k)).collect(),
        }
    }

    fn get(&self, k: i64) -> C64 {
        self.values[(k - self.lo) as usize]
    }
}

/// `rows × cols` block of `T(φ) + H(φ)`.
fn th_block(sym: &(impl FourierSymbol + ?Sized), rows: usize, cols: usize) -> ComplexMatrix {
    let table = CoeffTable::new(sym, -(cols as i64), (rows + cols) as i64);
    ComplexMatrix::par_from_fn(rows, cols, |j, k| {
        let (j, k) = (j as i64, k as i64);
        table.get(j - k) + table.get(j + k + 1)
    })
}

pub fn build_th(n: usize, sym: &(impl FourierSymbol + ?Sized)) -> Result<THMatrix> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(THMatrix {
        n,
        matrix: th_block(sym, n, n),
    })
}

/// `det(T_n(φ) + H_n(φ))` for the two-jump symbol.
pub fn det_th(n: usize, p: &JumpParams) -> Result<LogDet> {
    lu_logdet(&build_th(n, p)?.matrix)
}

/// `2^{4α²} G(1 - 2α) G(1 + 2α)`, returned as a logarithm.
pub fn log_theorem_constant(p: &JumpParams) -> Result<C64> {
    let a = p.alpha();
    Ok(4.0 * a * a * 2f64.ln() + log_barnes_g(1.0 - 2.0 * a)? + log_barnes_g(1.0 + 2.0 * a)?)
}

/// `2^{4α²} G(1 - 2α) G(1 + 2α)`; zero if either Barnes factor vanishes.
pub fn theorem_constant(p: &JumpParams) -> C64 {
    log_theorem_constant(p).map(|l| l.exp()).unwrap_or(C64::new(0.0, 0.0))
}

/// A large-size prediction; `degenerate` marks a vanishing Barnes factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotic {
    pub value: C64,
    pub degenerate: bool,
}

/// `n^{-3α²} 2^{4α²} G(1 - 2α) G(1 + 2α)`.
pub fn th_asymptotic(n: usize, p: &JumpParams) -> Result<Asymptotic> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let a = p.alpha();
    Ok(match log_theorem_constant(p) {
        Ok(c) => Asymptotic {
            value: (c - 3.0 * a * a * (n as f64).ln()).exp(),
            degenerate: false,
        },
        Err(_) => Asymptotic {
            value: C64::new(0.0, 0.0),
            degenerate: true,
        },
    })
}

/// Both sides of the factorized Toeplitz+Hankel determinant identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: C64,
    pub rhs: C64,
    /// `|lhs - rhs| / |lhs|`
    pub gap: f64,
}

/// Compares `det(T_n(φ) + H_n(φ))` with
/// `G[φ]^n · det T(φ^{-1})(T(φ) + H(φ)) · det(I + Q_n H(φ^-/φ^+) Q_n)`,
/// both infinite determinants truncated to `M`.
///
/// The first operator is a product, so its `M × M` section is formed with an
/// inner dimension of `2M`; sectioning each factor separately would change
/// the determinant by a factor that does not vanish as `M` grows. The Hankel
/// coefficients of `φ^-/φ^+` come from the trapezoid rule on `max(4M, 64)`
/// circle points.
pub fn verify_th_identity(
    sym: &(impl SmoothEvenSymbol + ?Sized),
    n: usize,
    m: usize,
) -> Result<IdentityCheck> {
    if n == 0 || m <= n {
        return Err(invalid(format!("need 1 <= n < M, got n={n}, M={m}")));
    }
    sym.validate()?;
    let lhs = lu_logdet(&build_th(n, sym)?.matrix)?;

    let inv = CoeffTable::new(&InverseOf(sym), -(2 * m as i64), m as i64);
    let toeplitz_inv = ComplexMatrix::par_from_fn(m, 2 * m, |j, k| inv.get(j as i64 - k as i64));
    let product = toeplitz_inv.matmul(&th_block(sym, 2 * m, m))?;
    let first = lu_logdet(&product)?;

    let points = (4 * m).max(64);
    let ratio: Vec<C64> = (0..=2 * m as i64)
        .map(|k| sym.ratio_coeff(k, points))
        .collect();
    let q = m - n;
    let second = ComplexMatrix::par_from_fn(q, q, |j, k| {
        let h = ratio[j + k + 2 * n + 1];
        if j == k {
            h + 1.0
        } else {
            h
        }
    });
    let second = lu_logdet(&second)?;

    let g = LogDet::from_value(sym.geometric_mean());
    let g_pow = LogDet::new(n as f64 * g.log_magnitude, n as f64 * g.phase);
    let rhs = g_pow.mul(&first).mul(&second);
    let (lhs, rhs) = (lhs.value(), rhs.value());
    Ok(IdentityCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).norm() / lhs.norm(),
    })
}

/// Adapter exposing the coefficients of `1/φ` as a [`FourierSymbol`].
struct InverseOf<'a, S: ?Sized>(&'a S);

impl<S: SmoothEvenSymbol + ?Sized> FourierSymbol for InverseOf<'_, S> {
    fn coeff(&self, k: i64) -> C64 {
        self.0.inverse_coeff(k)
    }
}

/// Frobenius norm of the leading `(M/2) × (M/2)` block of
/// `(T_M(φ) + H_M(φ))(T_M(φ^{-1}) + H_M(φ^{-1})) - I`.
pub fn inverse_identity_residual(sym: &(impl SmoothEvenSymbol + ?Sized), m: usize) -> Result<f64> {
    if m < 2 {
        return Err(invalid("M must be at least 2"));
    }
    sym.validate()?;
    let a = th_block(sym, m, m);
    let b = th_block(&InverseOf(sym), m, m);
    let half = m / 2;
    let prod = a.matmul(&b)?.block(0, 0, half, half);
    Ok(prod.sub(&ComplexMatrix::identity(half))?.frobenius_norm())
}

/// `|det(P A P) - det(A)·det(Q A^{-1} Q)| / |det(P A P)|`, with `P` the
/// projection onto the first `n` coordinates and `Q = I - P`.
pub fn complementary_minor_gap(a: &ComplexMatrix, n: usize) -> Result<f64> {
    let size = a.rows();
    if !a.is_square() || n == 0 || n >= size {
        return Err(invalid(format!("need a square matrix larger than n = {n}")));
    }
    let lu = LuFactorization::new(a)?;
    let inv = lu.solve(&ComplexMatrix::identity(size))?;
    let lhs = lu_logdet(&a.block(0, 0, n, n))?.value();
    let tail = lu_logdet(&inv.block(n, n, size - n, size - n))?;
    let rhs = lu.logdet().mul(&tail).value();
    Ok((lhs - rhs).norm() / lhs.norm())
}

/// Entry `(j, k)` of the Hankel part for the regularized circle symbol:
/// `i^{m+1} (sin πα/π) ∫_{-r}^{r} [(1 + rx)(r + x) / ((1 - rx)(r - x))]^α x^m dx`
/// with `m = 2n + j + k`, by tanh-sinh quadrature at the given level.
pub fn hankel_entry_reg_with(
    j: usize,
    k: usize,
    n: usize,
    p: &RegularizedParams,
    level: u32,
) -> Result<C64> {
    let rule = QuadratureRule::tanh_sinh(level)?;
    let r = p.r();
    let a = p.alpha();
    let m = 2 * n + j + k;
    let integral = rule.integrate_complex_on(-r, r, |node| {
        // the four factors are positive on (-r, r); endpoint distances are exact
        let log_w = (1.0 + r * node.x).ln() + node.from_lo.ln()
            - (1.0 - r * node.x).ln()
            - node.from_hi.ln();
        (a * log_w).exp() * node.x.powi(m as i32)
    });
    let i_pow = C64::new(0.0, 1.0).powu(((m + 1) % 4) as u32);
    Ok(i_pow * (std::f64::consts::PI * a).sin() / std::f64::consts::PI * integral)
}

/// [`hankel_entry_reg_with`] at tanh-sinh level 7.
pub fn hankel_entry_reg(j: usize, k: usize, n: usize, p: &RegularizedParams) -> Result<C64> {
    hankel_entry_reg_with(j, k, n, p, 7)
}
