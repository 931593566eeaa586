//! Matrix elements of `W(σ)` and `H(σ)` on `L²(0, ∞)` in the orthonormal
//! Laguerre basis `f_j(x) = √2 e^{-x} L_j(2x)`.
//!
//! After the inner integrals are done in closed form, the elements become
//! single integrals over the line,
//!
//! * `W`: `(1/2π) ∫ σ(ξ) z(ξ)^{k-j} 2dξ/(1 + ξ²)`,
//! * `H`: `(1/2π) ∫ σ(ξ) z(ξ)^{-j-k} 2dξ/(1 + iξ)²`,
//!
//! with `z(ξ) = (1 + iξ)/(1 - iξ)`. They are Fourier coefficients of the
//! circle symbol `φ(z) = σ(i(1 - z)/(1 + z))`. The line integrals are split at
//! `ξ = 0, ±1` and each piece is done by tanh-sinh quadrature; the two outer
//! pieces go through the half-line map.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::ComplexMatrix;
use crate::special::{laguerre_eval, QuadNode, QuadratureRule};
use crate::symbols::{sigma_r_eval, RegularizedParams};

/// A symbol on the real line.
pub trait LineSymbol: Sync {
    fn eval(&self, xi: f64) -> C64;
}

/// `σ ≡ 1`, the symbol of the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitSymbol;

impl LineSymbol for UnitSymbol {
    fn eval(&self, _xi: f64) -> C64 {
        C64::new(1.0, 0.0)
    }
}

/// The regularized two-jump symbol `σ_r`.
#[derive(Debug, Clone, Copy)]
pub struct SigmaR(pub RegularizedParams);

impl LineSymbol for SigmaR {
    fn eval(&self, xi: f64) -> C64 {
        sigma_r_eval(xi, &self.0)
    }
}

/// `c·σ`.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<S> {
    pub c: C64,
    pub inner: S,
}

impl<S: LineSymbol> LineSymbol for Scaled<S> {
    fn eval(&self, xi: f64) -> C64 {
        self.c * self.inner.eval(xi)
    }
}

/// Quadrature budget for the line integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadBudget {
    /// Tanh-sinh level of the finest rule; the next coarser one is used to
    /// estimate the error.
    pub level: u32,
    pub tol: f64,
}

impl Default for QuadBudget {
    fn default() -> Self {
        QuadBudget { level: 8, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixElement {
    pub value: C64,
    /// Change from the next coarser level.
    pub gap: f64,
    pub converged: bool,
}

/// Nodes covering the whole line, split at `0` and `±1`. Tail nodes beyond
/// `1e150` are dropped: the integrands decay like `ξ^{-2}` there, so their
/// contribution is below `1e-150`.
fn line_nodes(level: u32) -> Result<Vec<QuadNode>> {
    let rule = QuadratureRule::tanh_sinh(level)?;
    let mut nodes = Vec::new();
    for t in rule.mapped_half_line().into_iter().filter(|t| t.x < 1e150) {
        nodes.push(QuadNode { x: 1.0 + t.x, ..t });
        nodes.push(QuadNode { x: -1.0 - t.x, ..t });
    }
    nodes.extend(rule.mapped(-1.0, 0.0));
    nodes.extend(rule.mapped(0.0, 1.0));
    Ok(nodes)
}

fn line_integral(level: u32, f: &(impl Fn(f64) -> C64 + ?Sized)) -> Result<C64> {
    Ok(line_nodes(level)?
        .iter()
        .map(|n| f(n.x) * n.weight)
        .sum::<C64>()
        / (2.0 * PI))
}

fn refined(budget: &QuadBudget, f: impl Fn(f64) -> C64) -> Result<MatrixElement> {
    if budget.level < 2 {
        return Err(invalid("quadrature level must be at least 2"));
    }
    let fine = line_integral(budget.level, &f)?;
    let coarse = line_integral(budget.level - 1, &f)?;
    let gap = (fine - coarse).norm();
    Ok(MatrixElement {
        value: fine,
        gap,
        converged: gap < budget.tol,
    })
}

fn z_of(xi: f64) -> C64 {
    C64::new(1.0, xi) / C64::new(1.0, -xi)
}

/// `z^m` for `|z| = 1` through the angle, to avoid repeated multiplication.
fn unit_pow(z: C64, m: i64) -> C64 {
    C64::from_polar(1.0, m as f64 * z.arg())
}

/// Entry `(j, k)` of `W(σ)` in the Laguerre basis.
pub fn wh_matrix_element(
    j: usize,
    k: usize,
    sigma: &(impl LineSymbol + ?Sized),
    budget: &QuadBudget,
) -> Result<MatrixElement> {
    let m = k as i64 - j as i64;
    refined(budget, |xi| {
        sigma.eval(xi) * unit_pow(z_of(xi), m) * (2.0 / (1.0 + xi * xi))
    })
}

/// Entry `(j, k)` of `H(σ)` in the Laguerre basis.
pub fn hankel_matrix_element(
    j: usize,
    k: usize,
    sigma: &(impl LineSymbol + ?Sized),
    budget: &QuadBudget,
) -> Result<MatrixElement> {
    let m = -((j + k) as i64);
    refined(budget, |xi| {
        let d = C64::new(1.0, xi);
        sigma.eval(xi) * unit_pow(z_of(xi), m) * 2.0 / (d * d)
    })
}

/// The `size × size` section of `W(σ) + H(σ)` in the Laguerre basis.
pub fn basis_matrix(
    size: usize,
    sigma: &(impl LineSymbol + ?Sized),
    budget: &QuadBudget,
) -> Result<ComplexMatrix> {
    use rayon::prelude::*;
    let entries: Vec<C64> = (0..size * size)
        .into_par_iter()
        .map(|idx| {
            let (j, k) = (idx / size, idx % size);
            Ok(wh_matrix_element(j, k, sigma, budget)?.value
                + hankel_matrix_element(j, k, sigma, budget)?.value)
        })
        .collect::<Result<_>>()?;
    ComplexMatrix::from_vec(size, size, entries)
}

/// Basis function `f_j(x) = √2 e^{-x} L_j(2x)`.
pub fn basis_function(j: usize, x: f64) -> f64 {
    std::f64::consts::SQRT_2 * (-x).exp() * laguerre_eval(j, 2.0 * x)
}

/// `(1/2π) ∫∫∫ e^{-iξ(x-y)} (σ(ξ) - 1) f_k(y) f_j(x) dy dx dξ` by nested
/// quadrature: composite Gauss-Legendre for the inner integrals over
/// `(0, 40)` and for the outer one over `|ξ| ≤ 200`.
///
/// This is the uncollapsed form of the convolution part of the `W` element,
/// so it should equal `wh_matrix_element(j, k, σ) - δ_jk`.
pub fn wh_triple_integral(j: usize, k: usize, sigma: &(impl LineSymbol + ?Sized)) -> Result<C64> {
    let panel = QuadratureRule::gauss_legendre(16)?;
    let inner_nodes: Vec<QuadNode> = (0..160)
        .flat_map(|p| panel.mapped(p as f64 * 0.25, (p + 1) as f64 * 0.25))
        .collect();
    let fj: Vec<f64> = inner_nodes.iter().map(|n| basis_function(j, n.x)).collect();
    let fk: Vec<f64> = inner_nodes.iter().map(|n| basis_function(k, n.x)).collect();
    let transform = |xi: f64, f: &[f64], sign: f64| -> C64 {
        inner_nodes
            .iter()
            .zip(f)
            .map(|(n, &v)| C64::from_polar(1.0, sign * xi * n.x) * (v * n.weight))
            .sum()
    };
    let breaks = [
        0.0, 0.5, 0.8, 0.9, 0.95, 1.0, 1.05, 1.1, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0,
        200.0,
    ];
    let outer = QuadratureRule::gauss_legendre(48)?;
    let mut total = C64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        for (a, b) in [(w[0], w[1]), (-w[1], -w[0])] {
            for n in outer.mapped(a, b) {
                let s = sigma.eval(n.x) - 1.0;
                // ∫ e^{-iξx} f_j(x) dx and ∫ e^{iξy} f_k(y) dy
                total += s * transform(n.x, &fj, -1.0) * transform(n.x, &fk, 1.0) * n.weight;
            }
        }
    }
    Ok(total / (2.0 * PI))
}
