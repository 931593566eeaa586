use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::kernels::{Kernel, KernelSpec};
use super::nystrom::{expm1, nystrom_matrix};
use crate::error::{invalid, Result};
use crate::linalg::{smallest_singular, ComplexMatrix};
use crate::special::{QuadNode, QuadratureRule};
use crate::symbols::JumpParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffNormOptions {
    /// Tanh-sinh level of the Nyström grid on `(-1, 1)`.
    pub level: u32,
    /// Exponent of the weighted Hilbert-space bound; defaults to `-2 Re α + ε`.
    pub b: Option<f64>,
    pub epsilon: f64,
    /// Width of the corner neighbourhood `(1 - δ, 1)`.
    pub delta: f64,
    /// Tanh-sinh level of the one-dimensional bound integrals.
    pub bound_level: u32,
}

impl Default for DiffNormOptions {
    fn default() -> Self {
        DiffNormOptions {
            level: 5,
            b: None,
            epsilon: 0.05,
            delta: 0.25,
            bound_level: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffNorm {
    /// Frobenius norm of `W^{1/2}(K_R^0 - H_n^0)W^{1/2}`.
    pub frobenius: f64,
    /// `|sin πα/π|·sqrt(I₁·I₂)` for the first summand of the corner split.
    pub bound: f64,
    pub b: f64,
    pub node_count: usize,
}

struct Difference {
    wh: KernelSpec,
    th: KernelSpec,
}

impl Kernel for Difference {
    fn domain(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn eval(&self, x: &QuadNode, y: &QuadNode) -> C64 {
        self.wh.eval(x, y) - self.th.eval(x, y)
    }

    fn eval_weighted(&self, x: &QuadNode, y: &QuadNode) -> C64 {
        self.wh.eval_weighted(x, y) - self.th.eval_weighted(x, y)
    }

    fn default_family(&self) -> crate::special::QuadFamily {
        crate::special::QuadFamily::TanhSinh
    }
}

/// Size of `K_R^0 - H_n^0`: a Frobenius norm at quadrature scale and the
/// weighted-integral bound on the trace norm of the dominant corner piece.
pub fn diff_norm_diag(
    big_r: f64,
    n: u32,
    p: &JumpParams,
    opts: &DiffNormOptions,
) -> Result<DiffNorm> {
    let diff = Difference {
        wh: KernelSpec::wh_limit(big_r, *p)?,
        th: KernelSpec::th_limit(n, *p)?,
    };
    let nodes = QuadratureRule::tanh_sinh(opts.level)?.mapped(-1.0, 1.0);
    let frobenius = nystrom_matrix(&diff, &nodes)
        .sub(&ComplexMatrix::identity(nodes.len()))?
        .frobenius_norm();

    let b = opts.b.unwrap_or(-2.0 * p.alpha().re + opts.epsilon);
    if !(b > -1.0 && b < 1.0) {
        return Err(invalid(format!("b must lie in (-1, 1), got {b}")));
    }
    if !(opts.delta > 0.0 && opts.delta <= 1.0) {
        return Err(invalid("delta must lie in (0, 1]"));
    }
    let bound = corner_bound(big_r, n, p, b, opts.delta, opts.bound_level)?;
    Ok(DiffNorm {
        frobenius,
        bound,
        b,
        node_count: nodes.len(),
    })
}

/// `sqrt(∫(1-x)^{-b-1}(1+x)^{b-1}|F|² · ∫(1-y)^{b-1}(1+y)^{-b-1}|G|²)` over
/// `(1 - δ, 1)`, with `F = ((1+x)/(1-x))^α (e^{i(ξ(x)-1)R} - x^n)` and
/// `G = ((1-y)/(1+y))^α e^{i(ξ(-y)+1)R}`, times `|sin πα/π|`.
fn corner_bound(big_r: f64, n: u32, p: &JumpParams, b: f64, delta: f64, level: u32) -> Result<f64> {
    let a = p.alpha();
    let prefactor = p.kernel_prefactor().norm();
    if prefactor == 0.0 {
        return Ok(0.0);
    }
    let rule = QuadratureRule::tanh_sinh(level)?;
    let i = C64::new(0.0, 1.0);
    let first = rule.integrate_on(1.0 - delta, 1.0, |node| {
        let (u, x) = (node.from_hi, node.x);
        let one_plus = 2.0 - u;
        // ξ(x) - 1 = (1 - x)(-1 + i)/(1 + ix), and x^n = exp(n·log1p(-u))
        let e1 = i * big_r * u * C64::new(-1.0, 1.0) / C64::new(1.0, x);
        let e2 = C64::new(n as f64 * (-u).ln_1p(), 0.0);
        let diff = e2.exp() * expm1(e1 - e2);
        if diff.norm() == 0.0 {
            return 0.0;
        }
        let weight_log = 2.0 * a.re * (one_plus.ln() - u.ln());
        let measure_log = (-b - 1.0) * u.ln() + (b - 1.0) * one_plus.ln();
        (weight_log + measure_log + 2.0 * diff.norm().ln()).exp()
    });
    let second = rule.integrate_on(1.0 - delta, 1.0, |node| {
        let (u, y) = (node.from_hi, node.x);
        let one_plus = 2.0 - u;
        // ξ(-y) + 1 = (1 - y)(1 + i)/(1 - iy)
        let e = i * big_r * u * C64::new(1.0, 1.0) / C64::new(1.0, -y);
        let weight_log = 2.0 * a.re * (u.ln() - one_plus.ln());
        let measure_log = (b - 1.0) * u.ln() + (-b - 1.0) * one_plus.ln();
        (weight_log + measure_log + 2.0 * e.re).exp()
    });
    Ok(prefactor * (first * second).sqrt())
}

/// Smallest singular value of the weighted Nyström matrix of `I + H_n^0` on
/// the tanh-sinh grid of the given level.
pub fn min_sv_i_plus_h(n: u32, p: &JumpParams, level: u32) -> Result<f64> {
    let nodes = QuadratureRule::tanh_sinh(level)?.mapped(-1.0, 1.0);
    let b = nystrom_matrix(&KernelSpec::th_limit(n, *p)?, &nodes);
    smallest_singular(&b, 200)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_alpha_vanishes() {
        let p = JumpParams::real(0.0).unwrap();
        let d = diff_norm_diag(10.0, 10, &p, &DiffNormOptions::default()).unwrap();
        assert_eq!(d.frobenius, 0.0);
        assert_eq!(d.bound, 0.0);
        assert!((min_sv_i_plus_h(10, &p, 4).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_is_finite_at_the_default_exponent() {
        for a in [0.1, 0.25, -0.2] {
            let p = JumpParams::real(a).unwrap();
            let d = diff_norm_diag(20.0, 20, &p, &DiffNormOptions::default()).unwrap();
            assert!(d.bound.is_finite() && d.bound > 0.0, "alpha={a}");
            assert!((d.b - (-2.0 * a + 0.05)).abs() < 1e-15);
        }
    }

    #[test]
    fn bound_rejects_bad_exponent() {
        let p = JumpParams::real(0.1).unwrap();
        let opts = DiffNormOptions {
            b: Some(1.5),
            ..DiffNormOptions::default()
        };
        assert!(diff_norm_diag(5.0, 5, &p, &opts).is_err());
    }
}
