use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::kernels::Kernel;
use crate::error::{invalid, Result};
use crate::linalg::{lu_logdet, wrap_phase, ComplexMatrix, LogDet};
use crate::special::{QuadFamily, QuadNode, QuadratureRule};

/// Hard limit on the Nyström matrix dimension.
pub const NODE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NystromOptions {
    /// Relative change under refinement below which a result is converged.
    pub tol: f64,
    /// Overrides the kernel's preferred rule family.
    pub family: Option<QuadFamily>,
    /// Starting resolution: node count for Gauss-Legendre, level for tanh-sinh.
    pub start: Option<usize>,
    pub max_nodes: usize,
}

impl Default for NystromOptions {
    fn default() -> Self {
        NystromOptions {
            tol: 1e-10,
            family: None,
            start: None,
            max_nodes: NODE_CAP,
        }
    }
}

impl NystromOptions {
    pub fn with_tol(tol: f64) -> Self {
        NystromOptions {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NystromResult {
    pub logdet: LogDet,
    pub node_count: usize,
    pub rule_family: QuadFamily,
    /// `|D_fine / D_coarse - 1|` between the last two resolutions.
    pub refinement_gap: f64,
    pub converged: bool,
}

/// `I + W^{1/2} K W^{1/2}` on the given nodes.
pub fn nystrom_matrix(kernel: &(impl Kernel + ?Sized), nodes: &[QuadNode]) -> ComplexMatrix {
    ComplexMatrix::par_from_fn(nodes.len(), nodes.len(), |i, j| {
        let k = kernel.eval_weighted(&nodes[i], &nodes[j]);
        if i == j {
            k + 1.0
        } else {
            k
        }
    })
}

/// Nyström determinant at a fixed node set.
pub fn nystrom_det_on(kernel: &(impl Kernel + ?Sized), nodes: &[QuadNode]) -> Result<LogDet> {
    lu_logdet(&nystrom_matrix(kernel, nodes))
}

/// Relative change `|exp(b - a) - 1|` between two log-determinants.
pub(crate) fn relative_change(coarse: &LogDet, fine: &LogDet) -> f64 {
    if coarse.is_singular() || fine.is_singular() {
        return f64::INFINITY;
    }
    let d = C64::new(
        fine.log_magnitude - coarse.log_magnitude,
        wrap_phase(fine.phase - coarse.phase),
    );
    expm1(d).norm()
}

/// `e^w - 1` without cancellation for small `w`.
pub(crate) fn expm1(w: C64) -> C64 {
    let s = (0.5 * w.im).sin();
    C64::new(w.re.exp_m1() * w.im.cos() - 2.0 * s * s, w.re.exp() * w.im.sin())
}

/// The sequence of rules used by refinement for a family.
pub(crate) struct Refinement {
    family: QuadFamily,
    resolution: usize,
    max_nodes: usize,
}

impl Refinement {
    pub(crate) fn new(
        kernel: &(impl Kernel + ?Sized),
        family: Option<QuadFamily>,
        start: Option<usize>,
        max_nodes: usize,
    ) -> Self {
        let family = family.unwrap_or_else(|| kernel.default_family());
        let (a, b) = kernel.domain();
        let resolution = match family {
            QuadFamily::GaussLegendre => {
                start.unwrap_or_else(|| ((b - a).ceil() as usize).next_power_of_two().max(16))
            }
            QuadFamily::TanhSinh => start.unwrap_or(3),
        };
        Refinement {
            family,
            resolution,
            max_nodes,
        }
    }

    pub(crate) fn family(&self) -> QuadFamily {
        self.family
    }

    /// The next rule, or `None` once it would exceed the node cap.
    pub(crate) fn next_rule(&mut self) -> Result<Option<QuadratureRule>> {
        let rule = QuadratureRule::of_family(self.family, self.resolution)?;
        if rule.len() > self.max_nodes {
            return Ok(None);
        }
        self.resolution = match self.family {
            QuadFamily::GaussLegendre => 2 * self.resolution,
            QuadFamily::TanhSinh => self.resolution + 1,
        };
        Ok(Some(rule))
    }
}

/// `det(I + K)` by Nyström discretization with the default options.
pub fn nystrom_det(kernel: &(impl Kernel + ?Sized), tol: f64) -> Result<NystromResult> {
    nystrom_det_with(kernel, &NystromOptions::with_tol(tol))
}

/// `det(I + K)` refined by node doubling (Gauss-Legendre) or by raising the
/// level (tanh-sinh) until the relative change drops below `opts.tol` or the
/// node cap is reached; in the latter case the finest value is returned
/// unconverged.
pub fn nystrom_det_with(
    kernel: &(impl Kernel + ?Sized),
    opts: &NystromOptions,
) -> Result<NystromResult> {
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let (a, b) = kernel.domain();
    let mut refine = Refinement::new(kernel, opts.family, opts.start, opts.max_nodes);
    let first = refine
        .next_rule()?
        .ok_or_else(|| invalid("starting resolution exceeds the node cap"))?;
    let nodes = first.mapped(a, b);
    let mut best = NystromResult {
        logdet: nystrom_det_on(kernel, &nodes)?,
        node_count: nodes.len(),
        rule_family: refine.family(),
        refinement_gap: f64::INFINITY,
        converged: false,
    };
    while let Some(rule) = refine.next_rule()? {
        let nodes = rule.mapped(a, b);
        let logdet = nystrom_det_on(kernel, &nodes)?;
        let gap = relative_change(&best.logdet, &logdet);
        log::debug!("nystrom: {} nodes, gap {gap:e}", nodes.len());
        best = NystromResult {
            logdet,
            node_count: nodes.len(),
            rule_family: refine.family(),
            refinement_gap: gap,
            converged: gap < opts.tol,
        };
        if best.converged {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fredholm::KernelSpec;
    use crate::symbols::{JumpParams, RegularizedParams};

    struct RankOne;

    impl Kernel for RankOne {
        fn domain(&self) -> (f64, f64) {
            (0.0, 1.0)
        }
        fn eval(&self, x: &QuadNode, y: &QuadNode) -> C64 {
            C64::new(x.x * y.x, 0.0)
        }
        fn default_family(&self) -> QuadFamily {
            QuadFamily::GaussLegendre
        }
    }

    #[test]
    fn rank_one_closed_form() {
        let res = nystrom_det(&RankOne, 1e-12).unwrap();
        assert!((res.logdet.value() - (1.0 + 1.0 / 3.0)).norm() < 1e-12);
        assert!(res.converged);
    }

    #[test]
    fn zero_alpha_is_exactly_one() {
        let p = JumpParams::real(0.0).unwrap();
        let q = RegularizedParams::new(p.alpha(), 0.8).unwrap();
        for spec in [
            KernelSpec::even_sine(7.0, p).unwrap(),
            KernelSpec::wh_limit(7.0, p).unwrap(),
            KernelSpec::th_limit(4, p).unwrap(),
            KernelSpec::wh_reg(7.0, q).unwrap(),
            KernelSpec::th_reg(4, q).unwrap(),
        ] {
            let res = nystrom_det(&spec, 1e-10).unwrap();
            assert_eq!(res.logdet, LogDet::ONE, "{}", spec.name());
        }
    }

    #[test]
    fn small_interval_against_fredholm_series() {
        let p = JumpParams::real(0.1).unwrap();
        let spec = KernelSpec::even_sine(0.1, p).unwrap();
        let got = nystrom_det(&spec, 1e-12).unwrap().logdet.value();
        // 1 + tr K + ((tr K)² - tr K²)/2 by direct Gauss-Legendre quadrature
        let nodes = QuadratureRule::gauss_legendre(24).unwrap().mapped(0.0, 0.1);
        let mut tr = C64::new(0.0, 0.0);
        let mut tr2 = C64::new(0.0, 0.0);
        for x in &nodes {
            tr += spec.eval(x, x) * x.weight;
            for y in &nodes {
                tr2 += spec.eval(x, y) * spec.eval(y, x) * (x.weight * y.weight);
            }
        }
        let two_term = 1.0 + tr;
        let series = two_term + 0.5 * (tr * tr - tr2);
        assert!((got - two_term).norm() < 1e-6);
        assert!((got - series).norm() < 1e-10);
    }

    #[test]
    fn even_sine_refinement_gap_decreases() {
        let p = JumpParams::real(0.1).unwrap();
        let spec = KernelSpec::even_sine(10.0, p).unwrap();
        let mut prev: Option<LogDet> = None;
        let mut gaps = Vec::new();
        for m in [8, 16, 32, 64] {
            let nodes = QuadratureRule::gauss_legendre(m).unwrap().mapped(0.0, 10.0);
            let d = nystrom_det_on(&spec, &nodes).unwrap();
            if let Some(c) = prev {
                gaps.push(relative_change(&c, &d));
            }
            prev = Some(d);
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > 1e-15 && gaps[2] < 1e-12, "{gaps:?}");
    }

    #[test]
    fn symmetrized_and_unsymmetrized_agree() {
        for alpha in [C64::new(0.1, 0.0), C64::new(0.25, 0.1)] {
            let p = JumpParams::new(alpha).unwrap();
            for n in [1, 4, 10] {
                let nodes = QuadratureRule::tanh_sinh(6).unwrap().mapped(-1.0, 1.0);
                let s = nystrom_det_on(&KernelSpec::th_limit(n, p).unwrap(), &nodes).unwrap();
                let u = nystrom_det_on(&KernelSpec::th_limit_unsymmetrized(n, p).unwrap(), &nodes)
                    .unwrap();
                assert!(relative_change(&s, &u) < 1e-8, "alpha={alpha} n={n}");
            }
        }
    }

    #[test]
    fn cap_flags_unconverged() {
        let p = JumpParams::real(0.1).unwrap();
        let spec = KernelSpec::even_sine(30.0, p).unwrap();
        let opts = NystromOptions {
            tol: 1e-14,
            family: None,
            start: Some(8),
            max_nodes: 32,
        };
        let res = nystrom_det_with(&spec, &opts).unwrap();
        assert!(!res.converged);
        assert_eq!(res.node_count, 32);
        assert!(res.logdet.log_magnitude.is_finite());
    }

    #[test]
    fn expm1_small_arguments() {
        let w = C64::new(1e-12, -2e-12);
        let e = expm1(w);
        assert!((e - w).norm() < 1e-23);
    }
}
