use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::special::{QuadFamily, QuadNode};
use crate::symbols::{JumpParams, RegularizedParams};

const I: C64 = C64::new(0.0, 1.0);

/// An integral kernel on a bounded interval, evaluated at mapped quadrature
/// nodes so that endpoint distances are available.
pub trait Kernel: Sync {
    fn domain(&self) -> (f64, f64);

    /// Kernel value at interior nodes.
    fn eval(&self, x: &QuadNode, y: &QuadNode) -> C64;

    /// `sqrt(w_x w_y)·K(x, y)` with the nodes' quadrature weights.
    ///
    /// Kernels whose weights blow up at the endpoints override this to
    /// combine every factor in log form, since the raw value can overflow
    /// next to a corner even when the weighted value is tiny.
    fn eval_weighted(&self, x: &QuadNode, y: &QuadNode) -> C64 {
        self.eval(x, y) * (x.weight * y.weight).sqrt()
    }

    /// The quadrature family suited to the kernel's endpoint behaviour.
    fn default_family(&self) -> QuadFamily;
}

/// The integral kernels whose Fredholm determinants are computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `(e^{-2πiα} - 1)[sin(x-y)/π(x-y) + sin(x+y)/π(x+y)]` on `(0, R)`.
    EvenSine { big_r: f64, p: JumpParams },
    /// `K_R^0` on `(-1, 1)`.
    WhLimit { big_r: f64, p: JumpParams },
    /// `H_n^0` on `(-1, 1)`, symmetrized weight.
    ThLimit { n: u32, p: JumpParams },
    /// `H_n^0` before symmetrization: the whole weight sits on `x`.
    ThLimitUnsymmetrized { n: u32, p: JumpParams },
    /// `K_{R,r}` on `(-r, r)`.
    WhReg { big_r: f64, p: RegularizedParams },
    /// `H_{n,r}` on `(-r, r)`.
    ThReg { n: u32, p: RegularizedParams },
}

impl KernelSpec {
    pub fn even_sine(big_r: f64, p: JumpParams) -> Result<Self> {
        check_length(big_r)?;
        Ok(KernelSpec::EvenSine { big_r, p })
    }

    pub fn wh_limit(big_r: f64, p: JumpParams) -> Result<Self> {
        check_length(big_r)?;
        Ok(KernelSpec::WhLimit { big_r, p })
    }

    pub fn th_limit(n: u32, p: JumpParams) -> Result<Self> {
        check_order(n)?;
        Ok(KernelSpec::ThLimit { n, p })
    }

    pub fn th_limit_unsymmetrized(n: u32, p: JumpParams) -> Result<Self> {
        check_order(n)?;
        Ok(KernelSpec::ThLimitUnsymmetrized { n, p })
    }

    pub fn wh_reg(big_r: f64, p: RegularizedParams) -> Result<Self> {
        check_length(big_r)?;
        Ok(KernelSpec::WhReg { big_r, p })
    }

    pub fn th_reg(n: u32, p: RegularizedParams) -> Result<Self> {
        check_order(n)?;
        Ok(KernelSpec::ThReg { n, p })
    }

    pub fn jump(&self) -> JumpParams {
        match *self {
            KernelSpec::EvenSine { p, .. }
            | KernelSpec::WhLimit { p, .. }
            | KernelSpec::ThLimit { p, .. }
            | KernelSpec::ThLimitUnsymmetrized { p, .. } => p,
            KernelSpec::WhReg { p, .. } | KernelSpec::ThReg { p, .. } => p.jump(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::EvenSine { .. } => "even_sine",
            KernelSpec::WhLimit { .. } => "wh_limit",
            KernelSpec::ThLimit { .. } => "th_limit",
            KernelSpec::ThLimitUnsymmetrized { .. } => "th_limit_unsymmetrized",
            KernelSpec::WhReg { .. } => "wh_reg",
            KernelSpec::ThReg { .. } => "th_reg",
        }
    }
}

fn check_length(big_r: f64) -> Result<()> {
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(invalid(format!("R must be positive and finite, got {big_r}")));
    }
    Ok(())
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(())
}

/// `sin(u)/(πu)`, with a Taylor expansion near the removable singularity.
pub(crate) fn sinc_over_pi(u: f64) -> f64 {
    if u.abs() < 0.05 {
        let u2 = u * u;
        (1.0 - u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)))) / PI
    } else {
        u.sin() / (PI * u)
    }
}

/// `ξ(x) = i(1 - ix)/(1 + ix)` at a real point.
pub(crate) fn xi_real(x: f64) -> C64 {
    I * C64::new(1.0, -x) / C64::new(1.0, x)
}

/// `log((1 + x)/(1 - x))` on `(-1, 1)` from the endpoint distances.
fn log_limit_ratio(x: &QuadNode) -> f64 {
    x.from_lo.ln() - x.from_hi.ln()
}

/// `log((1 + rx)(r + x)/((1 - rx)(r - x)))` on `(-r, r)`.
fn log_reg_ratio(x: &QuadNode, r: f64) -> f64 {
    (r * x.x).ln_1p() + x.from_lo.ln() - (-r * x.x).ln_1p() - x.from_hi.ln()
}

/// `1 + xy` on `(-1, 1)²`, without cancellation near the corners `x = ±1, y = ∓1`.
pub(crate) fn one_plus_xy(x: &QuadNode, y: &QuadNode) -> f64 {
    if x.x > 0.0 && y.x < 0.0 {
        let (a, b) = (x.from_hi, y.from_lo);
        a + b - a * b
    } else if x.x < 0.0 && y.x > 0.0 {
        let (a, b) = (x.from_lo, y.from_hi);
        a + b - a * b
    } else {
        1.0 + x.x * y.x
    }
}

fn oscillation(x: f64, y: f64, big_r: f64) -> C64 {
    (I * (xi_real(x) + xi_real(y)) * big_r).exp()
}

impl Kernel for KernelSpec {
    fn domain(&self) -> (f64, f64) {
        match *self {
            KernelSpec::EvenSine { big_r, .. } => (0.0, big_r),
            KernelSpec::WhLimit { .. }
            | KernelSpec::ThLimit { .. }
            | KernelSpec::ThLimitUnsymmetrized { .. } => (-1.0, 1.0),
            KernelSpec::WhReg { p, .. } | KernelSpec::ThReg { p, .. } => (-p.r(), p.r()),
        }
    }

    fn default_family(&self) -> QuadFamily {
        match self {
            KernelSpec::EvenSine { .. } => QuadFamily::GaussLegendre,
            _ => QuadFamily::TanhSinh,
        }
    }

    fn eval(&self, x: &QuadNode, y: &QuadNode) -> C64 {
        self.scaled(x, y, 0.0)
    }

    fn eval_weighted(&self, x: &QuadNode, y: &QuadNode) -> C64 {
        self.scaled(x, y, 0.5 * (x.weight.ln() + y.weight.ln()))
    }
}

impl KernelSpec {
    /// `e^{log_scale}·K(x, y)`, with the scale folded into the exponent of
    /// the weight factor.
    fn scaled(&self, x: &QuadNode, y: &QuadNode, log_scale: f64) -> C64 {
        match *self {
            KernelSpec::EvenSine { p, .. } => {
                p.jump_factor()
                    * (sinc_over_pi(x.x - y.x) + sinc_over_pi(x.x + y.x))
                    * log_scale.exp()
            }
            KernelSpec::WhLimit { big_r, p } => {
                let l = p.alpha() * (log_limit_ratio(x) + log_limit_ratio(y));
                let w = (l + log_scale - one_plus_xy(x, y).ln()).exp();
                p.kernel_prefactor() * w * oscillation(x.x, y.x, big_r)
            }
            KernelSpec::ThLimit { n, p } => {
                let l = p.alpha() * (log_limit_ratio(x) + log_limit_ratio(y));
                let w = (l + log_scale - one_plus_xy(x, y).ln()).exp();
                p.kernel_prefactor() * w * (-x.x * y.x).powi(n as i32)
            }
            KernelSpec::ThLimitUnsymmetrized { n, p } => {
                let l = 2.0 * p.alpha() * log_limit_ratio(x);
                let w = (l + log_scale - one_plus_xy(x, y).ln()).exp();
                // (ix)^{2n} = (-x²)^n
                p.kernel_prefactor() * w * (-x.x * x.x).powi(n as i32)
            }
            KernelSpec::WhReg { big_r, p } => {
                let l = 0.5 * p.alpha() * (log_reg_ratio(x, p.r()) + log_reg_ratio(y, p.r()));
                let w = (l + log_scale).exp() / (1.0 + x.x * y.x);
                p.jump().kernel_prefactor() * w * oscillation(x.x, y.x, big_r)
            }
            KernelSpec::ThReg { n, p } => {
                let l = 0.5 * p.alpha() * (log_reg_ratio(x, p.r()) + log_reg_ratio(y, p.r()));
                let w = (l + log_scale).exp() / (1.0 + x.x * y.x);
                p.jump().kernel_prefactor() * w * (-x.x * y.x).powi(n as i32)
            }
        }
    }
}

/// Pointwise kernel value; points on the boundary of the domain, where the
/// limit and regularized weights are singular, are rejected.
pub fn kernel_eval(spec: &KernelSpec, x: f64, y: f64) -> Result<C64> {
    let (a, b) = spec.domain();
    let inside = |t: f64| t > a && t < b;
    let closed = |t: f64| t >= a && t <= b;
    match spec {
        KernelSpec::EvenSine { .. } => {
            if !(closed(x) && closed(y)) {
                return Err(domain(format!("({x}, {y}) lies outside [{a}, {b}]²")));
            }
        }
        _ => {
            if !(inside(x) && inside(y)) {
                return Err(domain(format!("({x}, {y}) is not inside ({a}, {b})²")));
            }
        }
    }
    Ok(spec.eval(&QuadNode::at(x, a, b), &QuadNode::at(y, a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp(a: f64) -> JumpParams {
        JumpParams::real(a).unwrap()
    }

    fn all_specs(p: JumpParams) -> Vec<KernelSpec> {
        let q = RegularizedParams::new(p.alpha(), 0.9).unwrap();
        vec![
            KernelSpec::even_sine(3.0, p).unwrap(),
            KernelSpec::wh_limit(3.0, p).unwrap(),
            KernelSpec::th_limit(3, p).unwrap(),
            KernelSpec::th_limit_unsymmetrized(3, p).unwrap(),
            KernelSpec::wh_reg(3.0, q).unwrap(),
            KernelSpec::th_reg(3, q).unwrap(),
        ]
    }

    #[test]
    fn zero_alpha_kernels_vanish() {
        for spec in all_specs(jp(0.0)) {
            let v = kernel_eval(&spec, 0.2, -0.3).or_else(|_| kernel_eval(&spec, 0.2, 0.3));
            assert_eq!(v.unwrap(), C64::new(0.0, 0.0), "{}", spec.name());
        }
    }

    #[test]
    fn even_sine_symmetric_and_diagonal() {
        let p = jp(0.1);
        let spec = KernelSpec::even_sine(5.0, p).unwrap();
        for (x, y) in [(0.3, 1.7), (4.9, 0.01), (2.0, 2.5)] {
            assert_eq!(kernel_eval(&spec, x, y).unwrap(), kernel_eval(&spec, y, x).unwrap());
        }
        let expected = ((-0.2 * PI * I).exp() - 1.0) * (1.0 / PI + 2f64.sin() / (2.0 * PI));
        let got = kernel_eval(&spec, 1.0, 1.0).unwrap();
        assert!((got - expected).norm() < 1e-12);
    }

    #[test]
    fn sinc_taylor_matches_direct_formula() {
        for u in [0.049f64, 0.03, 0.01, -0.02] {
            let direct = u.sin() / (PI * u);
            assert!((sinc_over_pi(u) - direct).abs() < 1e-16);
        }
    }

    #[test]
    fn regularized_kernels_approach_limits() {
        let p = JumpParams::new(C64::new(0.2, -0.1)).unwrap();
        let (x, y) = (0.2, -0.3);
        let wh0 = kernel_eval(&KernelSpec::wh_limit(4.0, p).unwrap(), x, y).unwrap();
        let th0 = kernel_eval(&KernelSpec::th_limit(2, p).unwrap(), x, y).unwrap();
        let (mut prev_wh, mut prev_th) = (f64::INFINITY, f64::INFINITY);
        for r in [0.9, 0.99, 0.999] {
            let q = RegularizedParams::new(p.alpha(), r).unwrap();
            let wh = kernel_eval(&KernelSpec::wh_reg(4.0, q).unwrap(), x, y).unwrap();
            let th = kernel_eval(&KernelSpec::th_reg(2, q).unwrap(), x, y).unwrap();
            let (dw, dt) = ((wh - wh0).norm(), (th - th0).norm());
            assert!(dw < prev_wh && dt < prev_th, "r={r}");
            prev_wh = dw;
            prev_th = dt;
        }
        assert!(prev_wh < 1e-2 && prev_th < 1e-2);
    }

    #[test]
    fn endpoints_are_domain_errors() {
        let p = jp(0.1);
        let spec = KernelSpec::wh_limit(2.0, p).unwrap();
        assert!(matches!(kernel_eval(&spec, 1.0, 0.0), Err(crate::Error::Domain(_))));
        assert!(matches!(kernel_eval(&spec, 0.0, -1.0), Err(crate::Error::Domain(_))));
        let q = RegularizedParams::new(p.alpha(), 0.5).unwrap();
        let spec = KernelSpec::th_reg(1, q).unwrap();
        assert!(kernel_eval(&spec, 0.5, 0.0).is_err());
        assert!(kernel_eval(&spec, 0.49, 0.0).is_ok());
    }

    #[test]
    fn corner_denominator_is_accurate() {
        let x = QuadNode::at(1.0 - 1e-12, -1.0, 1.0);
        let y = QuadNode::at(-1.0 + 1e-12, -1.0, 1.0);
        let x = QuadNode { from_hi: 1e-12, ..x };
        let y = QuadNode { from_lo: 1e-12, ..y };
        let d = one_plus_xy(&x, &y);
        assert!((d - (2e-12 - 1e-24)).abs() < 1e-26);
    }

    #[test]
    fn constructors_validate() {
        let p = jp(0.1);
        assert!(KernelSpec::even_sine(0.0, p).is_err());
        assert!(KernelSpec::wh_limit(f64::NAN, p).is_err());
        assert!(KernelSpec::th_limit(0, p).is_err());
    }
}
