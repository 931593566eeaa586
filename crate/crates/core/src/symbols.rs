//! The two-jump symbols, their regularizations and Wiener-Hopf factors, and
//! a small family of smooth even test symbols with explicit factorizations.
//!
//! On the line the symbol `σ` equals `e^{-2πiα}` on `(-1, 1)` and `1` outside.
//! On the circle `φ` equals `e^{-iπα}` on the right half and `e^{iπα}` on the
//! left half, so `φ(z(ξ))` is a constant multiple of `σ(ξ)` under the Möbius
//! map `z(ξ) = (1 + iξ) / (1 - iξ)`.
//!
//! Complex powers are always formed factor by factor as `exp(α·Log w)` with
//! the principal logarithm of each linear factor, never as the principal
//! power of a product.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::special::QuadratureRule;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// The jump exponent `α`, restricted to `|Re α| < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpParams {
    alpha: C64,
}

impl JumpParams {
    pub fn new(alpha: C64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(invalid("alpha must be finite"));
        }
        if alpha.re.abs() >= 0.5 {
            return Err(invalid(format!("|Re alpha| must be < 1/2, got {}", alpha.re)));
        }
        Ok(JumpParams { alpha })
    }

    pub fn real(alpha: f64) -> Result<Self> {
        Self::new(C64::new(alpha, 0.0))
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    /// `(e^{-2πiα} - 1)`, the jump of `σ` across `ξ = ±1`.
    pub fn jump_factor(&self) -> C64 {
        (-2.0 * PI * I * self.alpha).exp() - 1.0
    }

    /// `i·sin(πα)/π`, the prefactor of the limit and regularized kernels.
    pub fn kernel_prefactor(&self) -> C64 {
        I * (PI * self.alpha).sin() / PI
    }
}

/// Jump parameters together with the regularization parameter `r ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedParams {
    jump: JumpParams,
    r: f64,
}

impl RegularizedParams {
    pub fn new(alpha: C64, r: f64) -> Result<Self> {
        let jump = JumpParams::new(alpha)?;
        if !(r > 0.0 && r < 1.0) {
            return Err(invalid(format!("r must lie in (0, 1), got {r}")));
        }
        Ok(RegularizedParams { jump, r })
    }

    pub fn jump(&self) -> JumpParams {
        self.jump
    }

    pub fn alpha(&self) -> C64 {
        self.jump.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `ξ(r)`, a point in the open upper half plane.
    pub fn xi_r(&self) -> C64 {
        xi_map(C64::new(self.r, 0.0))
    }
}

/// `σ(ξ)`: `1` for `|ξ| > 1`, `e^{-2πiα}` for `|ξ| < 1`.
pub fn sigma_eval(xi: f64, p: &JumpParams) -> Result<C64> {
    if xi.abs() == 1.0 {
        return Err(domain(format!("sigma is undefined at the jump xi = {xi}")));
    }
    if xi.abs() > 1.0 {
        Ok(ONE)
    } else {
        Ok((-2.0 * PI * I * p.alpha).exp())
    }
}

/// `φ(e^{iθ})`: `e^{-iπα}` on the right half circle, `e^{iπα}` on the left.
pub fn phi_eval(theta: f64, p: &JumpParams) -> Result<C64> {
    let t = theta.rem_euclid(2.0 * PI);
    let tol = 4.0 * f64::EPSILON * theta.abs().max(2.0 * PI);
    if (t - 0.5 * PI).abs() <= tol || (t - 1.5 * PI).abs() <= tol {
        return Err(domain(format!("phi is undefined at the jump theta = {theta}")));
    }
    if !(0.5 * PI..=1.5 * PI).contains(&t) {
        Ok((-PI * I * p.alpha).exp())
    } else {
        Ok((PI * I * p.alpha).exp())
    }
}

/// Closed-form Fourier coefficient `φ_k` of the two-jump circle symbol.
pub fn phi_fourier(k: i64, p: &JumpParams) -> C64 {
    let a = p.alpha;
    if k == 0 {
        return (PI * a).cos();
    }
    let m = k.unsigned_abs();
    if m.is_multiple_of(2) {
        return C64::new(0.0, 0.0);
    }
    // sin(kπ/2)/k is even in k
    let s = if (m / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    -2.0 * I * (PI * a).sin() * (s / (PI * m as f64))
}

fn xi_map(x: C64) -> C64 {
    I * (ONE - I * x) / (ONE + I * x)
}

/// `ξ(x) = i(1 - ix)/(1 + ix)`; maps `[-1, 1]` onto the upper unit semicircle.
pub fn xi_of_x(x: C64) -> Result<C64> {
    if (ONE + I * x).norm() == 0.0 {
        return Err(domain("xi(x) has a pole at x = i"));
    }
    Ok(xi_map(x))
}

/// `z(ξ) = (1 + iξ)/(1 - iξ)`; maps the real line onto the unit circle.
pub fn z_of_xi(xi: C64) -> Result<C64> {
    if (ONE - I * xi).norm() == 0.0 {
        return Err(domain("z(xi) has a pole at xi = -i"));
    }
    Ok((ONE + I * xi) / (ONE - I * xi))
}

/// Wiener-Hopf factors `(σ_r^+, σ_r^-)` at real `ξ`.
///
/// `σ_r^+` is analytic and nonzero in the upper half plane, `σ_r^-` in the
/// lower one. Each of the four linear factors carries its own principal
/// argument, which tends to zero as `ξ → +∞`.
pub fn sigma_r_factors(xi: f64, p: &RegularizedParams) -> (C64, C64) {
    let x = C64::new(xi, 0.0);
    let w = p.xi_r();
    let a = p.alpha();
    let plus = (a * ((x + w).ln() - (x - w.conj()).ln())).exp();
    let minus = (a * ((x - w).ln() - (x + w.conj()).ln())).exp();
    (plus, minus)
}

/// `σ_r(ξ) = [((ξ - ξ(r))/(ξ - conj ξ(r)))·((ξ + ξ(r))/(ξ + conj ξ(r)))]^α`.
pub fn sigma_r_eval(xi: f64, p: &RegularizedParams) -> C64 {
    let x = C64::new(xi, 0.0);
    let w = p.xi_r();
    let l = (x - w).ln() - (x - w.conj()).ln() + (x + w).ln() - (x + w.conj()).ln();
    (p.alpha() * l).exp()
}

fn check_on_circle(z: C64) -> Result<()> {
    if (z.norm() - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("|z| must be 1, got {}", z.norm())));
    }
    Ok(())
}

/// `φ_r^+(z) = [(1 - irz)/(1 + irz)]^α`, valid on the closed unit disk.
pub(crate) fn phi_r_plus(z: C64, p: &RegularizedParams) -> C64 {
    let rz = I * p.r * z;
    (p.alpha() * ((ONE - rz).ln() - (ONE + rz).ln())).exp()
}

/// Wiener-Hopf factors `(φ_r^+, φ_r^-)` on the unit circle.
///
/// `φ_r^+` has argument 0 at `z = 0`, `φ_r^-(z) = φ_r^+(1/z)` has argument 0
/// at `z = ∞`.
pub fn phi_r_factors(z: C64, p: &RegularizedParams) -> Result<(C64, C64)> {
    check_on_circle(z)?;
    Ok((phi_r_plus(z, p), phi_r_plus(z.inv(), p)))
}

/// `φ_r(z) = [((1 - irz)/(1 + ir/z))·((1 - ir/z)/(1 + irz))]^α` on `|z| = 1`.
pub fn phi_r_eval(z: C64, p: &RegularizedParams) -> Result<C64> {
    check_on_circle(z)?;
    Ok(phi_r_unchecked(z, p))
}

pub(crate) fn phi_r_unchecked(z: C64, p: &RegularizedParams) -> C64 {
    let rz = I * p.r * z;
    let rzi = I * p.r / z;
    let l = (ONE - rz).ln() - (ONE + rzi).ln() + (ONE - rzi).ln() - (ONE + rz).ln();
    (p.alpha() * l).exp()
}

/// `c = ((1 + ir)/(1 - ir))^{2α}` with `φ_r(z(ξ)) = c·σ_r(ξ)`.
pub fn relation_constant(p: &RegularizedParams) -> C64 {
    let ir = I * p.r;
    (2.0 * p.alpha() * ((ONE + ir) / (ONE - ir)).ln()).exp()
}

/// `φ_r(z(ξ)) - c·σ_r(ξ)` with both sides evaluated independently.
pub fn relation_check(xi: f64, p: &RegularizedParams) -> Result<C64> {
    let z = z_of_xi(C64::new(xi, 0.0))?;
    Ok(phi_r_unchecked(z, p) - relation_constant(p) * sigma_r_eval(xi, p))
}

/// `G[φ] = exp(mean of log φ)` for the two-jump circle symbol.
pub fn geometric_mean_phi(_p: &JumpParams) -> C64 {
    ONE
}

/// `G[σ] = exp((1/2π)∫ log σ(ξ) dξ)` for the two-jump line symbol.
pub fn geometric_mean_sigma(p: &JumpParams) -> C64 {
    (-2.0 * I * p.alpha).exp()
}

/// `G[φ]` by Gauss-Legendre quadrature of `log φ` over both half circles.
pub fn geometric_mean_phi_numeric(p: &JumpParams) -> C64 {
    let rule = QuadratureRule::gauss_legendre(16).expect("static rule");
    // log φ is -iπα on the right half circle and iπα on the left one
    let right = rule.integrate_complex_on(-0.5 * PI, 0.5 * PI, |_| -PI * I * p.alpha);
    let left = rule.integrate_complex_on(0.5 * PI, 1.5 * PI, |_| PI * I * p.alpha);
    ((right + left) / (2.0 * PI)).exp()
}

/// `G[σ]` by Gauss-Legendre quadrature of `log σ`, which vanishes off `(-1, 1)`.
pub fn geometric_mean_sigma_numeric(p: &JumpParams) -> C64 {
    let rule = QuadratureRule::gauss_legendre(16).expect("static rule");
    let inner = rule.integrate_complex_on(-1.0, 1.0, |_| -2.0 * PI * I * p.alpha);
    (inner / (2.0 * PI)).exp()
}

/// Anything with Fourier coefficients on the unit circle.
pub trait FourierSymbol: Sync {
    fn coeff(&self, k: i64) -> C64;
}

impl FourierSymbol for JumpParams {
    fn coeff(&self, k: i64) -> C64 {
        phi_fourier(k, self)
    }
}

/// A smooth, even, nonvanishing circle symbol with winding number zero and a
/// known factorization `φ = G[φ]·φ^+(z)·φ^+(1/z)`, `φ^+(0) = 1`.
pub trait SmoothEvenSymbol: FourierSymbol {
    fn eval(&self, z: C64) -> C64;

    /// The factor analytic inside the disk, normalized to 1 at the origin.
    fn plus_factor(&self, z: C64) -> C64;

    /// The factor analytic outside the disk; equals `φ^+(1/z)` by evenness.
    fn minus_factor(&self, z: C64) -> C64 {
        self.plus_factor(z.inv())
    }

    /// Fourier coefficients of `1/φ`.
    fn inverse_coeff(&self, k: i64) -> C64;

    fn geometric_mean(&self) -> C64;

    /// `(C, ρ)` with `|coeff(k)| ≤ C ρ^{|k|}`, `ρ < 1`.
    fn decay_bound(&self) -> (f64, f64);

    /// Fourier coefficient of `φ^-/φ^+` by the trapezoid rule on `points`
    /// equally spaced circle points.
    fn ratio_coeff(&self, k: i64, points: usize) -> C64 {
        circle_coefficient(|z| self.minus_factor(z) / self.plus_factor(z), k, points)
    }

    /// Checks evenness, nonvanishing, zero winding number, the declared decay
    /// bound and agreement of `eval` with its truncated Fourier series.
    fn validate(&self) -> Result<()> {
        for k in 1..=32 {
            if self.coeff(k) != self.coeff(-k) {
                return Err(invalid(format!("symbol is not even at k = {k}")));
            }
        }
        let (c, rho) = self.decay_bound();
        if !((0.0..1.0).contains(&rho) && c.is_finite()) {
            return Err(invalid("decay bound must have 0 <= rho < 1"));
        }
        for k in 0..=32i64 {
            if self.coeff(k).norm() > c * rho.powi(k as i32) * (1.0 + 1e-12) {
                return Err(invalid(format!("declared decay bound fails at k = {k}")));
            }
        }
        let points = 256;
        let mut winding = 0.0;
        let mut prev = self.eval(ONE);
        for s in 1..=points {
            let theta = 2.0 * PI * s as f64 / points as f64;
            let z = C64::from_polar(1.0, theta);
            let v = self.eval(z);
            if !(v.norm() > 0.0 && v.norm().is_finite()) {
                return Err(invalid(format!("symbol vanishes or blows up at theta = {theta}")));
            }
            winding += (v / prev).arg();
            prev = v;

            let series: C64 = (-40..=40i64)
                .map(|k| self.coeff(k) * z.powi(k as i32))
                .sum();
            if (series - v).norm() > 1e-10 * v.norm().max(1.0) {
                return Err(invalid("eval disagrees with the truncated Fourier series"));
            }
        }
        if winding.abs() > PI {
            return Err(invalid("symbol has nonzero winding number"));
        }
        Ok(())
    }
}

/// `(1/N) Σ f(z_s) z_s^{-k}` over `N` equally spaced points of the unit circle.
pub fn circle_coefficient(f: impl Fn(C64) -> C64, k: i64, points: usize) -> C64 {
    let n = points.max(1);
    let sum: C64 = (0..n)
        .map(|s| {
            let theta = 2.0 * PI * s as f64 / n as f64;
            f(C64::from_polar(1.0, theta)) * C64::from_polar(1.0, -(k as f64) * theta)
        })
        .sum();
    sum / n as f64
}

/// `φ(z) = exp(t(z + 1/z))` with `φ^+ = exp(tz)` and `G[φ] = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpCosine {
    pub t: f64,
}

impl ExpCosine {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(invalid("t must be finite"));
        }
        Ok(ExpCosine { t })
    }
}

/// `I_k(2t) = Σ_m t^{2m+k} / (m! (m+k)!)` for `k ≥ 0`.
pub fn bessel_i_2t(k: u64, t: f64) -> f64 {
    let mut term = 1.0;
    for j in 1..=k {
        term *= t / j as f64;
    }
    let mut sum = term;
    let t2 = t * t;
    let mut m = 0u64;
    loop {
        m += 1;
        term *= t2 / (m as f64 * (m + k) as f64);
        sum += term;
        if term <= f64::EPSILON * 1e-3 * sum || term == 0.0 {
            break;
        }
        if m > 500 {
            break;
        }
    }
    sum
}

impl FourierSymbol for ExpCosine {
    fn coeff(&self, k: i64) -> C64 {
        C64::new(bessel_i_2t(k.unsigned_abs(), self.t), 0.0)
    }
}

impl SmoothEvenSymbol for ExpCosine {
    fn eval(&self, z: C64) -> C64 {
        (self.t * (z + z.inv())).exp()
    }

    fn plus_factor(&self, z: C64) -> C64 {
        (self.t * z).exp()
    }

    fn inverse_coeff(&self, k: i64) -> C64 {
        let sign = if k.unsigned_abs().is_multiple_of(2) { 1.0 } else { -1.0 };
        self.coeff(k) * sign
    }

    fn geometric_mean(&self) -> C64 {
        ONE
    }

    fn decay_bound(&self) -> (f64, f64) {
        // t^k/k!·e^{t²} ≤ e^{t² + 2|t|}·2^{-k}
        let t = self.t.abs();
        ((t * t + 2.0 * t).exp(), 0.5)
    }
}

/// A nonzero constant symbol `φ ≡ c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub c: C64,
}

impl Constant {
    pub fn new(c: C64) -> Result<Self> {
        if c.norm() == 0.0 || !c.norm().is_finite() {
            return Err(invalid("constant symbol must be finite and nonzero"));
        }
        Ok(Constant { c })
    }
}

impl FourierSymbol for Constant {
    fn coeff(&self, k: i64) -> C64 {
        if k == 0 {
            self.c
        } else {
            C64::new(0.0, 0.0)
        }
    }
}

impl SmoothEvenSymbol for Constant {
    fn eval(&self, _z: C64) -> C64 {
        self.c
    }

    fn plus_factor(&self, _z: C64) -> C64 {
        ONE
    }

    fn inverse_coeff(&self, k: i64) -> C64 {
        if k == 0 {
            self.c.inv()
        } else {
            C64::new(0.0, 0.0)
        }
    }

    fn geometric_mean(&self) -> C64 {
        self.c
    }

    fn decay_bound(&self) -> (f64, f64) {
        (self.c.norm(), 0.0)
    }

    fn ratio_coeff(&self, k: i64, _points: usize) -> C64 {
        // both factors are identically 1
        if k == 0 {
            ONE
        } else {
            C64::new(0.0, 0.0)
        }
    }
}
