use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::{is_nonpositive_integer, log_gamma};
use crate::error::{domain, Result};

/// ζ'(-1) = 1/12 - ln A, with A the Glaisher-Kinkelin constant.
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_93;

const ASYMPTOTIC_SHIFT: f64 = 15.0;

// B_{2k+2} / (4k(k+1)), k = 1..=9
const ASYMPTOTIC_COEFFS: [f64; 9] = [
    (-1.0 / 30.0) / 8.0,
    (1.0 / 42.0) / 24.0,
    (-1.0 / 30.0) / 48.0,
    (5.0 / 66.0) / 80.0,
    (-691.0 / 2730.0) / 120.0,
    (7.0 / 6.0) / 168.0,
    (-3617.0 / 510.0) / 224.0,
    (43867.0 / 798.0) / 288.0,
    (-174611.0 / 330.0) / 360.0,
];

/// log G(z) for the Barnes G-function, normalized by G(1) = 1.
///
/// The argument is raised to `Re z ≥ 15` with `G(z) = G(z + N) / Π Γ(z + k)`
/// and the large-argument expansion of `log G(w + 1)` is applied there. The
/// imaginary part is not reduced to a principal value.
pub fn log_barnes_g(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(domain(format!("G has a zero at {}", z.re)));
    }
    let mut w = z;
    let mut shift = C64::new(0.0, 0.0);
    let mut lg = log_gamma(z)?;
    while w.re < ASYMPTOTIC_SHIFT {
        shift += lg;
        lg += w.ln();
        w += 1.0;
    }
    Ok(asymptotic(w - 1.0) - shift)
}

/// Barnes G(z). Exact zero at nonpositive integers.
pub fn barnes_g(z: C64) -> C64 {
    match log_barnes_g(z) {
        Ok(l) => l.exp(),
        Err(_) => C64::new(0.0, 0.0),
    }
}

/// Large-|v| expansion of log G(v + 1).
fn asymptotic(v: C64) -> C64 {
    let lnv = v.ln();
    let v2 = v * v;
    let inv2 = v2.inv();
    let mut series = C64::new(0.0, 0.0);
    let mut pow = inv2;
    for c in ASYMPTOTIC_COEFFS {
        series += pow * c;
        pow *= inv2;
    }
    v2 * 0.5 * lnv - v2 * 0.75 + v * 0.5 * (2.0 * PI).ln() - lnv / 12.0
        + ZETA_PRIME_MINUS_ONE
        + series
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{gamma, QuadratureRule};
    use proptest::prelude::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn small_integers() {
        assert!((barnes_g(re(1.0)) - 1.0).norm() < 1e-12);
        assert!((barnes_g(re(2.0)) - 1.0).norm() < 1e-12);
        assert!((barnes_g(re(3.0)) - 1.0).norm() < 1e-12);
        assert!((barnes_g(re(4.0)) - 2.0).norm() < 1e-12);
        assert!((barnes_g(re(5.0)) - 12.0).norm() < 1e-11);
    }

    #[test]
    fn zeros() {
        for k in [0.0, -1.0, -4.0] {
            assert_eq!(barnes_g(re(k)), C64::new(0.0, 0.0));
            assert!(log_barnes_g(re(k)).is_err());
        }
    }

    /// log G(1 + z) = -z(1 + z)/2 + (z/2) ln 2π + z ln Γ(1 + z) - ∫_0^z ln Γ(1 + t) dt
    fn log_g_integral_oracle(z: f64) -> f64 {
        let rule = QuadratureRule::gauss_legendre(60).unwrap();
        let (a, b) = if z < 0.0 { (z, 0.0) } else { (0.0, z) };
        let integral = rule.integrate_on(a, b, |n| log_gamma(re(1.0 + n.x)).unwrap().re);
        let integral = if z < 0.0 { -integral } else { integral };
        -z * (1.0 + z) / 2.0 + 0.5 * z * (2.0 * PI).ln() + z * log_gamma(re(1.0 + z)).unwrap().re
            - integral
    }

    #[test]
    fn half_integer_against_integral_representation() {
        let oracle = log_g_integral_oracle(-0.5);
        // The same representation must satisfy the recurrence at z = 1/2.
        let next = log_g_integral_oracle(0.5);
        let lg_half = log_gamma(re(0.5)).unwrap().re;
        assert!((next - (oracle + lg_half)).abs() < 1e-10);

        let got = log_barnes_g(re(0.5)).unwrap();
        assert!((got.re - oracle).abs() < 1e-10, "{} vs {}", got.re, oracle);
        assert!(got.im.abs() < 1e-14);
        assert!((barnes_g(re(0.5)).re - 0.603_244_281_209_446_2).abs() < 1e-12);
    }

    #[test]
    fn theorem_constant_inputs() {
        for x in [0.8, 1.2, 0.6, 1.4] {
            let oracle = log_g_integral_oracle(x - 1.0);
            let got = log_barnes_g(re(x)).unwrap().re;
            assert!((got - oracle).abs() < 1e-10, "x={x}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn recurrence_in_strip(rx in -3.0f64..3.0, ix in -3.0f64..3.0) {
            let z = C64::new(rx, ix);
            prop_assume!((z - z.re.round()).norm() > 1e-2 || z.re.round() > 0.0);
            let lhs = barnes_g(z + 1.0);
            let rhs = gamma(z).unwrap() * barnes_g(z);
            prop_assert!((lhs - rhs).norm() / lhs.norm() < 1e-9, "z={z}");
        }

        #[test]
        fn conjugation(rx in -3.0f64..3.0, ix in -3.0f64..3.0) {
            let z = C64::new(rx, ix);
            prop_assume!(ix.abs() > 1e-3);
            let a = barnes_g(z.conj());
            let b = barnes_g(z).conj();
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }
}
