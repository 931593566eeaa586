use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::is_nonpositive_integer;
use crate::error::{domain, Result};

/// Arguments are shifted up to this real part before the Stirling series.
const STIRLING_SHIFT: f64 = 15.0;

// B_2k / (2k (2k - 1)), k = 1..=10
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// log Γ(z), analytic in the plane cut along the negative real axis.
///
/// The value is the continuation of the real log-gamma from the positive
/// axis, so `log_gamma(z + 1) = log_gamma(z) + ln z` holds without `2πi`
/// corrections away from the cut.
pub fn log_gamma(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(domain(format!("log Γ has a pole at {}", z.re)));
    }
    let mut w = z;
    let mut shift = C64::new(0.0, 0.0);
    while w.re < STIRLING_SHIFT {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

pub fn gamma(z: C64) -> Result<C64> {
    log_gamma(z).map(|l| l.exp())
}

fn stirling(w: C64) -> C64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = C64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert!(log_gamma(C64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma(C64::new(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = log_gamma(C64::new(0.5, 0.0)).unwrap();
        assert!((half - C64::new(0.5 * PI.ln(), 0.0)).norm() < 1e-14);
        let g5 = gamma(C64::new(5.0, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-12 && g5.im.abs() < 1e-12);
    }

    #[test]
    fn poles_are_errors() {
        for k in [0.0, -1.0, -7.0] {
            assert!(log_gamma(C64::new(k, 0.0)).is_err());
        }
        assert!(log_gamma(C64::new(-1.5, 0.0)).is_ok());
    }

    #[test]
    fn reflection_on_the_real_line() {
        // Γ(x)Γ(1 - x) = π / sin(πx)
        for x in [0.1, 0.37, 0.5, 0.83] {
            let a = gamma(C64::new(x, 0.0)).unwrap();
            let b = gamma(C64::new(1.0 - x, 0.0)).unwrap();
            let lhs = (a * b).re;
            let rhs = PI / (PI * x).sin();
            assert!((lhs - rhs).abs() / rhs < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn recurrence(re in -6.0f64..8.0, im in -6.0f64..6.0) {
            prop_assume!(im.abs() > 1e-3 || re > 0.1);
            let z = C64::new(re, im);
            let d = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap() - z.ln();
            // mod 2πi
            let k = (d.im / (2.0 * PI)).round();
            let d = d - C64::new(0.0, 2.0 * PI * k);
            prop_assert!(d.norm() < 1e-12, "z={z} d={d}");
        }

        #[test]
        fn conjugation(re in 0.1f64..10.0, im in -5.0f64..5.0) {
            let z = C64::new(re, im);
            let a = log_gamma(z.conj()).unwrap();
            let b = log_gamma(z).unwrap().conj();
            prop_assert!((a - b).norm() < 1e-13);
        }
    }
}
