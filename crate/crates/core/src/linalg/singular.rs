use num_complex::Complex64 as C64;

use super::{ComplexMatrix, LuFactorization};
use crate::error::Result;

/// Estimate of σ_min(A) by inverse power iteration on AᴴA.
///
/// One LU factorization of `A` is reused for both `A⁻¹` and `A⁻ᴴ`. Returns 0
/// for an exactly singular matrix. Iteration stops early once the estimate
/// changes by less than 1e-13 relative.
pub fn smallest_singular(a: &ComplexMatrix, iters: usize) -> Result<f64> {
    let lu = LuFactorization::new(a)?;
    if lu.is_singular() {
        return Ok(0.0);
    }
    let n = lu.dim();
    if n == 0 {
        return Ok(f64::INFINITY);
    }
    // deterministic, non-degenerate start
    let mut x: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + 0.5 * ((i as f64) * 0.7).sin(), 0.3 * ((i as f64) * 1.3).cos()))
        .collect();
    normalize(&mut x);
    let mut estimate = f64::NAN;
    for _ in 0..iters.max(1) {
        let y = lu.solve_adjoint_vec(&x)?;
        let z = lu.solve_vec(&y)?;
        // Rayleigh quotient of (AᴴA)⁻¹ at x
        let mu: f64 = x.iter().zip(&z).map(|(a, b)| (a.conj() * b).re).sum();
        let next = 1.0 / mu.max(f64::MIN_POSITIVE).sqrt();
        x = z;
        let norm = normalize(&mut x);
        if !norm.is_finite() || norm == 0.0 {
            return Ok(0.0);
        }
        let done = (next - estimate).abs() <= 1e-13 * next;
        estimate = next;
        if done {
            break;
        }
    }
    Ok(estimate)
}

fn normalize(v: &mut [C64]) -> f64 {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for c in v.iter_mut() {
            *c /= n;
        }
    }
    n
}
