//! Monte Carlo sampling of β = 2 Gaussian and Laguerre ensembles through
//! their tridiagonal models, hard-edge scaling, and empirical counting
//! generating functions `E[e^{-2πiα·#}]` compared with Fredholm determinants.
//!
//! # Sampler
//!
//! Every sample owns its random stream: a `ChaCha8Rng` seeded with
//! `seed_from_u64(seed)` and switched to stream `sample_index` by
//! `set_stream`. Results therefore do not depend on the number of workers or
//! on scheduling. Chi-square entries are drawn as Gamma variates with the
//! pinned `rand_distr` Gamma sampler (Marsaglia-Tsang squeeze rejection for
//! shape ≥ 1, and `Gamma(1 + k)·U^{1/k}` for shape `k < 1`).
//!
//! # Models
//!
//! * GUE with density `∝ exp(-tr H²/2)`: diagonal `N(0, 1)`, off-diagonal
//!   `χ_{2i}/√2` for `i = N-1, …, 1`.
//! * LUE with weight `λ^a e^{-λ}`: `L = B Bᵀ` for the lower bidiagonal `B`
//!   with `B_ii² ~ Gamma(a + N - i + 1)` and `B_{i+1,i}² ~ Gamma(N - i)`
//!   (1-based, unit scale).
//!
//! Only the squared off-diagonal of the tridiagonal matrix is stored; it is
//! all the Sturm count and bisection need.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fredholm::{nystrom_det, KernelSpec, NystromResult};
use crate::special::QuadratureRule;
use crate::symbols::JumpParams;

/// Hard-edge scaling constant `c` in `u = c·√(N λ)`.
///
/// Fixed by the first-intensity calibration: with `a = -1/2`, `N = 400`,
/// `R = 4` and `4·10⁴` samples the mean count of scaled points in `(0, R)`
/// agrees with `∫₀^R (1/π)(1 + sin 2x/(2x)) dx` only for `c = 2` (see the
/// `calibration_fixes_the_scale` test).
pub const HARD_EDGE_SCALE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Ensemble {
    Gue,
    Lue { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub ensemble: Ensemble,
    /// Matrix size `N`.
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn new(ensemble: Ensemble, n: usize, samples: usize, seed: u64) -> Result<Self> {
        let cfg = EnsembleConfig {
            ensemble,
            n,
            samples,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("matrix size must be at least 1"));
        }
        if self.samples == 0 {
            return Err(invalid("sample count must be at least 1"));
        }
        if let Ensemble::Lue { a } = self.ensemble {
            if !(a > -1.0) || !a.is_finite() {
                return Err(invalid(format!("Laguerre parameter must exceed -1, got {a}")));
            }
        }
        Ok(())
    }

    /// The random stream of sample `index`.
    pub fn stream(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Symmetric tridiagonal matrix stored as its diagonal and squared
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off_sq: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`, by the Sturm sequence of
    /// the `LDLᵀ` pivots of `T - x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 { 0.0 } else { self.off_sq[i - 1] / q };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// All eigenvalues in increasing order by bisection on the Sturm count.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.len();
        if n == 0 {
            return Vec::new();
        }
        // Gershgorin interval
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let left = if i > 0 { self.off_sq[i - 1].sqrt() } else { 0.0 };
            let right = if i + 1 < n { self.off_sq[i].sqrt() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = 1e-12 * (lo.abs().max(hi.abs())).max(1.0);
        let (lo, hi) = (lo - pad, hi + pad);
        (0..n)
            .map(|k| {
                let (mut a, mut b) = (lo, hi);
                while b - a > 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    if self.count_below(mid) > k {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }
}

fn gamma_variate(shape: f64, rng: &mut impl Rng) -> f64 {
    Gamma::new(shape, 1.0)
        .expect("positive shape is validated by the config")
        .sample(rng)
}

/// The tridiagonal model of sample `index`.
pub fn sample_tridiagonal(cfg: &EnsembleConfig, index: usize) -> Tridiagonal {
    let n = cfg.n;
    let mut rng = cfg.stream(index);
    match cfg.ensemble {
        Ensemble::Gue => {
            let diag = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            // (χ_{2i}/√2)² = Gamma(i, 1)
            let off_sq = (1..n).rev().map(|i| gamma_variate(i as f64, &mut rng)).collect();
            Tridiagonal { diag, off_sq }
        }
        Ensemble::Lue { a } => {
            let d: Vec<f64> = (1..=n)
                .map(|i| gamma_variate(a + (n - i + 1) as f64, &mut rng))
                .collect();
            let e: Vec<f64> = (1..n).map(|i| gamma_variate((n - i) as f64, &mut rng)).collect();
            let diag = (0..n)
                .map(|i| d[i] + if i > 0 { e[i - 1] } else { 0.0 })
                .collect();
            let off_sq = (0..n.saturating_sub(1)).map(|i| d[i] * e[i]).collect();
            Tridiagonal { diag, off_sq }
        }
    }
}

/// Eigenvalues of every sample, in sample order.
pub fn sample_spectrum(cfg: &EnsembleConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    Ok((0..cfg.samples)
        .into_par_iter()
        .map(|s| sample_tridiagonal(cfg, s).eigenvalues())
        .collect())
}

/// `u_i = c·√(N λ_i)` with `c = HARD_EDGE_SCALE`.
pub fn hard_edge_scale(eigs: &[f64], n: usize) -> Vec<f64> {
    eigs.iter()
        .map(|&l| HARD_EDGE_SCALE * (n as f64 * l.max(0.0)).sqrt())
        .collect()
}

/// Eigenvalue threshold below which a point is counted in `(0, R)` after
/// scaling: the hard-edge map for LUE, `u = √N λ` at the GUE bulk centre.
fn count_threshold(cfg: &EnsembleConfig, big_r: f64) -> (f64, f64) {
    let n = cfg.n as f64;
    match cfg.ensemble {
        Ensemble::Lue { .. } => (0.0, (big_r / HARD_EDGE_SCALE).powi(2) / n),
        Ensemble::Gue => (0.0, big_r / n.sqrt()),
    }
}

/// Scaled count in `(0, R)` per sample.
pub fn sample_counts(cfg: &EnsembleConfig, big_r: f64) -> Result<Vec<usize>> {
    cfg.validate()?;
    if !(big_r > 0.0) {
        return Err(invalid("R must be positive"));
    }
    let (lo, hi) = count_threshold(cfg, big_r);
    Ok((0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            let t = sample_tridiagonal(cfg, s);
            t.count_below(hi) - t.count_below(lo)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GfEstimate {
    pub alpha: f64,
    /// Mean of `e^{-2πiα·count}`.
    pub value: C64,
    /// `sqrt(s²/S)` with `s²` the sample variance of `e^{-2πiα·count}`.
    pub std_error: f64,
    /// `det(I + K)` for the even-sine kernel on `(0, R)`; present for LUE with
    /// `a = -1/2` only.
    pub prediction: Option<NystromResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingSample {
    pub big_r: f64,
    pub samples: usize,
    /// `histogram[k]` samples had exactly `k` scaled points in `(0, R)`.
    pub histogram: Vec<usize>,
    pub mean_count: f64,
    pub mean_count_se: f64,
    pub count_variance: f64,
    pub estimates: Vec<GfEstimate>,
}

impl CountingSample {
    /// Aggregates per-sample counts. The histogram is integer valued, so
    /// aggregation is exact and order independent.
    pub fn from_counts(big_r: f64, counts: &[usize]) -> Result<Self> {
        if counts.is_empty() {
            return Err(invalid("no samples"));
        }
        let max = counts.iter().copied().max().unwrap_or(0);
        let mut histogram = vec![0usize; max + 1];
        for &c in counts {
            histogram[c] += 1;
        }
        let s = counts.len() as f64;
        let (mut sum, mut sum_sq) = (0u128, 0u128);
        for (k, &h) in histogram.iter().enumerate() {
            sum += (k * h) as u128;
            sum_sq += (k * k) as u128 * h as u128;
        }
        let mean = sum as f64 / s;
        let variance = if counts.len() > 1 {
            (sum_sq as f64 - s * mean * mean) / (s - 1.0)
        } else {
            0.0
        };
        Ok(CountingSample {
            big_r,
            samples: counts.len(),
            histogram,
            mean_count: mean,
            mean_count_se: (variance / s).sqrt(),
            count_variance: variance,
            estimates: Vec::new(),
        })
    }

    /// `Ê(α)` with its standard error.
    pub fn generating_function(&self, alpha: f64) -> (C64, f64) {
        let s = self.samples as f64;
        let total: C64 = self
            .histogram
            .iter()
            .enumerate()
            .map(|(k, &h)| unit_phase(alpha, k) * h as f64)
            .sum();
        let mean = total / s;
        // Σ|X - Ê|² = S(1 - |Ê|²) since |X| = 1
        let var = if self.samples > 1 {
            (s * (1.0 - mean.norm_sqr())).max(0.0) / (s - 1.0)
        } else {
            0.0
        };
        (mean, (var / s).sqrt())
    }
}

/// `e^{-2πiαk}`, built so that `α ↦ -α` conjugates the result exactly.
fn unit_phase(alpha: f64, k: usize) -> C64 {
    let theta = 2.0 * std::f64::consts::PI * alpha.abs() * k as f64;
    let (s, c) = theta.sin_cos();
    C64::new(c, -alpha.signum() * s)
}

/// `∫₀^R (1/π)(1 + sin 2x/(2x)) dx`, the expected count for the even-sine
/// correlation kernel.
pub fn even_sine_intensity(big_r: f64) -> Result<f64> {
    let rule = QuadratureRule::gauss_legendre(32)?;
    let panels = (big_r.ceil() as usize).max(1);
    let h = big_r / panels as f64;
    Ok((0..panels)
        .map(|p| {
            rule.integrate_on(p as f64 * h, (p + 1) as f64 * h, |n| {
                let x = n.x;
                let sinc = if x == 0.0 { 1.0 } else { (2.0 * x).sin() / (2.0 * x) };
                (1.0 + sinc) / std::f64::consts::PI
            })
        })
        .sum())
}

/// Empirical counting generating function at each `α`, with the even-sine
/// determinant as companion prediction in the `a = -1/2` Laguerre case.
pub fn counting_gf(
    cfg: &EnsembleConfig,
    big_r: f64,
    alphas: &[f64],
    tol: f64,
) -> Result<CountingSample> {
    if let Some(a) = alphas.iter().find(|a| !a.is_finite()) {
        return Err(invalid(format!("alpha must be finite, got {a}")));
    }
    let counts = sample_counts(cfg, big_r)?;
    let mut sample = CountingSample::from_counts(big_r, &counts)?;
    let predicts = matches!(cfg.ensemble, Ensemble::Lue { a } if a == -0.5);
    for &alpha in alphas {
        let (value, std_error) = sample.generating_function(alpha);
        let prediction = if predicts && alpha.abs() < 0.5 {
            let p = JumpParams::real(alpha)?;
            Some(nystrom_det(&KernelSpec::even_sine(big_r, p)?, tol)?)
        } else {
            None
        };
        sample.estimates.push(GfEstimate {
            alpha,
            value,
            std_error,
            prediction,
        });
    }
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lue(a: f64, n: usize, samples: usize, seed: u64) -> EnsembleConfig {
        EnsembleConfig::new(Ensemble::Lue { a }, n, samples, seed).unwrap()
    }

    fn mean_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(EnsembleConfig::new(Ensemble::Gue, 0, 1, 0).is_err());
        assert!(EnsembleConfig::new(Ensemble::Gue, 1, 0, 0).is_err());
        assert!(EnsembleConfig::new(Ensemble::Lue { a: -1.0 }, 3, 1, 0).is_err());
    }

    #[test]
    fn bisection_matches_small_closed_forms() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3
        let t = Tridiagonal {
            diag: vec![2.0, 2.0],
            off_sq: vec![1.0],
        };
        let e = t.eigenvalues();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
        assert_eq!(t.count_below(2.0), 1);
        // the free Laplacian tridiag(1, -2, 1) of size 6
        let n = 6;
        let t = Tridiagonal {
            diag: vec![-2.0; n],
            off_sq: vec![1.0; n - 1],
        };
        let e = t.eigenvalues();
        for (k, v) in e.iter().enumerate() {
            let exact = -2.0
                + 2.0 * (std::f64::consts::PI * (n - k) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn single_laguerre_eigenvalue_is_gamma_half() {
        let cfg = lue(-0.5, 1, 100_000, 11);
        let eigs: Vec<f64> = sample_spectrum(&cfg).unwrap().into_iter().map(|v| v[0]).collect();
        assert!(eigs.iter().all(|&x| x > 0.0));
        let (m, se) = mean_se(&eigs);
        assert!((m - 0.5).abs() < 3.0 * se, "mean {m} se {se}");
    }

    #[test]
    fn gue_trace_of_square() {
        let cfg = EnsembleConfig::new(Ensemble::Gue, 2, 50_000, 5).unwrap();
        let t: Vec<f64> = sample_spectrum(&cfg)
            .unwrap()
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum())
            .collect();
        let (m, se) = mean_se(&t);
        // N diagonal entries of variance 1 plus N(N-1) off-diagonal |h|² = 1
        assert!((m - 4.0).abs() < 3.0 * se, "mean {m} se {se}");
    }

    #[test]
    fn laguerre_moments_for_two_by_two() {
        let a = 0.7;
        let cfg = lue(a, 2, 50_000, 9);
        let spectra = sample_spectrum(&cfg).unwrap();
        assert!(spectra.iter().flatten().all(|&x| x > 0.0));
        let s1: Vec<f64> = spectra.iter().map(|v| v.iter().sum()).collect();
        let s2: Vec<f64> = spectra.iter().map(|v| v.iter().map(|x| x * x).sum()).collect();
        let n = 2.0;
        let (m1, se1) = mean_se(&s1);
        let (m2, se2) = mean_se(&s2);
        assert!((m1 - n * (n + a)).abs() < 3.0 * se1, "{m1} ± {se1}");
        assert!((m2 - n * (n + a) * (2.0 * n + a)).abs() < 3.0 * se2, "{m2} ± {se2}");
    }

    #[test]
    fn seed_determinism() {
        let cfg = lue(-0.5, 30, 20, 123);
        assert_eq!(sample_spectrum(&cfg).unwrap(), sample_spectrum(&cfg).unwrap());
        let other = lue(-0.5, 30, 20, 124);
        assert_ne!(sample_spectrum(&cfg).unwrap(), sample_spectrum(&other).unwrap());
    }

    #[test]
    fn sturm_count_agrees_with_scaled_spectrum() {
        let cfg = lue(-0.5, 50, 30, 3);
        let counts = sample_counts(&cfg, 3.0).unwrap();
        for (s, eigs) in sample_spectrum(&cfg).unwrap().iter().enumerate() {
            let scaled = hard_edge_scale(eigs, cfg.n);
            let direct = scaled.iter().filter(|&&u| u > 0.0 && u < 3.0).count();
            assert_eq!(direct, counts[s]);
        }
        assert_eq!(hard_edge_scale(&[0.0], 10), vec![0.0]);
    }

    #[test]
    fn trivial_generating_function_values() {
        let cfg = lue(-0.5, 40, 500, 1);
        let s = counting_gf(&cfg, 2.0, &[0.0, 0.2, -0.2], 1e-10).unwrap();
        assert_eq!(s.estimates[0].value, C64::new(1.0, 0.0));
        assert_eq!(s.estimates[2].value, s.estimates[1].value.conj());
        assert!(s.estimates[1].value.norm() <= 1.0);
        let tiny = counting_gf(&cfg, 1e-9, &[0.3], 1e-10).unwrap();
        assert_eq!(tiny.estimates[0].value, C64::new(1.0, 0.0));
    }

    #[test]
    fn calibration_fixes_the_scale() {
        let cfg = lue(-0.5, 400, 40_000, 2024);
        let s = counting_gf(&cfg, 4.0, &[], 1e-10).unwrap();
        let expected = even_sine_intensity(4.0).unwrap();
        assert!(
            (s.mean_count - expected).abs() < 3.0 * s.mean_count_se,
            "mean {} ± {} vs {expected}",
            s.mean_count,
            s.mean_count_se
        );
        // the mean count is first order in c, so a 5% error in the scale
        // shows up at many standard errors
        let off = (4.0 * 1.05 / HARD_EDGE_SCALE).powi(2) / 400.0;
        let shifted: f64 = (0..cfg.samples)
            .into_par_iter()
            .map(|i| sample_tridiagonal(&cfg, i).count_below(off) as f64)
            .sum::<f64>()
            / cfg.samples as f64;
        assert!((shifted - expected).abs() > 5.0 * s.mean_count_se);
    }

    #[test]
    fn doubling_n_keeps_the_scaled_count() {
        let a = counting_gf(&lue(-0.5, 200, 20_000, 7), 4.0, &[], 1e-10).unwrap();
        let b = counting_gf(&lue(-0.5, 400, 20_000, 8), 4.0, &[], 1e-10).unwrap();
        let se = a.mean_count_se.hypot(b.mean_count_se);
        assert!((a.mean_count - b.mean_count).abs() < 3.0 * se);
    }

    /// `tr K - tr K²` for the even-sine kernel on `(0, R)`.
    fn determinantal_variance(big_r: f64) -> f64 {
        let nodes = QuadratureRule::gauss_legendre(64).unwrap().mapped(0.0, big_r);
        let sinc = |u: f64| if u == 0.0 { 1.0 } else { u.sin() / u };
        let k = |x: f64, y: f64| (sinc(x - y) + sinc(x + y)) / std::f64::consts::PI;
        let tr: f64 = nodes.iter().map(|x| k(x.x, x.x) * x.weight).sum();
        let tr2: f64 = nodes
            .iter()
            .flat_map(|x| nodes.iter().map(move |y| (x, y)))
            .map(|(x, y)| k(x.x, y.x).powi(2) * x.weight * y.weight)
            .sum();
        tr - tr2
    }

    #[test]
    fn count_variance_matches_the_kernel() {
        // The variance is not monotone in R: at R = 1 the count is close to
        // a fair Bernoulli variable, at R = 2 it is almost always 1.
        let cfg = lue(-0.5, 400, 20_000, 17);
        for r in [1.0, 2.0, 4.0] {
            let counts = sample_counts(&cfg, r).unwrap();
            let s = CountingSample::from_counts(r, &counts).unwrap();
            let m = s.mean_count;
            let dev: Vec<f64> = counts.iter().map(|&c| (c as f64 - m).powi(2)).collect();
            let (v, se) = mean_se(&dev);
            let exact = determinantal_variance(r);
            assert!((v - exact).abs() < 3.0 * se + 1e-3, "R={r}: {v} ± {se} vs {exact}");
        }
    }

    #[test]
    fn prediction_only_for_the_plus_case() {
        let s = counting_gf(&lue(0.5, 20, 10, 1), 1.0, &[0.1], 1e-10).unwrap();
        assert!(s.estimates[0].prediction.is_none());
        let s = counting_gf(&lue(-0.5, 20, 10, 1), 1.0, &[0.1], 1e-10).unwrap();
        assert!(s.estimates[0].prediction.is_some());
    }
}
