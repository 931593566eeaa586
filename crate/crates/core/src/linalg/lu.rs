use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Trailing updates of at least this many rows run in parallel.
const PAR_ROWS: usize = 96;

/// Determinant as `exp(log_magnitude + i·phase)`; `log_magnitude = -∞`
/// marks an exactly singular matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    pub log_magnitude: f64,
    /// principal value in (-π, π]
    pub phase: f64,
}

impl LogDet {
    pub const ONE: LogDet = LogDet {
        log_magnitude: 0.0,
        phase: 0.0,
    };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        LogDet {
            log_magnitude,
            phase: wrap_phase(phase),
        }
    }

    pub fn from_value(z: C64) -> Self {
        if z == C64::new(0.0, 0.0) {
            return LogDet::new(f64::NEG_INFINITY, 0.0);
        }
        LogDet::new(z.norm().ln(), z.arg())
    }

    pub fn value(&self) -> C64 {
        if self.log_magnitude == f64::NEG_INFINITY {
            return C64::new(0.0, 0.0);
        }
        C64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    pub fn is_singular(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    /// log of the determinant, `log_magnitude + i·phase`.
    pub fn ln(&self) -> C64 {
        C64::new(self.log_magnitude, self.phase)
    }

    pub fn mul(&self, other: &LogDet) -> LogDet {
        LogDet::new(self.log_magnitude + other.log_magnitude, self.phase + other.phase)
    }

    pub fn div(&self, other: &LogDet) -> LogDet {
        LogDet::new(self.log_magnitude - other.log_magnitude, self.phase - other.phase)
    }
}

/// Wrap into (-π, π].
pub(crate) fn wrap_phase(p: f64) -> f64 {
    if !p.is_finite() {
        return p;
    }
    let mut w = p % (2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// `PA = LU` with row pivoting; L unit lower, U upper, packed in one matrix.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: ComplexMatrix,
    /// row `i` of `PA` is row `perm[i]` of `A`
    perm: Vec<usize>,
    swaps: usize,
    /// first column with an exactly zero pivot
    zero_pivot: Option<usize>,
}

impl LuFactorization {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut zero_pivot = None;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                zero_pivot.get_or_insert(k);
                continue;
            }
            if p != k {
                swap_rows(&mut lu, k, p);
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            let inv = pivot.inv();
            let cols = n;
            let (head, tail) = lu_split(&mut lu, k + 1);
            let prow = &head[k * cols..(k + 1) * cols];
            let update = |row: &mut [C64]| {
                let l = row[k] * inv;
                row[k] = l;
                if l != C64::new(0.0, 0.0) {
                    for j in k + 1..cols {
                        row[j] -= l * prow[j];
                    }
                }
            };
            if n - k > PAR_ROWS {
                tail.par_chunks_mut(cols).for_each(update);
            } else {
                tail.chunks_mut(cols).for_each(update);
            }
        }
        Ok(LuFactorization {
            lu,
            perm,
            swaps,
            zero_pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn pivot(&self, k: usize) -> C64 {
        self.lu[(k, k)]
    }

    /// Smallest pivot modulus and its index.
    pub fn smallest_pivot(&self) -> (usize, f64) {
        (0..self.dim())
            .map(|k| (k, self.pivot(k).norm()))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
    }

    pub fn is_singular(&self) -> bool {
        self.zero_pivot.is_some()
    }

    pub fn logdet(&self) -> LogDet {
        if self.zero_pivot.is_some() {
            return LogDet::new(f64::NEG_INFINITY, 0.0);
        }
        let mut log_mag = 0.0;
        // running sum, wrapped once at the end
        let mut phase = if self.swaps % 2 == 1 { PI } else { 0.0 };
        for k in 0..self.dim() {
            let p = self.pivot(k);
            log_mag += p.norm().ln();
            phase += p.arg();
        }
        LogDet::new(log_mag, phase)
    }

    fn check_solvable(&self) -> Result<()> {
        if let Some(index) = self.zero_pivot {
            return Err(Error::Singular { index, pivot: 0.0 });
        }
        Ok(())
    }

    /// Solve `A x = b` in place.
    pub fn solve_vec(&self, b: &[C64]) -> Result<Vec<C64>> {
        self.check_solvable()?;
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension(format!("rhs length {} for n = {n}", b.len())));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        Ok(x)
    }

    /// Solve `Aᴴ y = b` reusing the factorization of `A`.
    pub fn solve_adjoint_vec(&self, b: &[C64]) -> Result<Vec<C64>> {
        self.check_solvable()?;
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension(format!("rhs length {} for n = {n}", b.len())));
        }
        // Aᴴ = Uᴴ Lᴴ P
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[(j, i)].conj() * w[j];
            }
            w[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)].conj() * w[j];
            }
            w[i] = s;
        }
        let mut y = vec![C64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = w[i];
        }
        Ok(y)
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_solvable()?;
        if b.rows() != self.dim() {
            return Err(Error::Dimension(format!(
                "rhs has {} rows, matrix is {}x{}",
                b.rows(),
                self.dim(),
                self.dim()
            )));
        }
        let cols: Vec<Vec<C64>> = (0..b.cols())
            .into_par_iter()
            .map(|j| {
                let col: Vec<C64> = (0..b.rows()).map(|i| b[(i, j)]).collect();
                self.solve_vec(&col)
            })
            .collect::<Result<_>>()?;
        Ok(ComplexMatrix::from_fn(b.rows(), b.cols(), |i, j| cols[j][i]))
    }
}

fn swap_rows(m: &mut ComplexMatrix, a: usize, b: usize) {
    let cols = m.cols();
    for j in 0..cols {
        let t = m[(a, j)];
        m[(a, j)] = m[(b, j)];
        m[(b, j)] = t;
    }
}

/// Rows `[0, split)` and `[split, n)` of the storage as disjoint slices.
fn lu_split(m: &mut ComplexMatrix, split: usize) -> (&[C64], &mut [C64]) {
    let cols = m.cols();
    let (head, tail) = m.as_mut_slice().split_at_mut(split * cols);
    (head, tail)
}

/// Log-determinant by LU with partial pivoting.
pub fn lu_logdet(a: &ComplexMatrix) -> Result<LogDet> {
    Ok(LuFactorization::new(a)?.logdet())
}

/// Solve `A X = B`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    LuFactorization::new(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::smallest_singular;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    /// Laplace expansion along the first row.
    fn cofactor_det(a: &ComplexMatrix) -> C64 {
        let n = a.rows();
        if n == 1 {
            return a[(0, 0)];
        }
        let mut total = C64::new(0.0, 0.0);
        for j in 0..n {
            let minor = ComplexMatrix::from_fn(n - 1, n - 1, |r, c| {
                a[(r + 1, if c < j { c } else { c + 1 })]
            });
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += a[(0, j)] * cofactor_det(&minor) * sign;
        }
        total
    }

    /// Singular values by one-sided Jacobi rotations.
    fn jacobi_singular_values(a: &ComplexMatrix) -> Vec<f64> {
        let n = a.cols();
        let m = a.rows();
        let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha: f64 = cols[p].iter().map(|v| v.norm_sqr()).sum();
                    let beta: f64 = cols[q].iter().map(|v| v.norm_sqr()).sum();
                    let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                    let g = gamma.norm();
                    if g == 0.0 {
                        continue;
                    }
                    off = off.max(g / (alpha * beta).sqrt());
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                    let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let xp = cols[p][i];
                        let xq = cols[q][i];
                        cols[p][i] = xp * c - xq * phase.conj() * s;
                        cols[q][i] = xp * phase * s + xq * c;
                    }
                }
            }
            if off < 1e-15 {
                break;
            }
        }
        let mut sv: Vec<f64> = cols
            .iter()
            .map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sv
    }

    #[test]
    fn identity_and_diagonal() {
        for n in [1, 3, 17] {
            let d = lu_logdet(&ComplexMatrix::identity(n)).unwrap();
            assert_eq!(d, LogDet::ONE);
        }
        let d = lu_logdet(&ComplexMatrix::diagonal(&[C64::new(2.0, 0.0), C64::new(0.0, 3.0)])).unwrap();
        assert!((d.log_magnitude - 6f64.ln()).abs() < 1e-15);
        assert!((d.phase - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_singularity_flag() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, 0.0));
        let mut s = a.clone();
        for j in 0..3 {
            s[(2, j)] = s[(0, j)] + s[(1, j)];
        }
        let z = ComplexMatrix::zeros(3, 3);
        let d = lu_logdet(&z).unwrap();
        assert!(d.is_singular());
        assert_eq!(d.value(), C64::new(0.0, 0.0));
        assert!(matches!(solve(&z, &ComplexMatrix::identity(3)), Err(Error::Singular { index: 0, .. })));
        assert_eq!(smallest_singular(&z, 10).unwrap(), 0.0);
        assert!(lu_logdet(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn against_cofactor_expansion() {
        for n in 1..=5 {
            for seed in 0..4 {
                let a = random_matrix(n, 100 * n as u64 + seed);
                let want = cofactor_det(&a);
                let got = lu_logdet(&a).unwrap().value();
                assert!((got - want).norm() <= 1e-10 * want.norm(), "n={n} {got} vs {want}");
            }
        }
    }

    #[test]
    fn permutation_signs() {
        // cyclic shift of length n has sign (-1)^(n-1)
        for n in 2..7 {
            let p = ComplexMatrix::from_fn(n, n, |i, j| {
                if j == (i + 1) % n { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
            });
            let d = lu_logdet(&p).unwrap();
            assert!(d.log_magnitude.abs() < 1e-15);
            let want = if n % 2 == 0 { PI } else { 0.0 };
            assert!((d.phase - want).abs() < 1e-15, "n={n} phase={}", d.phase);
        }
    }

    #[test]
    fn solve_cases() {
        let b = random_matrix(4, 9);
        assert_eq!(solve(&ComplexMatrix::identity(4), &b).unwrap(), b);
        let two = ComplexMatrix::identity(3).scale(C64::new(2.0, 0.0));
        let x = solve(&two, &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(x, ComplexMatrix::identity(3).scale(C64::new(0.5, 0.0)));

        let a = random_matrix(8, 11);
        let b = random_matrix(8, 12);
        let x = solve(&a, &b).unwrap();
        let r = a.matmul(&x).unwrap().sub(&b).unwrap();
        assert!(r.frobenius_norm() / b.frobenius_norm() < 1e-10);
    }

    #[test]
    fn adjoint_solve() {
        let a = random_matrix(7, 21);
        let lu = LuFactorization::new(&a).unwrap();
        let b: Vec<C64> = (0..7).map(|i| C64::new(i as f64, 1.0)).collect();
        let y = lu.solve_adjoint_vec(&b).unwrap();
        let ah = a.adjoint();
        for i in 0..7 {
            let s: C64 = (0..7).map(|j| ah[(i, j)] * y[j]).sum();
            assert!((s - b[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn smallest_singular_cases() {
        assert!((smallest_singular(&ComplexMatrix::identity(5), 50).unwrap() - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(1e-3, 0.0)]);
        assert!((smallest_singular(&d, 50).unwrap() - 1e-3).abs() < 1e-8);
        for seed in 0..3 {
            let a = random_matrix(6, 300 + seed);
            let oracle = jacobi_singular_values(&a)[0];
            let got = smallest_singular(&a, 500).unwrap();
            assert!((got - oracle).abs() / oracle < 1e-6, "{got} vs {oracle}");
        }
    }

    #[test]
    fn large_parallel_factorization_matches_residual() {
        let n = 200;
        let a = random_matrix(n, 5).add(&ComplexMatrix::identity(n).scale(C64::new(4.0, 0.0))).unwrap();
        let b = random_matrix(n, 6);
        let x = solve(&a, &b).unwrap();
        let r = a.matmul(&x).unwrap().sub(&b).unwrap();
        assert!(r.frobenius_norm() / b.frobenius_norm() < 1e-11);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn multiplicative(seed in 0u64..10_000) {
            let a = random_matrix(6, seed);
            let b = random_matrix(6, seed + 77_777);
            let da = lu_logdet(&a).unwrap();
            let db = lu_logdet(&b).unwrap();
            let dab = lu_logdet(&a.matmul(&b).unwrap()).unwrap();
            prop_assert!((dab.log_magnitude - da.log_magnitude - db.log_magnitude).abs() < 1e-9);
            prop_assert!(wrap_phase(dab.phase - da.phase - db.phase).abs() < 1e-9);
        }

        #[test]
        fn adjoint_conjugates(seed in 0u64..10_000) {
            let a = random_matrix(5, seed);
            let d = lu_logdet(&a).unwrap().value();
            let dh = lu_logdet(&a.adjoint()).unwrap().value();
            prop_assert!((dh - d.conj()).norm() <= 1e-10 * d.norm());
        }
    }
}
