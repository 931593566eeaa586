use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::config::{Command, ExperimentConfig};
use super::report::{Report, ReportRow};
use crate::error::Result;
use crate::fredholm::{
    diff_norm_diag, min_sv_i_plus_h, nystrom_det_with, quotient_det_with, wh_prediction,
    DiffNormOptions, KernelSpec, NystromOptions,
};
use crate::linalg::LogDet;
use crate::rmt::{counting_gf, even_sine_intensity, Ensemble, EnsembleConfig};
use crate::special::{barnes_g, gamma, log_barnes_g};
use crate::symbols::{ExpCosine, JumpParams};
use crate::toeplitz_hankel::{
    det_th, inverse_identity_residual, theorem_constant, th_asymptotic, verify_th_identity,
};

/// Tanh-sinh level of the Nyström grid used by the minimum singular value
/// diagnostic.
const MIN_SV_LEVEL: u32 = 5;

/// Runs the configured command on a pool of `cfg.jobs` workers. Rows come
/// back in grid order whatever the completion order.
pub fn run_command(cfg: &ExperimentConfig) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| crate::error::Error::InvalidArgument(format!("worker pool: {e}")))?;
    let rows = pool.install(|| match cfg.command {
        Command::ThDet => cmd_th_det(cfg),
        Command::WhDet => cmd_wh_det(cfg),
        Command::Quotient => cmd_quotient(cfg),
        Command::Identity => cmd_identity(cfg),
        Command::Diagnostics => cmd_diagnostics(cfg),
        Command::Rmt => cmd_rmt(cfg),
        Command::Barnes => cmd_barnes(cfg),
    })?;
    Report::new(cfg.command.name(), rows)
}

/// Row id `<command>-<index>`.
fn row(cfg: &ExperimentConfig, index: usize) -> ReportRow {
    ReportRow::new(format!("{}-{index}", cfg.command.name()))
}

fn finish(cfg: &ExperimentConfig, r: ReportRow, start: Instant) -> ReportRow {
    if cfg.timings {
        r.float("runtime_s", start.elapsed().as_secs_f64())
    } else {
        r
    }
}

fn nystrom_options(cfg: &ExperimentConfig) -> NystromOptions {
    NystromOptions {
        family: cfg.quad.map(Into::into),
        max_nodes: cfg.max_nodes,
        ..NystromOptions::with_tol(cfg.tol)
    }
}

fn with_alpha(r: ReportRow, a: C64) -> ReportRow {
    r.float("alpha_re", a.re).float("alpha_im", a.im)
}

/// `det(T_n + H_n)` against `n^{-3α²}·2^{4α²}G(1-2α)G(1+2α)` over the n-grid.
pub fn cmd_th_det(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let p = cfg.jump()?;
    cfg.n_grid
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let start = Instant::now();
            log::info!("th-det: n = {n}");
            let det = det_th(n, &p)?;
            let asym = th_asymptotic(n, &p)?;
            let ratio = det.div(&LogDet::from_value(asym.value)).value();
            let r = with_alpha(row(cfg, i).int("n", n), p.alpha())
                .complex("det", det.value())
                .float("log_abs_det", det.log_magnitude)
                .complex("asymptotic", asym.value)
                .complex("ratio", ratio)
                .float("abs_ratio_minus_1", (ratio - 1.0).norm())
                .flag("degenerate", asym.degenerate)
                // a single exact factorization: nothing to refine
                .float("refinement_gap", 0.0)
                .flag("converged", det.log_magnitude.is_finite());
            Ok(finish(cfg, r, start))
        })
        .collect()
}

/// Nyström `det(I + K)` for the even-sine kernel on `(0, R)` against the
/// large-`R` prediction.
pub fn cmd_wh_det(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let p = cfg.jump()?;
    let opts = nystrom_options(cfg);
    cfg.r_grid
        .par_iter()
        .enumerate()
        .map(|(i, &big_r)| {
            let start = Instant::now();
            log::info!("wh-det: R = {big_r}");
            let res = nystrom_det_with(&KernelSpec::even_sine(big_r, p)?, &opts)?;
            let pred = wh_prediction(big_r, &p)?;
            let ratio = res.logdet.div(&LogDet::from_value(pred)).value();
            let r = with_alpha(row(cfg, i).float("big_r", big_r), p.alpha())
                .complex("det", res.logdet.value())
                .complex("prediction", pred)
                .complex("ratio", ratio)
                .float("abs_ratio_minus_1", (ratio - 1.0).norm())
                .float("ratio_phase", ratio.arg())
                .int("node_count", res.node_count)
                .text("rule_family", res.rule_family.name())
                .float("refinement_gap", res.refinement_gap)
                .flag("converged", res.converged);
            Ok(finish(cfg, r, start))
        })
        .collect()
}

/// Both sides of the limiting relation between the Wiener-Hopf+Hankel and
/// Toeplitz+Hankel determinants, with `n = round(R)`.
pub fn cmd_quotient(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let p = cfg.jump()?;
    let opts = nystrom_options(cfg);
    let q_opts = NystromOptions {
        start: Some(4),
        ..opts
    };
    cfg.r_grid
        .par_iter()
        .enumerate()
        .map(|(i, &big_r)| {
            let start = Instant::now();
            let n = big_r.round() as usize;
            log::info!("quotient: R = {big_r}, n = {n}");
            let th = det_th(n, &p)?;
            let wh = nystrom_det_with(&KernelSpec::even_sine(big_r, p)?, &opts)?;
            let q = quotient_det_with(big_r, n as u32, &p, &q_opts)?;
            let lhs = wh.logdet.div(&th).value();
            let residual = (lhs - q.value).norm() / lhs.norm();
            let r = with_alpha(row(cfg, i).float("big_r", big_r).int("n", n), p.alpha())
                .complex("det_th", th.value())
                .complex("det_wh", wh.logdet.value())
                .complex("lhs", lhs)
                .complex("quotient", q.value)
                .float("residual", residual)
                .float("wh_refinement_gap", wh.refinement_gap)
                .int("quotient_node_count", q.node_count)
                .float("smallest_pivot", q.smallest_pivot)
                .float("refinement_gap", q.refinement_gap)
                .flag("converged", wh.converged && q.converged);
            Ok(finish(cfg, r, start))
        })
        .collect()
}

/// The factorized Toeplitz+Hankel identity and the interior-block inverse
/// residual for `exp(t(z + 1/z))` over the M-grid.
pub fn cmd_identity(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let sym = ExpCosine::new(cfg.t)?;
    let n = cfg.n_grid[0];
    let checks: Vec<_> = cfg
        .m_grid
        .par_iter()
        .map(|&m| {
            let start = Instant::now();
            log::info!("identity: n = {n}, M = {m}");
            Ok((
                verify_th_identity(&sym, n, m)?,
                inverse_identity_residual(&sym, m)?,
                start,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(checks
        .iter()
        .enumerate()
        .map(|(i, (c, inv, start))| {
            // change of the truncated right side from the previous M
            let step = match i {
                0 => f64::INFINITY,
                _ => (c.rhs - checks[i - 1].0.rhs).norm() / c.rhs.norm(),
            };
            let r = row(cfg, i)
                .float("t", cfg.t)
                .int("n", n)
                .int("m", cfg.m_grid[i])
                .complex("lhs", c.lhs)
                .complex("rhs", c.rhs)
                .float("gap", c.gap)
                .float("inverse_residual", *inv)
                .float("refinement_gap", step)
                .flag("converged", c.gap.is_finite() && inv.is_finite());
            finish(cfg, r, *start)
        })
        .collect())
}

/// Size of `K_R^0 - H_n^0` with `R = n`, and the smallest singular value of
/// `I + H_n^0`.
pub fn cmd_diagnostics(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let p = cfg.jump()?;
    let opts = DiffNormOptions::default();
    cfg.n_grid
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let start = Instant::now();
            log::info!("diagnostics: n = R = {n}");
            let d = diff_norm_diag(n as f64, n as u32, &p, &opts)?;
            let sv = min_sv_i_plus_h(n as u32, &p, MIN_SV_LEVEL)?;
            let r = with_alpha(row(cfg, i).int("n", n).float("big_r", n as f64), p.alpha())
                .float("frobenius", d.frobenius)
                .float("corner_bound", d.bound)
                .float("b", d.b)
                .float("min_singular_value", sv)
                .int("node_count", d.node_count)
                .flag("converged", d.frobenius.is_finite() && d.bound.is_finite());
            Ok(finish(cfg, r, start))
        })
        .collect()
}

/// Empirical counting generating function of scaled Laguerre (or GUE bulk)
/// eigenvalues against the even-sine determinant.
pub fn cmd_rmt(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let ens = EnsembleConfig::new(
        Ensemble::Lue { a: cfg.lue_a },
        cfg.matrix_size,
        cfg.samples,
        cfg.seed,
    )?;
    let alphas = cfg.rmt_alphas();
    let mut rows = Vec::new();
    for &big_r in &cfg.r_grid {
        let start = Instant::now();
        log::info!("rmt: R = {big_r}, N = {}, {} samples", cfg.matrix_size, cfg.samples);
        let s = counting_gf(&ens, big_r, &alphas, cfg.tol)?;
        let intensity = even_sine_intensity(big_r)?;
        for e in &s.estimates {
            let (pred, gap, converged) = match &e.prediction {
                Some(p) => (p.logdet.value(), p.refinement_gap, p.converged),
                None => (C64::new(f64::NAN, f64::NAN), f64::NAN, true),
            };
            let deviation = (e.value - pred).norm() / e.std_error;
            let r = row(cfg, rows.len())
                .float("big_r", big_r)
                .float("alpha", e.alpha)
                .int("matrix_size", cfg.matrix_size)
                .int("samples", cfg.samples)
                .float("lue_a", cfg.lue_a)
                .complex("gf", e.value)
                .float("std_error", e.std_error)
                .complex("prediction", pred)
                .float("deviation_in_se", deviation)
                .float("mean_count", s.mean_count)
                .float("mean_count_se", s.mean_count_se)
                .float("intensity_integral", intensity)
                .float("refinement_gap", gap)
                .flag("converged", converged);
            rows.push(finish(cfg, r, start));
        }
    }
    Ok(rows)
}

/// `|G(z + 1) - Γ(z)G(z)| / |G(z + 1)|`.
fn recurrence_residual(z: C64) -> Result<f64> {
    let lhs = barnes_g(z + 1.0);
    let rhs = gamma(z)? * barnes_g(z);
    Ok((lhs - rhs).norm() / lhs.norm())
}

/// Barnes G at `1 ± 2α` and the constant `2^{4α²}G(1-2α)G(1+2α)` over the
/// α-grid (real parts from the grid, imaginary part from `alpha_im`).
pub fn cmd_barnes(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    cfg.alpha_grid
        .par_iter()
        .enumerate()
        .map(|(i, &a_re)| {
            let start = Instant::now();
            let p = JumpParams::new(C64::new(a_re, cfg.alpha_im))?;
            let a = p.alpha();
            let (zm, zp) = (1.0 - 2.0 * a, 1.0 + 2.0 * a);
            let residual = recurrence_residual(zm)?.max(recurrence_residual(zp)?);
            let r = with_alpha(row(cfg, i), a)
                .complex("g_minus", log_barnes_g(zm)?.exp())
                .complex("g_plus", log_barnes_g(zp)?.exp())
                .complex("constant", theorem_constant(&p))
                .float("recurrence_residual", residual)
                .flag("converged", residual.is_finite());
            Ok(finish(cfg, r, start))
        })
        .collect()
}
