//! Command-line driver: configuration, orchestration and report output.
//!
//! Every subcommand takes the same flag set; settings a command does not
//! use are validated and otherwise ignored. A TOML config file given with
//! `--config` supplies defaults, and flags override it. Data goes to
//! standard output (or `--out`), progress to standard error.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_barnes, cmd_diagnostics, cmd_identity, cmd_quotient, cmd_rmt, cmd_th_det, cmd_wh_det,
    run_command,
};
pub use config::{Command, ExperimentConfig, Format, Overrides, QuadChoice};
pub use report::{Cell, Report, ReportRow};

use crate::error::Result;

/// Environment variable holding the default worker count.
pub const JOBS_ENV: &str = "JUMPDET_JOBS";

#[derive(Debug, Parser)]
#[command(name = "jumpdet", version, about = "Determinants of Wiener-Hopf+Hankel and Toeplitz+Hankel operators with a two-jump symbol")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// det(T_n + H_n) over an n-grid against its large-n asymptotics.
    ThDet(Flags),
    /// Nyström det(I + K) for the even-sine kernel over an R-grid.
    WhDet(Flags),
    /// Both sides of the Wiener-Hopf+Hankel to Toeplitz+Hankel relation.
    Quotient(Flags),
    /// Exact Toeplitz+Hankel identities for exp(t(z + 1/z)) over an M-grid.
    Identity(Flags),
    /// Norm of K_R^0 - H_n^0 and smallest singular value of I + H_n^0.
    Diagnostics(Flags),
    /// Monte Carlo counting statistics of Laguerre hard-edge eigenvalues.
    Rmt(Flags),
    /// Barnes G values and the asymptotic constant over an alpha-grid.
    Barnes(Flags),
}

impl Sub {
    fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::ThDet(f) => (Command::ThDet, f),
            Sub::WhDet(f) => (Command::WhDet, f),
            Sub::Quotient(f) => (Command::Quotient, f),
            Sub::Identity(f) => (Command::Identity, f),
            Sub::Diagnostics(f) => (Command::Diagnostics, f),
            Sub::Rmt(f) => (Command::Rmt, f),
            Sub::Barnes(f) => (Command::Barnes, f),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    /// Comma-separated sizes n.
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    /// Comma-separated interval lengths R.
    #[arg(long, value_delimiter = ',')]
    pub r_grid: Option<Vec<f64>>,
    /// Regularization radius r in (0, 1).
    #[arg(long)]
    pub reg_r: Option<f64>,
    /// Convergence tolerance of refined computations.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Quadrature family for Nyström determinants.
    #[arg(long, value_enum)]
    pub quad: Option<QuadChoice>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker count.
    #[arg(long, env = JOBS_ENV)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with defaults for any of these settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration and exit without computing.
    #[arg(long)]
    pub dry_run: bool,
    /// Add a wall-clock column (makes output run dependent).
    #[arg(long)]
    pub timings: bool,
    /// identity: comma-separated truncation sizes M.
    #[arg(long, value_delimiter = ',')]
    pub m_grid: Option<Vec<usize>>,
    /// identity: parameter t of exp(t(z + 1/z)).
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// barnes, rmt: comma-separated real parts of alpha.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha_grid: Option<Vec<f64>>,
    /// rmt: number of Monte Carlo samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// rmt: matrix size N.
    #[arg(long)]
    pub matrix_size: Option<usize>,
    /// rmt: Laguerre parameter a (> -1).
    #[arg(long, allow_hyphen_values = true)]
    pub lue_a: Option<f64>,
    /// Node cap of Nyström refinement (at most 4096).
    #[arg(long)]
    pub max_nodes: Option<usize>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            command: None,
            alpha_re: self.alpha_re,
            alpha_im: self.alpha_im,
            n_grid: self.n_grid.clone(),
            r_grid: self.r_grid.clone(),
            reg_r: self.reg_r,
            tol: self.tol,
            quad: self.quad,
            seed: self.seed,
            jobs: self.jobs,
            format: self.format,
            out: self.out.clone(),
            timings: self.timings.then_some(true),
            m_grid: self.m_grid.clone(),
            t: self.t,
            alpha_grid: self.alpha_grid.clone(),
            samples: self.samples,
            matrix_size: self.matrix_size,
            lue_a: self.lue_a,
            max_nodes: self.max_nodes,
        }
    }
}

/// Resolves the configuration of a parsed command line.
pub fn resolve(cli: &Cli) -> Result<(ExperimentConfig, bool)> {
    let (command, flags) = cli.command.split();
    let file = match &flags.config {
        Some(path) => Overrides::load(path)?,
        None => Overrides::default(),
    };
    Ok((ExperimentConfig::resolve(command, file, flags.overrides())?, flags.dry_run))
}

fn emit(cfg: &ExperimentConfig, report: &Report) -> std::io::Result<()> {
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match cfg.format {
        Format::Csv => report.write_csv(&mut sink)?,
        Format::Json => report.write_json(&mut sink)?,
    }
    sink.flush()
}

/// Runs a parsed command line. Exit status: 0 when every row converged,
/// 1 when some row did not or a computation failed, 2 on invalid input.
pub fn run(cli: &Cli) -> ExitCode {
    let (cfg, dry_run) = match resolve(cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if dry_run {
        return match cfg.to_toml() {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    let report = match run_command(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&cfg, &report) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if report.all_converged() {
        ExitCode::SUCCESS
    } else {
        let flagged = report.rows.iter().filter(|r| !r.converged()).count();
        log::warn!("{flagged} row(s) did not converge");
        ExitCode::from(1)
    }
}
