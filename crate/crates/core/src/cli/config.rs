use std::path::{Path, PathBuf};

use clap::ValueEnum;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fredholm::NODE_CAP;
use crate::special::QuadFamily;
use crate::symbols::JumpParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ThDet,
    WhDet,
    Quotient,
    Identity,
    Diagnostics,
    Rmt,
    Barnes,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ThDet => "th-det",
            Command::WhDet => "wh-det",
            Command::Quotient => "quotient",
            Command::Identity => "identity",
            Command::Diagnostics => "diagnostics",
            Command::Rmt => "rmt",
            Command::Barnes => "barnes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum QuadChoice {
    Legendre,
    Tanhsinh,
}

impl From<QuadChoice> for QuadFamily {
    fn from(q: QuadChoice) -> Self {
        match q {
            QuadChoice::Legendre => QuadFamily::GaussLegendre,
            QuadChoice::Tanhsinh => QuadFamily::TanhSinh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every setting a command can read, with each field optional. Both the
/// config file and the command-line flags produce one of these; the
/// resolved configuration layers flags over file over command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub command: Option<Command>,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub n_grid: Option<Vec<usize>>,
    pub r_grid: Option<Vec<f64>>,
    pub reg_r: Option<f64>,
    pub tol: Option<f64>,
    pub quad: Option<QuadChoice>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub timings: Option<bool>,
    pub m_grid: Option<Vec<usize>>,
    pub t: Option<f64>,
    pub alpha_grid: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub matrix_size: Option<usize>,
    pub lue_a: Option<f64>,
    pub max_nodes: Option<usize>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `self` with every field set in `top` replaced.
    pub fn layered(self, top: Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => { Overrides { $($f: top.$f.or(self.$f)),* } };
        }
        pick!(
            command, alpha_re, alpha_im, n_grid, r_grid, reg_r, tol, quad, seed, jobs, format,
            out, timings, m_grid, t, alpha_grid, samples, matrix_size, lue_a, max_nodes
        )
    }
}

/// A fully resolved and validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub n_grid: Vec<usize>,
    pub r_grid: Vec<f64>,
    pub reg_r: f64,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadChoice>,
    pub seed: u64,
    pub jobs: usize,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Adds a wall-clock column; off by default so that output is
    /// reproducible byte for byte.
    pub timings: bool,
    pub m_grid: Vec<usize>,
    pub t: f64,
    pub alpha_grid: Vec<f64>,
    pub samples: usize,
    pub matrix_size: usize,
    pub lue_a: f64,
    /// Node cap of Nyström refinement.
    pub max_nodes: usize,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        let (n_grid, r_grid) = match command {
            Command::ThDet => (vec![64, 128, 256, 512], vec![]),
            Command::WhDet | Command::Quotient => (vec![], vec![20.0, 40.0, 80.0]),
            Command::Identity => (vec![8], vec![]),
            Command::Diagnostics => (vec![20, 40, 80], vec![]),
            Command::Rmt => (vec![], vec![2.0]),
            Command::Barnes => (vec![], vec![]),
        };
        let alpha_grid = match command {
            Command::Barnes => (-4..=4).map(|k| k as f64 / 10.0).collect(),
            _ => vec![],
        };
        ExperimentConfig {
            command,
            alpha_re: 0.1,
            alpha_im: 0.0,
            n_grid,
            r_grid,
            reg_r: 0.9,
            tol: 1e-10,
            quad: None,
            seed: 20240601,
            jobs: default_jobs(),
            format: Format::Csv,
            out: None,
            timings: false,
            m_grid: vec![32, 64, 128],
            t: 0.3,
            alpha_grid,
            samples: 10_000,
            matrix_size: 400,
            lue_a: -0.5,
            max_nodes: NODE_CAP,
        }
    }

    /// Defaults for `command`, then `file`, then `flags`; validated.
    pub fn resolve(command: Command, file: Overrides, flags: Overrides) -> Result<Self> {
        let merged = file.layered(flags);
        if let Some(c) = merged.command {
            if c != command {
                return Err(invalid(format!(
                    "config is for '{}' but the command is '{}'",
                    c.name(),
                    command.name()
                )));
            }
        }
        let d = Self::defaults(command);
        let cfg = ExperimentConfig {
            command,
            alpha_re: merged.alpha_re.unwrap_or(d.alpha_re),
            alpha_im: merged.alpha_im.unwrap_or(d.alpha_im),
            n_grid: merged.n_grid.unwrap_or(d.n_grid),
            r_grid: merged.r_grid.unwrap_or(d.r_grid),
            reg_r: merged.reg_r.unwrap_or(d.reg_r),
            tol: merged.tol.unwrap_or(d.tol),
            quad: merged.quad.or(d.quad),
            seed: merged.seed.unwrap_or(d.seed),
            jobs: merged.jobs.unwrap_or(d.jobs),
            format: merged.format.unwrap_or(d.format),
            out: merged.out.or(d.out),
            timings: merged.timings.unwrap_or(d.timings),
            m_grid: merged.m_grid.unwrap_or(d.m_grid),
            t: merged.t.unwrap_or(d.t),
            alpha_grid: merged.alpha_grid.unwrap_or(d.alpha_grid),
            samples: merged.samples.unwrap_or(d.samples),
            matrix_size: merged.matrix_size.unwrap_or(d.matrix_size),
            lue_a: merged.lue_a.unwrap_or(d.lue_a),
            max_nodes: merged.max_nodes.unwrap_or(d.max_nodes),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn alpha(&self) -> C64 {
        C64::new(self.alpha_re, self.alpha_im)
    }

    pub fn jump(&self) -> Result<JumpParams> {
        JumpParams::new(self.alpha())
    }

    /// The alphas an RMT run evaluates: the grid, or the single `alpha_re`.
    pub fn rmt_alphas(&self) -> Vec<f64> {
        if self.alpha_grid.is_empty() {
            vec![self.alpha_re]
        } else {
            self.alpha_grid.clone()
        }
    }

    /// Checks every numeric constraint the command depends on.
    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(invalid(msg.to_string())) };
        need(self.tol > 0.0 && self.tol.is_finite(), "tol must be positive")?;
        need(self.jobs >= 1, "jobs must be at least 1")?;
        need(
            (1..=NODE_CAP).contains(&self.max_nodes),
            "max-nodes must lie in 1..=4096",
        )?;
        need(self.alpha_im.is_finite(), "alpha-im must be finite")?;
        match self.command {
            Command::ThDet | Command::Diagnostics => {
                self.jump()?;
                need(!self.n_grid.is_empty(), "n-grid must not be empty")?;
                need(self.n_grid.iter().all(|&n| n >= 1), "n-grid entries must be >= 1")?;
                if self.command == Command::Diagnostics {
                    need(
                        self.n_grid.iter().all(|&n| n <= u32::MAX as usize),
                        "n-grid entries are too large",
                    )?;
                }
            }
            Command::WhDet | Command::Quotient => {
                self.jump()?;
                need(!self.r_grid.is_empty(), "r-grid must not be empty")?;
                need(
                    self.r_grid.iter().all(|&r| r > 0.0 && r.is_finite()),
                    "r-grid entries must be positive",
                )?;
                if self.command == Command::Quotient {
                    need(
                        self.r_grid.iter().all(|&r| r.round() >= 1.0),
                        "quotient needs round(R) >= 1",
                    )?;
                }
            }
            Command::Identity => {
                need(self.t.is_finite(), "t must be finite")?;
                let n = *self
                    .n_grid
                    .first()
                    .ok_or_else(|| invalid("identity needs an n (first n-grid entry)"))?;
                need(n >= 1, "n must be >= 1")?;
                need(!self.m_grid.is_empty(), "m-grid must not be empty")?;
                need(self.m_grid.iter().all(|&m| m > n), "m-grid entries must exceed n")?;
            }
            Command::Rmt => {
                need(self.samples >= 1, "samples must be >= 1")?;
                need(self.matrix_size >= 1, "matrix-size must be >= 1")?;
                need(self.lue_a > -1.0 && self.lue_a.is_finite(), "lue-a must exceed -1")?;
                need(!self.r_grid.is_empty(), "r-grid must not be empty")?;
                need(
                    self.r_grid.iter().all(|&r| r > 0.0 && r.is_finite()),
                    "r-grid entries must be positive",
                )?;
                for a in self.rmt_alphas() {
                    JumpParams::real(a)?;
                }
            }
            Command::Barnes => {
                need(!self.alpha_grid.is_empty(), "alpha-grid must not be empty")?;
                for &a in &self.alpha_grid {
                    JumpParams::new(C64::new(a, self.alpha_im))?;
                }
            }
        }
        need(
            self.reg_r > 0.0 && self.reg_r < 1.0,
            "reg-r must lie in (0, 1)",
        )
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| invalid(format!("cannot serialize config: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_is_lossless() {
        for command in [Command::ThDet, Command::Rmt, Command::Barnes] {
            let mut cfg = ExperimentConfig::defaults(command);
            cfg.alpha_re = 0.1 + 1e-17;
            cfg.tol = 3.0e-11;
            cfg.out = Some("x/y.csv".into());
            cfg.quad = Some(QuadChoice::Legendre);
            let text = cfg.to_toml().unwrap();
            assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg, "{text}");
        }
    }

    #[test]
    fn flags_win_over_file() {
        let file = Overrides::from_toml("alpha_re = 0.2\nn_grid = [4, 8]\n").unwrap();
        let flags = Overrides {
            alpha_re: Some(0.3),
            ..Overrides::default()
        };
        let cfg = ExperimentConfig::resolve(Command::ThDet, file, flags).unwrap();
        assert_eq!(cfg.alpha_re, 0.3);
        assert_eq!(cfg.n_grid, vec![4, 8]);
    }

    #[test]
    fn validation_happens_before_computation() {
        let bad = |o: Overrides, c| ExperimentConfig::resolve(c, Overrides::default(), o).is_err();
        assert!(bad(Overrides { alpha_re: Some(0.5), ..Default::default() }, Command::ThDet));
        assert!(bad(Overrides { reg_r: Some(1.0), ..Default::default() }, Command::ThDet));
        assert!(bad(Overrides { n_grid: Some(vec![0]), ..Default::default() }, Command::ThDet));
        assert!(bad(Overrides { r_grid: Some(vec![-1.0]), ..Default::default() }, Command::WhDet));
        assert!(bad(Overrides { m_grid: Some(vec![8]), ..Default::default() }, Command::Identity));
        assert!(bad(Overrides { lue_a: Some(-1.0), ..Default::default() }, Command::Rmt));
        assert!(Overrides::from_toml("nonsense = 1").is_err());
        let wrong = Overrides {
            command: Some(Command::Rmt),
            ..Default::default()
        };
        assert!(ExperimentConfig::resolve(Command::ThDet, wrong, Overrides::default()).is_err());
    }
}
