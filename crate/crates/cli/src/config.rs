//! Command-line flags, the optional JSON config file, and the resolved
//! [`RunConfig`]. Flags win over the file; the file wins over defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use spinshift::wavefunction::{NormalizationMode, DEFAULT_GRID_POINTS};
use spinshift::QuadratureSpec;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Spin-up probability against m·kappa
    Fig1,
    /// Spin-up density along x1
    Fig2,
    /// Derivative of the spin-up density along x1
    Fig3,
    /// Information-loss ratio against velocity
    Fig4,
    /// |kappa·eta|/v against m·kappa, with closed-form bounds
    Fig5,
    /// Every scalar and matrix at one (m, kappa, v)
    Compute,
    /// Run the acceptance suite
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fig1 => "fig1",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::Fig5 => "fig5",
            Command::Compute => "compute",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "spinshift",
    version,
    about = "Fisher information of a boosted spin-1/2 wavepacket"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub m: Option<f64>,
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    #[arg(long = "kappa-list", value_delimiter = ',', global = true)]
    pub kappa_list: Option<Vec<f64>>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(
        long = "v-list",
        value_delimiter = ',',
        global = true,
        allow_negative_numbers = true
    )]
    pub v_list: Option<Vec<f64>>,
    /// Momentum grid points per axis for wave functions
    #[arg(long = "grid-points", global = true)]
    pub grid_points: Option<usize>,
    /// Half-width of the x1 window for fig2/fig3
    #[arg(long = "x-max", global = true)]
    pub x_max: Option<f64>,
    /// Samples per curve
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Density normalization for fig2/fig3: raw | 2d-normalized
    #[arg(long, global = true)]
    pub mode: Option<NormalizationMode>,
    /// Output directory; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<f64>,
    /// Include the position-measurement Fisher information in `compute`
    #[arg(long = "classical-fi", global = true)]
    pub classical_fi: bool,
    /// Validation tolerance override, `name=value`; repeatable
    #[arg(long = "tolerance", global = true)]
    pub tolerance: Vec<String>,
    /// Validation checks to run, by number; all when absent
    #[arg(long, value_delimiter = ',', global = true)]
    pub only: Option<Vec<u8>>,
    /// JSON file whose keys mirror the flag names
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Contents of `--config`; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub m: Option<f64>,
    pub kappa: Option<f64>,
    pub kappa_list: Option<Vec<f64>>,
    pub v: Option<f64>,
    pub v_list: Option<Vec<f64>>,
    pub grid_points: Option<usize>,
    pub x_max: Option<f64>,
    pub samples: Option<usize>,
    pub mode: Option<NormalizationMode>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub rel_tol: Option<f64>,
    pub classical_fi: Option<bool>,
    pub tolerance: Option<BTreeMap<String, f64>>,
    pub only: Option<Vec<u8>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config file: {e}")))
    }
}

pub const DEFAULT_SEED: u64 = 20_240_607;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub m: f64,
    pub kappa: f64,
    pub kappa_list: Vec<f64>,
    pub v: Option<f64>,
    pub v_list: Vec<f64>,
    pub grid_points: usize,
    pub x_max: f64,
    pub samples: usize,
    pub mode: NormalizationMode,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub rel_tol: f64,
    pub classical_fi: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub only: Option<Vec<u8>>,
}

fn default_v_list(command: Command) -> Vec<f64> {
    match command {
        Command::Fig1 => vec![0.1, 0.5, 0.95, 1.0],
        Command::Fig2 => vec![0.99, 0.98, 0.9, 0.7, 0.1],
        Command::Fig3 => vec![0.98, 0.9, 0.7, 0.1],
        Command::Fig5 => vec![0.95, 0.7, 0.1],
        _ => Vec::new(),
    }
}

fn default_kappa(command: Command) -> f64 {
    match command {
        Command::Fig2 | Command::Fig3 => 0.1,
        _ => 1.0,
    }
}

fn default_samples(command: Command) -> usize {
    match command {
        Command::Fig2 | Command::Fig3 => 401,
        _ => 200,
    }
}

fn parse_tolerance(item: &str) -> CliResult<(String, f64)> {
    let (name, value) = item
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("tolerance '{item}' is not name=value")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("tolerance '{item}' has a non-numeric value")))?;
    Ok((name.trim().to_string(), value))
}

impl RunConfig {
    /// Defaults for `command`: the published parameter sets for each figure.
    pub fn for_command(command: Command) -> Self {
        let kappa = default_kappa(command);
        Self {
            command,
            m: 1.0,
            kappa,
            kappa_list: vec![0.1, 0.5, 1.0, 3.0],
            v: None,
            v_list: default_v_list(command),
            grid_points: DEFAULT_GRID_POINTS,
            x_max: 5.0 * kappa,
            samples: default_samples(command),
            mode: NormalizationMode::Raw,
            out: None,
            format: Format::Csv,
            seed: DEFAULT_SEED,
            rel_tol: QuadratureSpec::default().rel_tol,
            classical_fi: false,
            tolerances: BTreeMap::new(),
            only: None,
        }
    }

    /// Layers defaults, then the config file, then flags.
    pub fn resolve(command: Command, flags: &Flags, file: Option<&ConfigFile>) -> CliResult<Self> {
        let empty = ConfigFile::default();
        let file = file.unwrap_or(&empty);
        let mut cfg = Self::for_command(command);
        cfg.m = flags.m.or(file.m).unwrap_or(cfg.m);
        cfg.kappa = flags.kappa.or(file.kappa).unwrap_or(cfg.kappa);
        cfg.kappa_list = flags
            .kappa_list
            .clone()
            .or_else(|| file.kappa_list.clone())
            .unwrap_or(cfg.kappa_list);
        cfg.v = flags.v.or(file.v);
        cfg.v_list = flags
            .v_list
            .clone()
            .or_else(|| file.v_list.clone())
            .unwrap_or(cfg.v_list);
        cfg.grid_points = flags
            .grid_points
            .or(file.grid_points)
            .unwrap_or(cfg.grid_points);
        cfg.x_max = flags.x_max.or(file.x_max).unwrap_or(5.0 * cfg.kappa);
        cfg.samples = flags.samples.or(file.samples).unwrap_or(cfg.samples);
        cfg.mode = flags.mode.or(file.mode).unwrap_or(cfg.mode);
        cfg.out = flags.out.clone().or_else(|| file.out.clone());
        cfg.format = flags.format.or(file.format).unwrap_or(cfg.format);
        cfg.seed = flags.seed.or(file.seed).unwrap_or(cfg.seed);
        cfg.rel_tol = flags.rel_tol.or(file.rel_tol).unwrap_or(cfg.rel_tol);
        cfg.classical_fi = flags.classical_fi || file.classical_fi.unwrap_or(false);
        cfg.tolerances = file.tolerance.clone().unwrap_or_default();
        for item in &flags.tolerance {
            let (k, v) = parse_tolerance(item)?;
            cfg.tolerances.insert(k, v);
        }
        cfg.only = flags.only.clone().or_else(|| file.only.clone());
        cfg.check()?;
        Ok(cfg)
    }

    /// Range checks shared by every command.
    pub fn check(&self) -> CliResult<()> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.m) {
            return usage(format!("m = {} must be positive", self.m));
        }
        if !positive(self.kappa) {
            return usage(format!("kappa = {} must be positive", self.kappa));
        }
        if let Some(k) = self.kappa_list.iter().find(|k| !positive(**k)) {
            return usage(format!("kappa-list entry {k} must be positive"));
        }
        let velocity_ok = |v: f64| (0.0..=1.0).contains(&v);
        if let Some(v) = self.v.filter(|v| !velocity_ok(*v)) {
            return usage(format!("v = {v} must lie in [0, 1]"));
        }
        if let Some(v) = self.v_list.iter().find(|v| !velocity_ok(**v)) {
            return usage(format!("v-list entry {v} must lie in [0, 1]"));
        }
        if matches!(self.command, Command::Fig2 | Command::Fig3) {
            if let Some(v) = self.v_list.iter().find(|v| **v <= 0.0 || **v >= 1.0) {
                return usage(format!("{} needs 0 < v < 1, got {v}", self.command.name()));
            }
        }
        if self.grid_points < 16 || self.grid_points % 4 != 0 {
            return usage(format!(
                "grid-points = {} must be at least 16 and a multiple of 4",
                self.grid_points
            ));
        }
        if !positive(self.x_max) {
            return usage(format!("x-max = {} must be positive", self.x_max));
        }
        if self.samples < 2 {
            return usage(format!("samples = {} must be at least 2", self.samples));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return usage(format!("rel-tol = {} must lie in (0, 1)", self.rel_tol));
        }
        Ok(())
    }

    pub fn quadrature(&self) -> CliResult<QuadratureSpec> {
        Ok(QuadratureSpec::default().with_rel_tol(self.rel_tol)?)
    }
}
