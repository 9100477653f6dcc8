//! Run configuration: command-line flags over a JSON config file over
//! per-command defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Knobs shared by every subcommand. Each is optional so that a flag, a
/// config-file entry and a default can be told apart.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Knobs {
    /// Input curve CSV (one `x,y` pair per line).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output directory; created if missing. Without it the primary
    /// artifact goes to stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Sample count or support grid size (even, at least 16).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Main tolerance of the subcommand.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Keep every n-th row of the flow trajectory.
    #[arg(long, global = true)]
    pub stride: Option<usize>,
    /// Comma-separated ODE amplitudes `p(0)`.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub amplitudes: Option<String>,
    #[arg(skip)]
    #[serde(rename = "amplitudes")]
    pub amplitude_list: Option<Vec<f64>>,
    /// Number of random ovals in a battery.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Safety factor of the flow time step.
    #[arg(long, global = true)]
    pub dt_safety: Option<f64>,
    /// Stop the flow once `A < area_floor * A0`.
    #[arg(long, global = true)]
    pub area_floor: Option<f64>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    /// Keep a flow snapshot every n steps for SVG output.
    #[arg(long, global = true)]
    pub snapshot_every: Option<usize>,
    /// Move the centroid to the origin before taking support functions.
    #[arg(long, global = true)]
    pub recenter: bool,
    /// JSON file with any of the knobs above.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// The effective configuration, echoed into every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub grid: usize,
    pub tol: f64,
    pub seed: u64,
    pub format: Format,
    pub jobs: usize,
    pub stride: usize,
    pub amplitudes: Vec<f64>,
    pub samples: usize,
    pub dt_safety: f64,
    pub area_floor: f64,
    pub t_max: Option<f64>,
    pub snapshot_every: usize,
    pub recenter: bool,
}

/// Per-command defaults for the knobs whose meaning depends on the command.
pub struct Defaults {
    pub grid: usize,
    pub tol: f64,
    pub format: Format,
}

pub const DEFAULT_AMPLITUDES: [f64; 6] = [1.01, 1.1, 1.5, 2.0, 3.0, 5.0];

fn parse_amplitudes(s: &str) -> Result<Vec<f64>, Failure> {
    let list = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Failure::Input(format!("amplitude {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() {
        return Err(Failure::Input("empty amplitude list".into()));
    }
    Ok(list)
}

fn read_file(path: &Path) -> Result<Knobs, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: &'static str, flags: Knobs, defaults: Defaults) -> Result<Self, Failure> {
        let file = match &flags.config {
            Some(path) => read_file(path)?,
            None => Knobs::default(),
        };
        let amplitudes = match (&flags.amplitudes, file.amplitude_list) {
            (Some(s), _) => parse_amplitudes(s)?,
            (None, Some(list)) if list.is_empty() => {
                return Err(Failure::Input("empty amplitude list".into()))
            }
            (None, Some(list)) => list,
            (None, None) => DEFAULT_AMPLITUDES.to_vec(),
        };
        let cfg = Self {
            command,
            input: flags.input.or(file.input),
            output: flags.output.or(file.output),
            grid: flags.grid.or(file.grid).unwrap_or(defaults.grid),
            tol: flags.tol.or(file.tol).unwrap_or(defaults.tol),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            format: flags.format.or(file.format).unwrap_or(defaults.format),
            jobs: flags.jobs.or(file.jobs).unwrap_or(1),
            stride: flags.stride.or(file.stride).unwrap_or(1),
            amplitudes,
            samples: flags.samples.or(file.samples).unwrap_or(100),
            dt_safety: flags.dt_safety.or(file.dt_safety).unwrap_or(0.2),
            area_floor: flags.area_floor.or(file.area_floor).unwrap_or(1e-3),
            t_max: flags.t_max.or(file.t_max),
            snapshot_every: flags.snapshot_every.or(file.snapshot_every).unwrap_or(0),
            recenter: flags.recenter || file.recenter,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), Failure> {
        let positive = [
            ("tol", self.tol),
            ("dt-safety", self.dt_safety),
            ("area-floor", self.area_floor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::Input(format!("--{name} must be positive, got {v}")));
            }
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(Failure::Input(format!("--t-max must be positive, got {t}")));
            }
        }
        if self.grid < 16 || self.grid % 2 != 0 {
            return Err(Failure::Input(format!(
                "--grid must be even and at least 16, got {}",
                self.grid
            )));
        }
        if self.stride == 0 {
            return Err(Failure::Input("--stride must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(Failure::Input("--samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn require_input(&self) -> Result<&Path, Failure> {
        self.input
            .as_deref()
            .ok_or_else(|| Failure::Input("--input is required".into()))
    }
}
