//! Experiment configuration.
//!
//! Values are layered: built-in defaults, the scenario preset, top-level keys
//! of the config file, the file's `[scenario]` table, then command-line flags.
//!
//! ```toml
//! tau = 0.01
//! n_kicks = 8192
//!
//! [fig4]
//! betas = [1e-5, 2e-5, 3e-5]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use kickfid_core::classical::rotation_frequency;
use kickfid_core::grid::{make_coherent_state, DEFAULT_GRID_POINTS, DEFAULT_GRID_XMAX};
use kickfid_core::{GridSpec, OverlapPath, SimParams, SpectralOptions, WaveFunction, Window};

use crate::error::{CliError, CliResult};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "KICKFID_WORKERS";

pub const DEFAULT_N_KICKS: usize = 8192;

pub fn default_betas() -> Vec<f64> {
    (1..=6).map(|i| i as f64 * 1e-5).collect()
}

pub fn default_x0s() -> Vec<f64> {
    vec![0.02, 0.05, 0.1, 0.14, 0.18, 0.22, 0.26, 0.3]
}

/// Partial configuration: every field optional, later layers win.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub x0: Option<f64>,
    pub p0: Option<f64>,
    pub omega0: Option<f64>,
    pub n_kicks: Option<usize>,
    pub grid_points: Option<usize>,
    pub x_max: Option<f64>,
    pub betas: Option<Vec<f64>>,
    pub x0s: Option<Vec<f64>>,
    pub p0s: Option<Vec<f64>>,
    pub window: Option<Window>,
    pub pad: Option<usize>,
    pub detrend: Option<bool>,
    pub delta_n: Option<usize>,
    pub overlap: Option<OverlapPath>,
    pub output: Option<PathBuf>,
}

macro_rules! layer {
    ($dst:expr, $src:expr, $($field:ident),*) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl ConfigOverrides {
    /// Copies every value set in `other` over `self`.
    pub fn layer(&mut self, other: &ConfigOverrides) {
        layer!(
            self, other, k1, k2, beta, tau, x0, p0, omega0, n_kicks, grid_points, x_max, betas,
            x0s, p0s, window, pad, detrend, delta_n, overlap, output
        );
    }

    fn from_toml(table: toml::Table, origin: &str) -> CliResult<Self> {
        toml::Value::Table(table)
            .try_into()
            .map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }
}

/// Reads the top-level keys and the `[scenario]` table of a config file.
pub fn load_file(path: &Path, scenario: &str) -> CliResult<(ConfigOverrides, ConfigOverrides)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut global = toml::Table::new();
    let mut section = None;
    for (key, value) in table {
        match value {
            toml::Value::Table(t) => {
                if key == scenario {
                    section = Some(t);
                }
            }
            other => {
                global.insert(key, other);
            }
        }
    }
    let origin = path.display().to_string();
    let global = ConfigOverrides::from_toml(global, &origin)?;
    let section = match section {
        Some(t) => ConfigOverrides::from_toml(t, &format!("{origin} [{scenario}]"))?,
        None => ConfigOverrides::default(),
    };
    Ok((global, section))
}

/// Fully resolved settings of one run. The twins differ only in `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub k1: f64,
    pub k2: f64,
    pub beta: f64,
    pub tau: f64,
    pub x0: f64,
    pub p0: f64,
    /// Frequency of the initial coherent state; defaults to the rotation frequency at `k1`.
    pub omega0: f64,
    pub n_kicks: usize,
    pub grid: GridSpec,
    pub betas: Vec<f64>,
    pub x0s: Vec<f64>,
    pub p0s: Vec<f64>,
    pub spectral: SpectralOptions,
    pub delta_n: usize,
    pub overlap: OverlapPath,
    pub output: PathBuf,
}

impl ExperimentConfig {
    /// Resolves `layers` in order on top of the built-in defaults.
    pub fn resolve(scenario: &str, layers: &[&ConfigOverrides]) -> CliResult<Self> {
        let mut o = ConfigOverrides::default();
        for l in layers {
            o.layer(l);
        }
        let k1 = o.k1.unwrap_or(1.0);
        let omega0 = match o.omega0 {
            Some(w) => w,
            None => rotation_frequency(k1).map_err(CliError::from)?,
        };
        let cfg = Self {
            scenario: scenario.to_string(),
            k1,
            k2: o.k2.unwrap_or(1.01),
            beta: o.beta.unwrap_or(6e-5),
            tau: o.tau.unwrap_or(0.01),
            x0: o.x0.unwrap_or(0.18),
            p0: o.p0.unwrap_or(0.0),
            omega0,
            n_kicks: o.n_kicks.unwrap_or(DEFAULT_N_KICKS),
            grid: GridSpec {
                n_points: o.grid_points.unwrap_or(DEFAULT_GRID_POINTS),
                x_max: o.x_max.unwrap_or(DEFAULT_GRID_XMAX),
            },
            betas: o.betas.unwrap_or_else(default_betas),
            x0s: o.x0s.unwrap_or_else(default_x0s),
            p0s: o.p0s.unwrap_or_else(|| vec![0.0]),
            spectral: SpectralOptions {
                window: o.window.unwrap_or_default(),
                pad_factor: o.pad.unwrap_or(4),
                detrend: o.detrend.unwrap_or(true),
            },
            delta_n: o.delta_n.unwrap_or(1),
            overlap: o.overlap.unwrap_or_default(),
            output: o
                .output
                .unwrap_or_else(|| PathBuf::from("out").join(scenario)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.params_for(self.k1, self.beta).validate()?;
        self.params_for(self.k2, self.beta).validate()?;
        self.grid.build()?;
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(CliError::Config(format!("omega0 must be positive, got {}", self.omega0)));
        }
        if self.spectral.pad_factor == 0 {
            return Err(CliError::Config("pad must be at least 1".into()));
        }
        if self.delta_n == 0 {
            return Err(CliError::Config("delta_n must be at least 1".into()));
        }
        for (name, list) in [("betas", &self.betas), ("x0s", &self.x0s), ("p0s", &self.p0s)] {
            if list.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config(format!("{name} contains a non-finite value")));
            }
        }
        Ok(())
    }

    pub fn params_for(&self, k: f64, beta: f64) -> SimParams {
        SimParams {
            k,
            beta,
            tau: self.tau,
            x0: self.x0,
            p0: self.p0,
            n_kicks: self.n_kicks,
            grid: self.grid,
        }
    }

    pub fn first(&self) -> SimParams {
        self.params_for(self.k1, self.beta)
    }

    pub fn second(&self) -> SimParams {
        self.params_for(self.k2, self.beta)
    }

    pub fn initial_state(&self) -> CliResult<WaveFunction> {
        self.initial_state_at(self.x0, self.p0)
    }

    pub fn initial_state_at(&self, x0: f64, p0: f64) -> CliResult<WaveFunction> {
        let grid = self.grid.build()?;
        Ok(make_coherent_state(&grid, self.tau, self.omega0, x0, p0)?)
    }

    pub fn with_point(&self, beta: f64, x0: f64, p0: f64) -> Self {
        Self {
            beta,
            x0,
            p0,
            ..self.clone()
        }
    }
}

/// Worker count from [`WORKERS_ENV`]; `None` when unset.
pub fn workers_from_env() -> CliResult<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}
