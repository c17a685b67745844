//! Named reproduction scenarios `fig1` .. `fig9`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use clap::ValueEnum;

use kickfid_core::classical::{default_portrait_seeds, DEFAULT_PORTRAIT_ITERATIONS};
use kickfid_core::io::WignerView;

use crate::config::{ConfigOverrides, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::runner::{self, RunOutput};

pub const FIG9_KICKS: [usize; 6] = [990, 991, 992, 993, 994, 995];

/// Half-width of the phase-space window written for Wigner snapshots.
pub const FIG9_EXTENT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::Fig1,
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::Fig9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Figure::Fig1 => "classical phase portrait at K1",
            Figure::Fig2 => "twin fidelity series and its spectrum",
            Figure::Fig3 => "fidelity spectra with and without interaction",
            Figure::Fig4 => "fidelity periods against beta",
            Figure::Fig5 => "fidelity periods against x0",
            Figure::Fig6 => "width spectrum and G(n)",
            Figure::Fig7 => "measured T2 against the width-frequency prediction",
            Figure::Fig8 => "intermediate-band amplitude against beta",
            Figure::Fig9 => "Wigner snapshots with and without interaction",
        }
    }

    /// Settings applied beneath the config file and command-line flags.
    pub fn preset(self) -> ConfigOverrides {
        let mut o = ConfigOverrides::default();
        match self {
            Figure::Fig4 => o.betas = Some((1..=6).map(|i| i as f64 * 1e-5).collect()),
            Figure::Fig5 => o.x0s = Some(crate::config::default_x0s()),
            Figure::Fig7 => o.betas = Some((2..=6).map(|i| i as f64 * 1e-5).collect()),
            Figure::Fig8 => o.betas = Some((0..=6).map(|i| i as f64 * 1e-5).collect()),
            Figure::Fig9 => o.n_kicks = Some(*FIG9_KICKS.last().unwrap()),
            Figure::Fig1 | Figure::Fig2 | Figure::Fig3 | Figure::Fig6 => {}
        }
        o
    }

    pub fn run(self, cfg: &ExperimentConfig) -> CliResult<RunOutput> {
        match self {
            Figure::Fig1 => runner::run_portrait(cfg, &default_portrait_seeds(), DEFAULT_PORTRAIT_ITERATIONS),
            Figure::Fig2 => runner::run_fidelity_experiment(cfg),
            Figure::Fig3 => fig3(cfg),
            Figure::Fig4 | Figure::Fig7 | Figure::Fig8 => runner::sweep_beta(cfg),
            Figure::Fig5 => runner::sweep_x0(cfg),
            Figure::Fig6 => runner::run_g_correlation(cfg),
            Figure::Fig9 => fig9(cfg),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown figure '{s}', expected fig1..fig9")))
    }
}

/// Resolves the figure's preset under the given file and flag layers.
pub fn resolve(fig: Figure, layers: &[&ConfigOverrides]) -> CliResult<ExperimentConfig> {
    let preset = fig.preset();
    let mut all: Vec<&ConfigOverrides> = vec![&preset];
    all.extend_from_slice(layers);
    ExperimentConfig::resolve(fig.name(), &all)
}

fn fig3(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    let mut main = runner::run_fidelity_experiment(cfg)?;
    let free_cfg = ExperimentConfig {
        output: cfg.output.join("beta0"),
        ..cfg.with_point(0.0, cfg.x0, cfg.p0)
    };
    let free = runner::run_fidelity_experiment(&free_cfg)?;
    let amp = |o: &RunOutput| o.manifest.peaks.get("T2").and_then(|e| e.peak()).map(|p| p.amplitude);
    let (a, a0) = (amp(&main), amp(&free));
    let m = &mut main.manifest;
    for name in &free.manifest.outputs {
        m.add_output(format!("beta0/{name}"));
    }
    m.set_value("amp_T2_beta0", a0.unwrap_or(0.0));
    if let (Some(a), Some(a0)) = (a, a0) {
        m.set_value("amp_T2_ratio", a / a0);
    }
    m.write(&main.dir)?;
    Ok(main)
}

fn fig9(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    let start = Instant::now();
    std::fs::create_dir_all(&cfg.output)?;
    let view = WignerView {
        stride: 2,
        x_range: Some((-FIG9_EXTENT, FIG9_EXTENT)),
        p_range: Some((-FIG9_EXTENT, FIG9_EXTENT)),
    };
    let mut manifest = RunManifest::new("reproduce fig9", cfg);
    let mut failure = None;
    let mut dets = Vec::new();
    for (tag, beta) in [("beta0", 0.0), ("interacting", cfg.beta)] {
        let sub = ExperimentConfig {
            output: cfg.output.join(tag),
            ..cfg.with_point(beta, cfg.x0, cfg.p0)
        };
        let out = runner::run_wigner_sequence(&sub, &FIG9_KICKS, &view)?;
        for name in &out.manifest.outputs {
            manifest.add_output(format!("{tag}/{name}"));
        }
        for e in &out.manifest.errors {
            manifest.record_error(tag, e);
        }
        if let Some(r) = out.manifest.value("det_ratio_max") {
            manifest.set_value(format!("{tag}.det_ratio_max"), r);
        }
        let det: Vec<f64> = FIG9_KICKS
            .iter()
            .filter_map(|k| out.manifest.value(&format!("det_{k}")))
            .collect();
        if failure.is_none() {
            failure = out.failure;
        }
        dets.push(det);
    }
    if dets.iter().all(|d| d.len() == FIG9_KICKS.len()) {
        let min_ratio = dets[0]
            .iter()
            .zip(&dets[1])
            .map(|(free, inter)| free / inter)
            .fold(f64::INFINITY, f64::min);
        manifest.set_value("smearing_ratio_min", min_ratio);
    }
    manifest.elapsed_seconds = start.elapsed().as_secs_f64();
    if let Some(f) = &failure {
        manifest.record_error("run", f);
    }
    manifest.write(&cfg.output)?;
    Ok(RunOutput {
        manifest,
        dir: cfg.output.clone(),
        failure,
    })
}
