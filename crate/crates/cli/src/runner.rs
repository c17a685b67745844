//! Experiment orchestration: each run writes CSVs plus a manifest into its output directory.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use kickfid_core::analytic::{
    fidelity_expanded, fidelity_model, predicted_frequencies, wigner_correlation_analytic,
};
use kickfid_core::classical::{phase_portrait, PhasePoint};
use kickfid_core::io::{self, WignerView};
use kickfid_core::observables::{
    wigner, FidelityRecorder, GCorrelationRecorder, SnapshotRecorder, WidthRecorder,
};
use kickfid_core::propagator::{evolve, evolve_twins};
use kickfid_core::spectral::{periodogram, predict_t2, width_frequency, WidthFrequency};
use kickfid_core::{
    Band, BandOutcome, BandSet, MomentumForm, Observer, OscModelParams, Spectrum, TimeSeries,
    TwinObserver,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::{BandEntry, LeakRecord, RunManifest, MANIFEST_FILE};

/// Manifest plus the failure, if any, that determines the exit code.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub dir: PathBuf,
    pub failure: Option<CliError>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, CliError::exit_code)
    }
}

fn finish(
    mut manifest: RunManifest,
    dir: &Path,
    start: Instant,
    failure: Option<CliError>,
) -> CliResult<RunOutput> {
    manifest.elapsed_seconds = start.elapsed().as_secs_f64();
    if let Some(f) = &failure {
        manifest.record_error("run", f);
    }
    manifest.write(dir)?;
    Ok(RunOutput {
        manifest,
        dir: dir.to_path_buf(),
        failure,
    })
}

fn write_series(
    dir: &Path,
    name: &str,
    series: &TimeSeries,
    manifest: &mut RunManifest,
) -> CliResult<()> {
    io::write_series(&dir.join(name), series, Some(MANIFEST_FILE))?;
    manifest.add_output(name);
    Ok(())
}

fn write_spectrum(
    dir: &Path,
    name: &str,
    spec: &Spectrum,
    manifest: &mut RunManifest,
) -> CliResult<()> {
    io::write_spectrum(&dir.join(name), spec, Some(MANIFEST_FILE))?;
    manifest.add_output(name);
    Ok(())
}

/// Series recorded along one twin evolution, starting at kick 0.
#[derive(Debug, Clone)]
pub struct TwinRun {
    pub fidelity: TimeSeries,
    pub width: TimeSeries,
    pub g: Option<TimeSeries>,
    pub leaks: Vec<LeakRecord>,
}

/// Evolves the configured initial state under `k1` and `k2`.
pub fn twin_run(cfg: &ExperimentConfig, with_g: bool) -> CliResult<TwinRun> {
    let psi0 = cfg.initial_state()?;
    let mut fidelity = FidelityRecorder::new();
    let mut width = WidthRecorder::new();
    let mut g = if with_g {
        Some(GCorrelationRecorder::new(cfg.delta_n, cfg.tau, cfg.overlap)?)
    } else {
        None
    };
    let result = {
        let mut observers: Vec<&mut dyn TwinObserver> = vec![&mut fidelity, &mut width];
        if let Some(g) = g.as_mut() {
            observers.push(g);
        }
        for obs in observers.iter_mut() {
            obs.observe(0, &psi0, &psi0);
        }
        evolve_twins(&psi0, &cfg.first(), &cfg.second(), &mut observers)?
    };
    let mut leaks = LeakRecord::from_warnings("first", &result.leaks_first);
    leaks.extend(LeakRecord::from_warnings("second", &result.leaks_second));
    Ok(TwinRun {
        fidelity: fidelity.finish()?,
        width: width.finish(),
        g: g.map(|g| g.finish()).transpose()?,
        leaks,
    })
}

/// Periodogram of a fidelity-like series with one entry per default band.
#[derive(Debug, Clone)]
pub struct PeriodAnalysis {
    pub spectrum: Spectrum,
    pub t1: BandEntry,
    pub t2: BandEntry,
    pub t3: BandEntry,
}

impl PeriodAnalysis {
    pub fn entries(&self) -> [(&'static str, &BandEntry); 3] {
        [("T1", &self.t1), ("T2", &self.t2), ("T3", &self.t3)]
    }

    pub fn first_error(&self) -> Option<CliError> {
        self.entries().iter().find_map(|(name, e)| match e {
            BandEntry::Error { message } => Some(CliError::Numerical(format!("{name}: {message}"))),
            _ => None,
        })
    }
}

pub fn analyse_periods(series: &TimeSeries, cfg: &ExperimentConfig) -> CliResult<PeriodAnalysis> {
    let spectrum = periodogram(series, &cfg.spectral)?;
    let bands = BandSet::default();
    let search = |band: &Band| BandEntry::from_result(BandOutcome::search(&spectrum, band));
    Ok(PeriodAnalysis {
        t1: search(&bands.high),
        t2: search(&bands.mid),
        t3: search(&bands.low_for(spectrum.series_len)),
        spectrum,
    })
}

/// `2 pi / (omega_s - Omega_width)` where `omega_s` is the measured fast fidelity
/// frequency, or `omega1 + omega2` when no fast peak was found.
pub fn predicted_t2(analysis: &PeriodAnalysis, width: &WidthFrequency, cfg: &ExperimentConfig) -> CliResult<f64> {
    let omega_s = match analysis.t1.peak() {
        Some(p) => 2.0 * PI * p.nu,
        None => {
            let d = crate::manifest::Derived::from_config(cfg)
                .ok_or_else(|| CliError::Config("K outside the elliptic range".into()))?;
            d.omega1 + d.omega2
        }
    };
    Ok(predict_t2(0.5 * omega_s, width.omega_width)?)
}

fn record_periods(manifest: &mut RunManifest, prefix: &str, analysis: &PeriodAnalysis) {
    for (name, entry) in analysis.entries() {
        manifest.peaks.insert(format!("{prefix}{name}"), entry.clone());
    }
}

/// Twin fidelity run: `fidelity.csv`, `spectrum.csv`, `width.csv`, `width_spectrum.csv`.
pub fn run_fidelity_experiment(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    let start = Instant::now();
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::new("fidelity", cfg);
    let run = twin_run(cfg, false)?;
    manifest.leaks = run.leaks.clone();
    write_series(&dir, "fidelity.csv", &run.fidelity, &mut manifest)?;
    write_series(&dir, "width.csv", &run.width, &mut manifest)?;

    let analysis = match analyse_periods(&run.fidelity, cfg) {
        Ok(a) => a,
        Err(e) => return finish(manifest, &dir, start, Some(e)),
    };
    write_spectrum(&dir, "spectrum.csv", &analysis.spectrum, &mut manifest)?;
    record_periods(&mut manifest, "", &analysis);
    let mut failure = analysis.first_error();

    match periodogram(&run.width, &cfg.spectral) {
        Ok(ws) => write_spectrum(&dir, "width_spectrum.csv", &ws, &mut manifest)?,
        Err(e) => manifest.record_error("width spectrum", e),
    }
    match width_frequency(&run.width, &cfg.spectral) {
        Ok(wf) => {
            manifest.set_value("omega_width", wf.omega_width);
            match predicted_t2(&analysis, &wf, cfg) {
                Ok(t) => {
                    manifest.set_value("T2_pred", t);
                    if let Some(p) = analysis.t2.peak() {
                        manifest.set_value("T2_rel_diff", (t - p.period).abs() / p.period);
                    }
                }
                Err(e) => manifest.record_error("T2 prediction", e),
            }
            manifest.width.insert("width".into(), wf);
        }
        Err(e) => manifest.record_error("width frequency", e),
    }
    if let Some(a) = analysis.t2.peak() {
        manifest.set_value("amp_T2", a.amplitude);
    }
    if failure.is_none() && !run.fidelity.is_finite() {
        failure = Some(CliError::Numerical("non-finite fidelity".into()));
    }
    finish(manifest, &dir, start, failure)
}

/// One row of a sweep summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointResult {
    pub beta: f64,
    pub x0: f64,
    pub p0: f64,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub t3: Option<f64>,
    pub amp_t2: Option<f64>,
    pub omega_width: Option<f64>,
    pub t2_pred: Option<f64>,
    pub reason: Vec<String>,
}

impl PointResult {
    pub fn t2_rel_diff(&self) -> Option<f64> {
        Some((self.t2_pred? - self.t2?).abs() / self.t2?)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn run_point(cfg: &ExperimentConfig, dir: &Path) -> PointResult {
    let mut out = PointResult {
        beta: cfg.beta,
        x0: cfg.x0,
        p0: cfg.p0,
        ..Default::default()
    };
    let manifest_ref = format!("../{MANIFEST_FILE}");
    let run = match twin_run(cfg, false) {
        Ok(r) => r,
        Err(e) => {
            out.reason.push(e.to_string());
            return out;
        }
    };
    if !run.leaks.is_empty() {
        out.reason.push(format!("{} boundary leak warnings", run.leaks.len()));
    }
    let write = std::fs::create_dir_all(dir)
        .map_err(CliError::from)
        .and_then(|_| {
            io::write_series(&dir.join("fidelity.csv"), &run.fidelity, Some(&manifest_ref))?;
            io::write_series(&dir.join("width.csv"), &run.width, Some(&manifest_ref))?;
            Ok(())
        });
    if let Err(e) = write {
        out.reason.push(e.to_string());
    }
    let analysis = match analyse_periods(&run.fidelity, cfg) {
        Ok(a) => a,
        Err(e) => {
            out.reason.push(e.to_string());
            return out;
        }
    };
    if let Err(e) = io::write_spectrum(&dir.join("spectrum.csv"), &analysis.spectrum, Some(&manifest_ref)) {
        out.reason.push(e.to_string());
    }
    for (name, entry) in analysis.entries() {
        match entry {
            BandEntry::Error { message } => out.reason.push(format!("{name}: {message}")),
            BandEntry::NoPeak => out.reason.push(format!("{name}: no peak")),
            BandEntry::Peak(_) => {}
        }
    }
    out.t1 = analysis.t1.peak().map(|p| p.period);
    out.t2 = analysis.t2.peak().map(|p| p.period);
    out.t3 = analysis.t3.peak().map(|p| p.period);
    out.amp_t2 = analysis.t2.peak().map(|p| p.amplitude);
    match width_frequency(&run.width, &cfg.spectral) {
        Ok(wf) => {
            out.omega_width = Some(wf.omega_width);
            match predicted_t2(&analysis, &wf, cfg) {
                Ok(t) => out.t2_pred = Some(t),
                Err(e) => out.reason.push(format!("T2 prediction: {e}")),
            }
        }
        Err(e) => out.reason.push(format!("width frequency: {e}")),
    }
    out
}

/// Runs every point concurrently; each point writes into `dir/point-NN`.
pub fn run_points(base: &ExperimentConfig, points: &[(f64, f64, f64)], dir: &Path) -> Vec<PointResult> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, &(beta, x0, p0))| {
            let cfg = base.with_point(beta, x0, p0);
            run_point(&cfg, &dir.join(format!("point-{i:02}")))
        })
        .collect()
}

fn sweep_finish(
    mut manifest: RunManifest,
    dir: &Path,
    start: Instant,
    results: &[PointResult],
) -> CliResult<RunOutput> {
    for (i, r) in results.iter().enumerate() {
        manifest.add_output(format!("point-{i:02}/fidelity.csv"));
        if !r.reason.is_empty() {
            manifest.record_error(&format!("point {i}"), r.reason.join("; "));
        }
    }
    let failure = results
        .iter()
        .all(|r| r.t1.is_none())
        .then(|| CliError::Numerical("every sweep point failed".into()));
    finish(manifest, dir, start, failure)
}

/// `sweep_beta.csv`: `beta,T1,T2,T3,amp_T2,omega_width,T2_pred,T2_rel_diff,reason`.
pub fn sweep_beta(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    if cfg.betas.len() < 2 {
        return Err(CliError::Config("a beta sweep needs at least two values".into()));
    }
    let start = Instant::now();
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::new("sweep-beta", cfg);
    let points: Vec<_> = cfg.betas.iter().map(|&b| (b, cfg.x0, cfg.p0)).collect();
    let results = run_points(cfg, &points, &dir);
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.beta.to_string(),
                fmt_opt(r.t1),
                fmt_opt(r.t2),
                fmt_opt(r.t3),
                fmt_opt(r.amp_t2),
                fmt_opt(r.omega_width),
                fmt_opt(r.t2_pred),
                fmt_opt(r.t2_rel_diff()),
                r.reason.join("; "),
            ]
        })
        .collect();
    io::write_table(
        &dir.join("sweep_beta.csv"),
        &["beta", "T1", "T2", "T3", "amp_T2", "omega_width", "T2_pred", "T2_rel_diff", "reason"],
        &rows,
        Some(MANIFEST_FILE),
    )?;
    manifest.add_output("sweep_beta.csv");
    sweep_finish(manifest, &dir, start, &results)
}

/// `sweep_x0.csv`: `x0,T1,T2,T3,reason`, with a `p0` column when several momenta are swept.
pub fn sweep_x0(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    if cfg.x0s.len() < 2 {
        return Err(CliError::Config("an x0 sweep needs at least two values".into()));
    }
    let start = Instant::now();
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::new("sweep-x0", cfg);
    let with_p0 = cfg.p0s.len() > 1;
    let points: Vec<_> = cfg
        .p0s
        .iter()
        .flat_map(|&p0| cfg.x0s.iter().map(move |&x0| (x0, p0)))
        .map(|(x0, p0)| (cfg.beta, x0, p0))
        .collect();
    let results = run_points(cfg, &points, &dir);
    let mut header = vec!["x0"];
    if with_p0 {
        header.push("p0");
    }
    header.extend(["T1", "T2", "T3", "reason"]);
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = vec![r.x0.to_string()];
            if with_p0 {
                row.push(r.p0.to_string());
            }
            row.extend([fmt_opt(r.t1), fmt_opt(r.t2), fmt_opt(r.t3), r.reason.join("; ")]);
            row
        })
        .collect();
    io::write_table(&dir.join("sweep_x0.csv"), &header, &rows, Some(MANIFEST_FILE))?;
    manifest.add_output("sweep_x0.csv");
    sweep_finish(manifest, &dir, start, &results)
}

/// Wigner snapshots `wigner_<kick>.csv` of the `k1` evolution.
pub fn run_wigner_sequence(
    cfg: &ExperimentConfig,
    kicks: &[usize],
    view: &WignerView,
) -> CliResult<RunOutput> {
    if kicks.is_empty() {
        return Err(CliError::Config("no kicks requested".into()));
    }
    if let Some(k) = kicks.iter().find(|&&k| k > cfg.n_kicks) {
        return Err(CliError::Config(format!("kick {k} exceeds n_kicks = {}", cfg.n_kicks)));
    }
    let start = Instant::now();
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::new("wigner", cfg);
    let psi0 = cfg.initial_state()?;
    let mut recorder = SnapshotRecorder::new(kicks);
    let last = recorder.last_wanted().unwrap_or(0);
    let params = kickfid_core::SimParams {
        n_kicks: last,
        ..cfg.first()
    };
    let evolution = evolve(&psi0, &params, &mut [&mut recorder as &mut dyn Observer])?;
    manifest.leaks = LeakRecord::from_warnings("first", &evolution.leaks);
    let mut snapshots = recorder.finish();
    if kicks.contains(&0) {
        snapshots.insert(0, (0, psi0.clone()));
    }

    let w0 = match wigner(&psi0, cfg.tau) {
        Ok(w) => w,
        Err(e) => return finish(manifest, &dir, start, Some(e.into())),
    };
    let det0 = w0.covariance_determinant();
    manifest.set_value("det_0", det0);
    let mut worst_ratio: f64 = 0.0;
    let mut failure = None;
    for (kick, state) in &snapshots {
        match wigner(state, cfg.tau) {
            Ok(w) => {
                let name = format!("wigner_{kick}.csv");
                io::write_wigner(&dir.join(&name), &w, view, Some(MANIFEST_FILE))?;
                manifest.add_output(name);
                let det = w.covariance_determinant();
                manifest.set_value(format!("det_{kick}"), det);
                worst_ratio = worst_ratio.max(det / det0);
            }
            Err(e) => {
                failure.get_or_insert(CliError::from(e.clone()));
                manifest.record_error(&format!("kick {kick}"), e);
            }
        }
    }
    manifest.set_value("det_ratio_max", worst_ratio);
    finish(manifest, &dir, start, failure)
}

/// `G(n)` of the `k1` evolution next to the twin fidelity, with mid-band peaks of both.
pub fn run_g_correlation(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    if cfg.delta_n == 0 {
        return Err(CliError::Config("delta_n must be at least 1".into()));
    }
    let start = Instant::now();
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::new("gcorr", cfg);
    let run = twin_run(cfg, true)?;
    manifest.leaks = run.leaks.clone();
    let g = run.g.expect("G recorder requested");
    write_series(&dir, "gcorr.csv", &g, &mut manifest)?;
    write_series(&dir, "fidelity.csv", &run.fidelity, &mut manifest)?;
    write_series(&dir, "width.csv", &run.width, &mut manifest)?;

    let mut failure = None;
    let mut nu = [None, None];
    for (i, (prefix, series, spec_name)) in [
        ("G.", &g, "gcorr_spectrum.csv"),
        ("fidelity.", &run.fidelity, "spectrum.csv"),
    ]
    .into_iter()
    .enumerate()
    {
        match analyse_periods(series, cfg) {
            Ok(a) => {
                write_spectrum(&dir, spec_name, &a.spectrum, &mut manifest)?;
                record_periods(&mut manifest, prefix, &a);
                nu[i] = a.t2.peak().map(|p| p.nu);
            }
            Err(e) => {
                failure.get_or_insert(e.clone());
                manifest.record_error(prefix.trim_end_matches('.'), e);
            }
        }
    }
    match periodogram(&run.width, &cfg.spectral) {
        Ok(ws) => write_spectrum(&dir, "width_spectrum.csv", &ws, &mut manifest)?,
        Err(e) => manifest.record_error("width spectrum", e),
    }
    match width_frequency(&run.width, &cfg.spectral) {
        Ok(wf) => {
            manifest.set_value("omega_width", wf.omega_width);
            manifest.width.insert("width".into(), wf);
        }
        Err(e) => manifest.record_error("width frequency", e),
    }
    if let [Some(ng), Some(nf)] = nu {
        manifest.set_value("nu2_g", ng);
        manifest.set_value("nu2_fidelity", nf);
        manifest.set_value("nu2_rel_diff", (ng - nf).abs() / nf);
    }
    finish(manifest, &dir, start, failure)
}

/// Single `k1` evolution: `width.csv`, `psi_final.csv` and `psi_<kick>.csv` for `save_at`.
pub fn run_evolve(cfg: &ExperimentConfig, save_at: &[usize]) -> CliResult<RunOutput> {
    if let Some(k) = save_at.iter().find(|&&k| k > cfg.n_kicks) {
        return Err(CliError::Config(format!("kick {k} exceeds n_kicks = {}", cfg.n_kicks)));
    }
    let start = Instant::now();
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::new("evolve", cfg);
    let psi0 = cfg.initial_state()?;
    let mut width = WidthRecorder::new();
    let mut snaps = SnapshotRecorder::new(save_at);
    Observer::observe(&mut width, 0, &psi0);
    let evolution = evolve(
        &psi0,
        &cfg.first(),
        &mut [&mut width as &mut dyn Observer, &mut snaps],
    )?;
    manifest.leaks = LeakRecord::from_warnings("first", &evolution.leaks);
    write_series(&dir, "width.csv", &width.finish(), &mut manifest)?;
    let mut snapshots = snaps.finish();
    if save_at.contains(&0) {
        snapshots.insert(0, (0, psi0));
    }
    for (kick, psi) in &snapshots {
        let name = format!("psi_{kick}.csv");
        io::write_wavefunction(&dir.join(&name), psi, Some(MANIFEST_FILE))?;
        manifest.add_output(name);
    }
    io::write_wavefunction(&dir.join("psi_final.csv"), &evolution.state, Some(MANIFEST_FILE))?;
    manifest.add_output("psi_final.csv");
    manifest.set_value("norm_final", evolution.state.norm_sqr());
    manifest.set_value("mean_x_final", evolution.state.mean_x());
    manifest.set_value("mean_p_final", evolution.state.mean_p(cfg.tau));
    finish(manifest, &dir, start, None)
}

/// Classical orbits of the `k1` map: `orbits.csv`.
pub fn run_portrait(
    cfg: &ExperimentConfig,
    seeds: &[PhasePoint],
    iterations: usize,
) -> CliResult<RunOutput> {
    let start = Instant::now();
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::new("portrait", cfg);
    let orbits = phase_portrait(cfg.k1, seeds, iterations);
    io::write_orbits(&dir.join("orbits.csv"), &orbits, Some(MANIFEST_FILE))?;
    manifest.add_output("orbits.csv");
    manifest.set_value("iterations", iterations as f64);
    manifest.set_value("orbits", orbits.len() as f64);
    finish(manifest, &dir, start, None)
}

/// Parses `default` or a comma list of `name=lo:hi`.
pub fn parse_bands(text: &str, n_samples: usize) -> CliResult<Vec<Band>> {
    if text.trim() == "default" {
        let set = BandSet::default();
        return Ok(vec![set.high.clone(), set.mid.clone(), set.low_for(n_samples)]);
    }
    text.split(',')
        .map(|item| {
            let (name, range) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("band '{item}' is not name=lo:hi")))?;
            let (lo, hi) = range
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("band '{item}' is not name=lo:hi")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("bad band bound '{s}'")))
            };
            Ok(Band::new(name.trim(), parse(lo)?, parse(hi)?))
        })
        .collect()
}

/// Spectrum of an existing `kick,value` file.
pub fn run_spectrum(cfg: &ExperimentConfig, input: &Path, bands: &str) -> CliResult<RunOutput> {
    let start = Instant::now();
    let series = io::read_series(input, "input")?;
    let bands = parse_bands(bands, series.len())?;
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::new("spectrum", cfg);
    let spec = match periodogram(&series, &cfg.spectral) {
        Ok(s) => s,
        Err(e) => return finish(manifest, &dir, start, Some(e.into())),
    };
    write_spectrum(&dir, "spectrum.csv", &spec, &mut manifest)?;
    let mut failure = None;
    for band in &bands {
        let entry = BandEntry::from_result(BandOutcome::search(&spec, band));
        if let BandEntry::Error { message } = &entry {
            failure.get_or_insert(CliError::Numerical(format!("{}: {message}", band.label)));
        }
        manifest.peaks.insert(band.label.clone(), entry);
    }
    finish(manifest, &dir, start, failure)
}

/// Closed-form model on integer times: `kick,F_exact,F_expanded,G`.
pub fn run_analytic(
    cfg: &ExperimentConfig,
    params: &OscModelParams,
    form: MomentumForm,
    t_max: usize,
    delta_t: f64,
) -> CliResult<RunOutput> {
    params.validate()?;
    if delta_t.is_nan() || delta_t <= 0.0 {
        return Err(CliError::Config(format!("delta_t must be positive, got {delta_t}")));
    }
    let start = Instant::now();
    let dir = cfg.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::new("analytic", cfg);
    let rows: Vec<Vec<String>> = (0..=t_max)
        .map(|k| {
            let t = k as f64;
            vec![
                k.to_string(),
                fidelity_model(t, params, form).to_string(),
                fidelity_expanded(t, params, form).to_string(),
                wigner_correlation_analytic(t, delta_t, params).to_string(),
            ]
        })
        .collect();
    io::write_table(
        &dir.join("analytic.csv"),
        &["kick", "F_exact", "F_expanded", "G"],
        &rows,
        Some(MANIFEST_FILE),
    )?;
    manifest.add_output("analytic.csv");
    for (key, v) in [
        ("omega1", params.omega1),
        ("omega2", params.omega2),
        ("rho", params.rho),
        ("gamma_x", params.gamma_x),
        ("gamma_p", params.gamma_p),
        ("Omega", params.width_omega()),
        ("phi_x", params.phi_x),
        ("phi_p", params.phi_p),
        ("delta_t", delta_t),
    ] {
        manifest.set_value(key, v);
    }
    let failure = match predicted_frequencies(params) {
        Ok(pf) => {
            manifest.set_value("omega_s", pf.omega_s);
            manifest.set_value("delta_omega", pf.delta_omega);
            manifest.set_value("Delta_omega", pf.big_delta_omega);
            manifest.set_value("T1", pf.t1);
            manifest.set_value("T2", pf.t2);
            manifest.set_value("T3", pf.t3);
            None
        }
        Err(e) => Some(e.into()),
    };
    finish(manifest, &dir, start, failure)
}
