//! Fidelity, width, the discrete Wigner transform and lagged correlations.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inner_product, SpatialGrid, WaveFunction};
use crate::propagator::{Observer, TwinObserver, LEAK_THRESHOLD};

/// Slack allowed above one before a fidelity is clamped.
pub const FIDELITY_SLACK: f64 = 1e-9;

/// `|<a|b>|^2`, clamped to `[0, 1]`.
pub fn fidelity(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    let f = inner_product(a, b)?.norm_sqr();
    Ok(f.min(1.0))
}

/// Position variance `<(x - <x>)^2>`.
pub fn width(psi: &WaveFunction) -> f64 {
    psi.variance_x().max(0.0)
}

/// Per-kick observable series. `values[i]` belongs to kick `start_kick + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub label: String,
    pub start_kick: usize,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, start_kick: usize) -> Self {
        Self {
            label: label.into(),
            start_kick,
            values: Vec::new(),
        }
    }

    pub fn from_values(label: impl Into<String>, start_kick: usize, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            start_kick,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kicks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).map(move |i| self.start_kick + i)
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.kicks().zip(self.values.iter().copied())
    }

    pub fn value_at(&self, kick: usize) -> Option<f64> {
        kick.checked_sub(self.start_kick)
            .and_then(|i| self.values.get(i).copied())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Sub-series covering kicks `from..to`.
    pub fn window(&self, from: usize, to: usize) -> TimeSeries {
        let lo = from.saturating_sub(self.start_kick).min(self.len());
        let hi = to.saturating_sub(self.start_kick).clamp(lo, self.len());
        TimeSeries::from_values(
            self.label.clone(),
            self.start_kick + lo,
            self.values[lo..hi].to_vec(),
        )
    }
}

/// Wigner function sampled on the spatial grid times `n_points` momenta on
/// `[-pi tau / dx, pi tau / dx)` with spacing `tau dk`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    grid: SpatialGrid,
    tau: f64,
    /// Row-major, `values[j * n + l]` is `W(x_j, p_l)`.
    values: Vec<f64>,
    max_imag: f64,
}

impl WignerGrid {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n(&self) -> usize {
        self.grid.n_points()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.grid.positions()
    }

    pub fn dp(&self) -> f64 {
        self.tau * self.grid.dk()
    }

    pub fn p(&self, l: usize) -> f64 {
        let n = self.n() as f64;
        (l as f64 - n / 2.0) * self.dp()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.n()).map(|l| self.p(l)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, j: usize, l: usize) -> f64 {
        self.values[j * self.n() + l]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.values[j * n..(j + 1) * n]
    }

    /// Largest imaginary residue left by the transform.
    pub fn max_imag(&self) -> f64 {
        self.max_imag
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sum W dx dp`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx() * self.dp()
    }

    /// `sum_p W(x_j, p) dp` for every row.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = self.dp();
        (0..self.n())
            .map(|j| self.row(j).iter().sum::<f64>() * dp)
            .collect()
    }

    /// `sum_x W(x, p_l) dx` for every column.
    pub fn p_marginal(&self) -> Vec<f64> {
        let n = self.n();
        let dx = self.grid.dx();
        let mut out = vec![0.0; n];
        for j in 0..n {
            for (o, w) in out.iter_mut().zip(self.row(j)) {
                *o += w;
            }
        }
        out.iter_mut().for_each(|v| *v *= dx);
        out
    }

    /// Phase-space covariance `[[var x, cov xp], [cov xp, var p]]` under `W`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let xs = self.xs();
        let ps = self.ps();
        let (mut s, mut sx, mut sp, mut sxx, mut spp, mut sxp) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for (j, &x) in xs.iter().enumerate() {
            for (&w, &p) in self.row(j).iter().zip(&ps) {
                s += w;
                sx += w * x;
                sp += w * p;
                sxx += w * x * x;
                spp += w * p * p;
                sxp += w * x * p;
            }
        }
        let (mx, mp) = (sx / s, sp / s);
        let vxx = sxx / s - mx * mx;
        let vpp = spp / s - mp * mp;
        let vxp = sxp / s - mx * mp;
        [[vxx, vxp], [vxp, vpp]]
    }

    /// Determinant of [`WignerGrid::covariance`], the localization measure.
    pub fn covariance_determinant(&self) -> f64 {
        let [[a, b], [c, d]] = self.covariance();
        a * d - b * c
    }
}

/// Samples `psi` on the half-step lattice `x_min + m dx / 2` by Fourier
/// interpolation (zero padding in momentum space).
fn half_step_samples(psi: &WaveFunction, planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let n = psi.grid().n_points();
    let mut spectrum = psi.amps().to_vec();
    planner.plan_fft_forward(n).process(&mut spectrum);
    let mut padded = vec![Complex64::new(0.0, 0.0); 2 * n];
    let half = n / 2;
    padded[..half].copy_from_slice(&spectrum[..half]);
    padded[2 * n - half + 1..].copy_from_slice(&spectrum[half + 1..]);
    // Split the Nyquist bin so real inputs stay real.
    padded[half] = spectrum[half] * 0.5;
    padded[2 * n - half] = spectrum[half] * 0.5;
    planner.plan_fft_inverse(2 * n).process(&mut padded);
    let scale = 1.0 / n as f64;
    padded.iter_mut().for_each(|c| *c *= scale);
    padded
}

/// `W(x, p) = (1 / (pi tau)) int dxi psi*(x + xi) psi(x - xi) exp(2 i p xi / tau)`.
///
/// For each row the correlation is taken on the half-step lattice
/// `xi = m dx / 2`, `m in [-N, N)`, and transformed with a length-`2N` FFT.
/// Samples beyond the grid count as zero.
pub fn wigner(psi: &WaveFunction, tau: f64) -> Result<WignerGrid> {
    let amplitude = psi.boundary_amplitude();
    if amplitude > LEAK_THRESHOLD {
        return Err(Error::Leak { amplitude });
    }
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::Config(format!("tau must be positive, got {tau}")));
    }
    let grid = *psi.grid();
    let n = grid.n_points();
    let m = 2 * n;
    let mut planner = FftPlanner::new();
    let fine = half_step_samples(psi, &mut planner);
    let fft = planner.plan_fft_inverse(m);
    let scale = grid.dx() / (2.0 * PI * tau);

    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
            |scratch, j| {
                let centre = 2 * j;
                let mut buf = vec![Complex64::new(0.0, 0.0); m];
                // m ranges over [-N, N); the index is taken mod 2N.
                let reach = centre.min(m - 1 - centre);
                buf[0] = fine[centre].norm_sqr().into();
                for s in 1..=reach.min(n - 1) {
                    let v = fine[centre + s].conj() * fine[centre - s];
                    buf[s] = v;
                    buf[m - s] = v.conj();
                }
                fft.process_with_scratch(&mut buf, scratch);
                let mut row = vec![0.0; n];
                let mut imag = 0.0_f64;
                for (l, w) in row.iter_mut().enumerate() {
                    // Even frequency indices 2 (l - N/2), wrapped into [0, 2N).
                    let q = (2 * l + m - n) % m;
                    let c = buf[q];
                    *w = c.re * scale;
                    imag = imag.max((c.im * scale).abs());
                }
                (row, imag)
            },
        )
        .collect();

    let mut values = Vec::with_capacity(n * n);
    let mut max_imag = 0.0_f64;
    for (row, imag) in rows {
        values.extend(row);
        max_imag = max_imag.max(imag);
    }
    Ok(WignerGrid {
        grid,
        tau,
        values,
        max_imag,
    })
}

/// `2 pi tau sum W1 W2 dx dp`, which equals the fidelity of the two states.
pub fn wigner_overlap(a: &WignerGrid, b: &WignerGrid) -> Result<f64> {
    if a.grid != b.grid || a.tau != b.tau {
        return Err(Error::Shape("Wigner grids differ".into()));
    }
    let sum: f64 = a
        .values
        .par_chunks(a.n())
        .zip(b.values.par_chunks(b.n()))
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * y).sum::<f64>())
        .sum();
    Ok(2.0 * PI * a.tau * sum * a.grid.dx() * a.dp())
}

/// How lagged overlaps are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapPath {
    /// `|<psi_n | psi_{n - dn}>|^2`.
    #[default]
    InnerProduct,
    /// `2 pi tau sum W_n W_{n - dn} dx dp`.
    Wigner,
}

fn lagged_overlap(
    current: &WaveFunction,
    lagged: &WaveFunction,
    path: OverlapPath,
    tau: f64,
) -> Result<f64> {
    match path {
        OverlapPath::InnerProduct => fidelity(current, lagged),
        OverlapPath::Wigner => wigner_overlap(&wigner(current, tau)?, &wigner(lagged, tau)?),
    }
}

/// `G(n)` over a stored stream whose first element is kick 0.
pub fn g_correlation(
    states: &[WaveFunction],
    delta_n: usize,
    tau: f64,
    path: OverlapPath,
) -> Result<TimeSeries> {
    if delta_n == 0 {
        return Err(Error::Argument("delta_n must be at least 1".into()));
    }
    if states.len() <= delta_n {
        return Err(Error::Argument(format!(
            "stream of {} states is too short for delta_n = {delta_n}",
            states.len()
        )));
    }
    let values = (delta_n..states.len())
        .into_par_iter()
        .map(|n| lagged_overlap(&states[n], &states[n - delta_n], path, tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries::from_values("g_correlation", delta_n, values))
}

/// Streaming `G(n)` holding the last `delta_n + 1` states.
#[derive(Debug)]
pub struct GCorrelationRecorder {
    delta_n: usize,
    tau: f64,
    path: OverlapPath,
    buffer: VecDeque<WaveFunction>,
    series: Option<TimeSeries>,
    error: Option<Error>,
}

impl GCorrelationRecorder {
    pub fn new(delta_n: usize, tau: f64, path: OverlapPath) -> Result<Self> {
        if delta_n == 0 {
            return Err(Error::Argument("delta_n must be at least 1".into()));
        }
        Ok(Self {
            delta_n,
            tau,
            path,
            buffer: VecDeque::with_capacity(delta_n + 1),
            series: None,
            error: None,
        })
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    pub fn finish(self) -> Result<TimeSeries> {
        if let Some(err) = self.error {
            return Err(err);
        }
        self.series.ok_or_else(|| {
            Error::Argument(format!(
                "stream too short for delta_n = {}",
                self.delta_n
            ))
        })
    }
}

impl Observer for GCorrelationRecorder {
    fn observe(&mut self, kick: usize, state: &WaveFunction) {
        if self.error.is_some() {
            return;
        }
        self.buffer.push_back(state.clone());
        if self.buffer.len() > self.delta_n + 1 {
            self.buffer.pop_front();
        }
        if self.buffer.len() == self.delta_n + 1 {
            let lagged = &self.buffer[0];
            match lagged_overlap(state, lagged, self.path, self.tau) {
                Ok(v) => self
                    .series
                    .get_or_insert_with(|| TimeSeries::new("g_correlation", kick))
                    .values
                    .push(v),
                Err(e) => self.error = Some(e),
            }
        }
    }
}

impl TwinObserver for GCorrelationRecorder {
    fn observe(&mut self, kick: usize, first: &WaveFunction, _second: &WaveFunction) {
        Observer::observe(self, kick, first);
    }
}

/// Records `fidelity(first, second)` at every kick.
#[derive(Debug, Default)]
pub struct FidelityRecorder {
    series: Option<TimeSeries>,
    error: Option<Error>,
}

impl FidelityRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn finish(self) -> Result<TimeSeries> {
        if let Some(err) = self.error {
            return Err(err);
        }
        Ok(self.series.unwrap_or_else(|| TimeSeries::new("fidelity", 0)))
    }
}

impl TwinObserver for FidelityRecorder {
    fn observe(&mut self, kick: usize, first: &WaveFunction, second: &WaveFunction) {
        match fidelity(first, second) {
            Ok(f) => self
                .series
                .get_or_insert_with(|| TimeSeries::new("fidelity", kick))
                .values
                .push(f),
            Err(e) => {
                self.error.get_or_insert(e);
            }
        }
    }
}

/// Records the width of one state (or of the first twin) at every kick.
#[derive(Debug, Default)]
pub struct WidthRecorder {
    series: Option<TimeSeries>,
}

impl WidthRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn finish(self) -> TimeSeries {
        self.series.unwrap_or_else(|| TimeSeries::new("width", 0))
    }
}

impl Observer for WidthRecorder {
    fn observe(&mut self, kick: usize, state: &WaveFunction) {
        self.series
            .get_or_insert_with(|| TimeSeries::new("width", kick))
            .values
            .push(width(state));
    }
}

impl TwinObserver for WidthRecorder {
    fn observe(&mut self, kick: usize, first: &WaveFunction, _second: &WaveFunction) {
        Observer::observe(self, kick, first);
    }
}

/// Keeps copies of the state at selected kicks.
#[derive(Debug, Default)]
pub struct SnapshotRecorder {
    wanted: Vec<usize>,
    snapshots: Vec<(usize, WaveFunction)>,
}

impl SnapshotRecorder {
    pub fn new(kicks: &[usize]) -> Self {
        let mut wanted = kicks.to_vec();
        wanted.sort_unstable();
        wanted.dedup();
        Self {
            wanted,
            snapshots: Vec::new(),
        }
    }

    pub fn last_wanted(&self) -> Option<usize> {
        self.wanted.last().copied()
    }

    pub fn finish(self) -> Vec<(usize, WaveFunction)> {
        self.snapshots
    }
}

impl Observer for SnapshotRecorder {
    fn observe(&mut self, kick: usize, state: &WaveFunction) {
        if self.wanted.binary_search(&kick).is_ok() {
            self.snapshots.push((kick, state.clone()));
        }
    }
}

/// Twin counterpart of [`SnapshotRecorder`], keeping both states.
#[derive(Debug, Default)]
pub struct TwinSnapshotRecorder {
    wanted: Vec<usize>,
    snapshots: Vec<(usize, WaveFunction, WaveFunction)>,
}

impl TwinSnapshotRecorder {
    pub fn new(kicks: &[usize]) -> Self {
        let mut wanted = kicks.to_vec();
        wanted.sort_unstable();
        wanted.dedup();
        Self {
            wanted,
            snapshots: Vec::new(),
        }
    }

    pub fn finish(self) -> Vec<(usize, WaveFunction, WaveFunction)> {
        self.snapshots
    }
}

impl TwinObserver for TwinSnapshotRecorder {
    fn observe(&mut self, kick: usize, first: &WaveFunction, second: &WaveFunction) {
        if self.wanted.binary_search(&kick).is_ok() {
            self.snapshots.push((kick, first.clone(), second.clone()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_coherent_state, make_grid};

    const TAU: f64 = 0.01;
    const OMEGA: f64 = PI / 3.0;

    fn small_grid() -> SpatialGrid {
        make_grid(512, 2.0).unwrap()
    }

    fn coherent(x0: f64, p0: f64) -> WaveFunction {
        make_coherent_state(&small_grid(), TAU, OMEGA, x0, p0).unwrap()
    }

    #[test]
    fn self_fidelity_and_global_phase() {
        let psi = coherent(0.18, 0.05);
        assert!((fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
        let mut rotated = psi.clone();
        rotated
            .amps_mut()
            .iter_mut()
            .for_each(|a| *a *= Complex64::cis(1.234));
        assert!((fidelity(&psi, &rotated).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn displaced_fidelity_matches_closed_form() {
        let a = coherent(0.0, 0.0);
        let b = coherent(0.1, 0.0);
        let expected = (-OMEGA * 0.01 / (2.0 * TAU)).exp();
        assert!((expected - 0.592385).abs() < 1e-6);
        let f = fidelity(&a, &b).unwrap();
        assert!((f - expected).abs() < 1e-10);
        assert_eq!(f, fidelity(&b, &a).unwrap());
    }

    #[test]
    fn fidelity_grid_mismatch() {
        let other = make_coherent_state(&make_grid(256, 2.0).unwrap(), TAU, OMEGA, 0.0, 0.0)
            .unwrap();
        assert!(matches!(
            fidelity(&coherent(0.0, 0.0), &other),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn width_of_coherent_state() {
        let w0 = width(&coherent(0.0, 0.0));
        assert!((w0 - TAU / (2.0 * OMEGA)).abs() < 1e-10);
        assert!((width(&coherent(0.18, 0.0)) - w0).abs() < 1e-10);
    }

    #[test]
    fn width_of_two_separated_packets() {
        let g = small_grid();
        let a = 0.8;
        let sigma2 = TAU / (2.0 * OMEGA);
        let left = make_coherent_state(&g, TAU, OMEGA, -a, 0.0).unwrap();
        let right = make_coherent_state(&g, TAU, OMEGA, a, 0.0).unwrap();
        let amps = left.amps().iter().zip(right.amps()).map(|(l, r)| l + r).collect();
        let mut cat = WaveFunction::from_amplitudes(g, amps).unwrap();
        cat.normalize().unwrap();
        assert!((width(&cat) - (a * a + sigma2)).abs() < 1e-4);
    }

    fn closed_form(x: f64, p: f64, x0: f64, p0: f64) -> f64 {
        (-(OMEGA / TAU) * (x - x0).powi(2) - (p - p0).powi(2) / (OMEGA * TAU)).exp() / (PI * TAU)
    }

    #[test]
    fn coherent_wigner_matches_gaussian() {
        for (x0, p0) in [(0.0, 0.0), (0.18, 0.0), (-0.3, 0.14)] {
            let psi = coherent(x0, p0);
            let w = wigner(&psi, TAU).unwrap();
            let xs = w.xs();
            let ps = w.ps();
            let mut err = 0.0_f64;
            for (j, &x) in xs.iter().enumerate() {
                for (l, &p) in ps.iter().enumerate() {
                    err = err.max((w.at(j, l) - closed_form(x, p, x0, p0)).abs());
                }
            }
            assert!(err < 1e-6, "({x0}, {p0}): sup error {err}");
            assert!(w.max_imag() < 1e-10);
            assert!((w.total() - 1.0).abs() < 1e-6);
        }
        let w = wigner(&coherent(0.0, 0.0), TAU).unwrap();
        assert!((w.max_value() - 1.0 / (PI * TAU)).abs() < 1e-6);
    }

    #[test]
    fn wigner_marginals() {
        let g = small_grid();
        // A non-Gaussian state: two packets with different momenta.
        let a = make_coherent_state(&g, TAU, OMEGA, -0.2, 0.1).unwrap();
        let b = make_coherent_state(&g, TAU, 2.0, 0.25, -0.05).unwrap();
        let amps = a.amps().iter().zip(b.amps()).map(|(x, y)| x + y * 0.7).collect();
        let mut psi = WaveFunction::from_amplitudes(g, amps).unwrap();
        psi.normalize().unwrap();
        let w = wigner(&psi, TAU).unwrap();
        for (m, d) in w.x_marginal().iter().zip(psi.density()) {
            assert!((m - d).abs() < 1e-6);
        }
        // Momentum marginal against the FFT of psi, reordered to ascending p.
        let probs = psi.momentum_distribution();
        let n = g.n_points();
        let dp = w.dp();
        for (l, m) in w.p_marginal().iter().enumerate() {
            let q = (l + n / 2) % n;
            assert!((m - probs[q] / dp).abs() < 1e-6, "l = {l}");
        }
    }

    #[test]
    fn wigner_parity() {
        let g = small_grid();
        let a = make_coherent_state(&g, TAU, OMEGA, -0.3, 0.0).unwrap();
        let b = make_coherent_state(&g, TAU, OMEGA, 0.3, 0.0).unwrap();
        let amps = a.amps().iter().zip(b.amps()).map(|(x, y)| x + y).collect();
        let mut psi = WaveFunction::from_amplitudes(g, amps).unwrap();
        psi.normalize().unwrap();
        let w = wigner(&psi, TAU).unwrap();
        let n = g.n_points();
        // x_j -> -x_j is j -> n - j; p_l -> -p_l is l -> n - l.
        let mut err = 0.0_f64;
        for j in 1..n {
            for l in 1..n {
                err = err.max((w.at(j, l) - w.at(n - j, n - l)).abs());
            }
        }
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn wigner_rejects_leaking_state() {
        let g = make_grid(128, 1.0).unwrap();
        let flat = WaveFunction::from_fn(g, |_| Complex64::new(1.0, 0.0) / 2f64.sqrt());
        assert!(matches!(wigner(&flat, TAU), Err(Error::Leak { .. })));
    }

    #[test]
    fn purity_and_overlap_paths_agree() {
        let a = coherent(0.0, 0.0);
        let b = coherent(0.1, 0.0);
        let wa = wigner(&a, TAU).unwrap();
        let wb = wigner(&b, TAU).unwrap();
        assert!((wigner_overlap(&wa, &wa).unwrap() - 1.0).abs() < 1e-6);
        let direct = fidelity(&a, &b).unwrap();
        assert!((wigner_overlap(&wa, &wb).unwrap() - direct).abs() < 1e-6);
    }

    #[test]
    fn covariance_of_coherent_state() {
        let w = wigner(&coherent(0.1, -0.05), TAU).unwrap();
        let [[vx, vxp], [_, vp]] = w.covariance();
        assert!((vx - TAU / (2.0 * OMEGA)).abs() < 1e-8);
        assert!((vp - OMEGA * TAU / 2.0).abs() < 1e-8);
        assert!(vxp.abs() < 1e-10);
        assert!((w.covariance_determinant() - TAU * TAU / 4.0).abs() < 1e-9);
    }

    #[test]
    fn g_of_repeated_state_is_one() {
        let psi = coherent(0.18, 0.0);
        let stream = vec![psi; 6];
        for path in [OverlapPath::InnerProduct, OverlapPath::Wigner] {
            let g = g_correlation(&stream, 2, TAU, path).unwrap();
            assert_eq!(g.start_kick, 2);
            assert_eq!(g.len(), 4);
            assert!(g.values.iter().all(|v| (v - 1.0).abs() < 1e-6));
        }
    }

    #[test]
    fn g_argument_errors() {
        let stream = vec![coherent(0.0, 0.0); 3];
        assert!(matches!(
            g_correlation(&stream, 0, TAU, OverlapPath::InnerProduct),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            g_correlation(&stream, 3, TAU, OverlapPath::InnerProduct),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn streaming_g_matches_batch() {
        let stream: Vec<_> = (0..8).map(|i| coherent(0.02 * i as f64, 0.0)).collect();
        let batch = g_correlation(&stream, 3, TAU, OverlapPath::InnerProduct).unwrap();
        let mut rec = GCorrelationRecorder::new(3, TAU, OverlapPath::InnerProduct).unwrap();
        for (k, s) in stream.iter().enumerate() {
            Observer::observe(&mut rec, k, s);
            assert!(rec.buffered() <= 4);
        }
        assert_eq!(rec.finish().unwrap(), batch);
    }

    #[test]
    fn time_series_indexing() {
        let ts = TimeSeries::from_values("fidelity", 3, vec![1.0, 0.9, 0.8, 0.7]);
        assert_eq!(ts.value_at(4), Some(0.9));
        assert_eq!(ts.value_at(2), None);
        assert_eq!(ts.kicks().collect::<Vec<_>>(), vec![3, 4, 5, 6]);
        let w = ts.window(4, 6);
        assert_eq!(w.start_kick, 4);
        assert_eq!(w.values, vec![0.9, 0.8]);
        assert!(ts.is_finite());
    }
}
