//! Uniform periodic spatial grid, wavefunction storage and coherent states.
//!
//! Wavefunctions use continuum normalization, `sum |psi_j|^2 dx = 1`, so the
//! density `|psi(x)|^2` entering the interaction phase does not depend on the
//! grid resolution. Momentum is `p = tau * k` with `k` the discrete Fourier
//! wavenumbers of the periodic domain.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of coherent-state standard deviations that must fit inside the grid.
pub const SUPPORT_SIGMAS: f64 = 6.0;

/// Default production grid: 2048 points on [-8, 8).
pub const DEFAULT_GRID_POINTS: usize = 2048;
pub const DEFAULT_GRID_XMAX: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    n_points: usize,
    x_min: f64,
    x_max: f64,
}

impl SpatialGrid {
    /// Symmetric grid on `[-x_max, x_max)` with `n_points` samples.
    pub fn new(n_points: usize, x_max: f64) -> Result<Self> {
        Self::with_bounds(n_points, -x_max, x_max)
    }

    pub fn with_bounds(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::Config(format!(
                "n_points must be a power of two >= 2, got {n_points}"
            )));
        }
        if !(x_max.is_finite() && x_min.is_finite()) || x_max <= x_min {
            return Err(Error::Config(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max})"
            )));
        }
        Ok(Self {
            n_points,
            x_min,
            x_max,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Discrete Fourier wavenumbers in FFT order (`0, 1, .., N/2-1, -N/2, .., -1` times `2 pi / L`).
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        let dk = 2.0 * PI / self.length();
        (0..n)
            .map(|m| if m < n / 2 { m } else { m - n } as f64 * dk)
            .collect()
    }

    /// Momentum samples `tau * k` in FFT order.
    pub fn momenta(&self, tau: f64) -> Vec<f64> {
        self.wavenumbers().into_iter().map(|k| tau * k).collect()
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length()
    }
}

/// `make_grid(n_points, x_max)`: symmetric grid on `[-x_max, x_max)`.
pub fn make_grid(n_points: usize, x_max: f64) -> Result<SpatialGrid> {
    if x_max <= 0.0 || !x_max.is_finite() {
        return Err(Error::Config(format!("x_max must be positive, got {x_max}")));
    }
    SpatialGrid::new(n_points, x_max)
}

/// Grid geometry as it appears in configuration and manifests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub x_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_GRID_POINTS,
            x_max: DEFAULT_GRID_XMAX,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<SpatialGrid> {
        make_grid(self.n_points, self.x_max)
    }
}

/// Parameters that fully determine a single kicked evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub k: f64,
    pub beta: f64,
    pub tau: f64,
    pub x0: f64,
    pub p0: f64,
    pub n_kicks: usize,
    pub grid: GridSpec,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if self.tau.is_nan() || self.tau <= 0.0 {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.k > 0.0 && self.k < 4.0) {
            return Err(Error::NonElliptic(self.k));
        }
        if self.n_kicks == 0 {
            return Err(Error::Config("n_kicks must be at least 1".into()));
        }
        if !self.beta.is_finite() {
            return Err(Error::Config(format!("beta must be finite, got {}", self.beta)));
        }
        self.grid.build().map(|_| ())
    }
}

/// Complex amplitudes on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: SpatialGrid,
    amps: Vec<Complex64>,
}

impl WaveFunction {
    pub fn from_amplitudes(grid: SpatialGrid, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != grid.n_points() {
            return Err(Error::Shape(format!(
                "{} amplitudes for a {}-point grid",
                amps.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, amps })
    }

    /// Samples `f(x)` on the grid.
    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let amps = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        Self { grid, amps }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Rescales to unit continuum norm.
    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Argument("cannot normalize a zero wavefunction".into()));
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Largest modulus among the first and last grid samples.
    pub fn boundary_amplitude(&self) -> f64 {
        let first = self.amps.first().map_or(0.0, |a| a.norm());
        let last = self.amps.last().map_or(0.0, |a| a.norm());
        first.max(last)
    }

    pub fn mean_x(&self) -> f64 {
        let dx = self.grid.dx();
        self.amps
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm_sqr() * self.grid.x(j))
            .sum::<f64>()
            * dx
    }

    /// Position variance `<(x - <x>)^2>`.
    pub fn variance_x(&self) -> f64 {
        let mean = self.mean_x();
        let dx = self.grid.dx();
        self.amps
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let d = self.grid.x(j) - mean;
                a.norm_sqr() * d * d
            })
            .sum::<f64>()
            * dx
    }

    /// Momentum-space probabilities in FFT order, summing to one.
    pub fn momentum_distribution(&self) -> Vec<f64> {
        let mut buf = self.amps.clone();
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
        let total: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
        buf.iter().map(|c| c.norm_sqr() / total).collect()
    }

    pub fn mean_p(&self, tau: f64) -> f64 {
        let probs = self.momentum_distribution();
        self.grid
            .momenta(tau)
            .iter()
            .zip(&probs)
            .map(|(p, w)| p * w)
            .sum()
    }

    pub fn variance_p(&self, tau: f64) -> f64 {
        let probs = self.momentum_distribution();
        let momenta = self.grid.momenta(tau);
        let mean: f64 = momenta.iter().zip(&probs).map(|(p, w)| p * w).sum();
        momenta
            .iter()
            .zip(&probs)
            .map(|(p, w)| (p - mean).powi(2) * w)
            .sum()
    }
}

/// Coherent state of the oscillator with frequency `omega` in units `hbar -> tau`, `m = 1`:
/// `(omega / (pi tau))^(1/4) exp(i p0 x / tau - omega (x - x0)^2 / (2 tau))`.
///
/// Position-independent phases are dropped. The sampled state is renormalized.
pub fn make_coherent_state(
    grid: &SpatialGrid,
    tau: f64,
    omega: f64,
    x0: f64,
    p0: f64,
) -> Result<WaveFunction> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::Config(format!("tau must be positive, got {tau}")));
    }
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Config(format!("omega must be positive, got {omega}")));
    }
    let sigma_x = (tau / (2.0 * omega)).sqrt();
    let reach = SUPPORT_SIGMAS * sigma_x;
    if x0 + reach > grid.x_max() || x0 - reach < grid.x_min() {
        return Err(Error::DomainTooSmall {
            support: x0.abs() + reach,
            x_max: grid.x_max(),
        });
    }
    let prefactor = (omega / (PI * tau)).powf(0.25);
    let mut psi = WaveFunction::from_fn(*grid, |x| {
        let envelope = prefactor * (-omega * (x - x0).powi(2) / (2.0 * tau)).exp();
        Complex64::from_polar(envelope, p0 * x / tau)
    });
    psi.normalize()?;
    Ok(psi)
}

/// `<a|b> = sum conj(a_j) b_j dx`.
pub fn inner_product(a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::Shape("inner product of states on different grids".into()));
    }
    let sum: Complex64 = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(sum * a.grid.dx())
}
