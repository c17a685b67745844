//! One-period evolution with the interaction applied at the kicks:
//! `U = exp(-i p^2 / (2 tau)) exp((i / tau) (K exp(-x^2/2) + beta |psi(x)|^2))`.
//!
//! The kick acts first (rightmost factor), then the free flight, which is
//! diagonal in momentum space and applied through the FFT. Boundaries are
//! periodic; a leak monitor flags amplitude reaching the grid edge.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{SimParams, SpatialGrid, WaveFunction};

/// Boundary amplitude above which a step reports a leak.
pub const LEAK_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakWarning {
    pub kick: usize,
    pub amplitude: f64,
}

/// Grid-aligned kick envelope, cached `beta = 0` kick phases and free-flight phases.
#[derive(Debug, Clone)]
pub struct KickPotentialCache {
    tau: f64,
    envelope: Vec<f64>,
    kick_strength: f64,
    kick_phases: Vec<Complex64>,
    free_flight: Vec<Complex64>,
}

impl KickPotentialCache {
    pub fn new(grid: &SpatialGrid, tau: f64, kick_strength: f64) -> Self {
        let envelope: Vec<f64> = grid
            .positions()
            .into_iter()
            .map(|x| (-0.5 * x * x).exp())
            .collect();
        let kick_phases = envelope
            .iter()
            .map(|v| Complex64::cis(kick_strength * v / tau))
            .collect();
        let free_flight = grid
            .wavenumbers()
            .into_iter()
            .map(|k| Complex64::cis(-0.5 * tau * k * k))
            .collect();
        Self {
            tau,
            envelope,
            kick_strength,
            kick_phases,
            free_flight,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn envelope(&self) -> &[f64] {
        &self.envelope
    }

    pub fn kick_phases(&self) -> &[Complex64] {
        &self.kick_phases
    }

    pub fn free_flight(&self) -> &[Complex64] {
        &self.free_flight
    }
}

/// Reusable propagator for one grid, `tau` and kick strength.
pub struct Propagator {
    grid: SpatialGrid,
    cache: KickPotentialCache,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Propagator {
    pub fn new(grid: &SpatialGrid, tau: f64, kick_strength: f64) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n_points();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid: *grid,
            cache: KickPotentialCache::new(grid, tau, kick_strength),
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn for_params(params: &SimParams) -> Result<Self> {
        let grid = params.grid.build()?;
        Ok(Self::new(&grid, params.tau, params.k))
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn cache(&self) -> &KickPotentialCache {
        &self.cache
    }

    fn check_grid(&self, psi: &WaveFunction) -> Result<()> {
        if *psi.grid() != self.grid {
            return Err(Error::Shape(
                "wavefunction grid differs from the propagator grid".into(),
            ));
        }
        Ok(())
    }

    /// Multiplies by `exp((i/tau)(K exp(-x^2/2) + beta |psi|^2))` using the pre-kick density.
    pub fn kick(&self, psi: &mut WaveFunction, kick_strength: f64, beta: f64) -> Result<()> {
        self.check_grid(psi)?;
        let tau = self.cache.tau;
        if beta == 0.0 && kick_strength == self.cache.kick_strength {
            for (a, phase) in psi.amps_mut().iter_mut().zip(&self.cache.kick_phases) {
                *a *= phase;
            }
        } else {
            for (a, v) in psi.amps_mut().iter_mut().zip(&self.cache.envelope) {
                let phase = (kick_strength * v + beta * a.norm_sqr()) / tau;
                *a *= Complex64::cis(phase);
            }
        }
        Ok(())
    }

    /// Applies `exp(-i tau k^2 / 2)` in momentum space.
    pub fn free_flight(&mut self, psi: &mut WaveFunction) -> Result<()> {
        self.check_grid(psi)?;
        let inv_n = 1.0 / self.grid.n_points() as f64;
        let amps = psi.amps_mut();
        self.forward.process_with_scratch(amps, &mut self.scratch);
        for (a, phase) in amps.iter_mut().zip(&self.cache.free_flight) {
            *a *= phase * inv_n;
        }
        self.inverse.process_with_scratch(amps, &mut self.scratch);
        Ok(())
    }

    /// One full period: kick, then free flight. Returns a leak warning when the
    /// post-step boundary amplitude exceeds [`LEAK_THRESHOLD`].
    pub fn step(
        &mut self,
        psi: &mut WaveFunction,
        kick_strength: f64,
        beta: f64,
        kick_index: usize,
    ) -> Result<Option<LeakWarning>> {
        self.kick(psi, kick_strength, beta)?;
        self.free_flight(psi)?;
        let amplitude = psi.boundary_amplitude();
        Ok((amplitude > LEAK_THRESHOLD).then_some(LeakWarning {
            kick: kick_index,
            amplitude,
        }))
    }
}

/// Receives the state after every kick of an evolution.
pub trait Observer {
    fn observe(&mut self, kick: usize, state: &WaveFunction);
}

impl<F: FnMut(usize, &WaveFunction)> Observer for F {
    fn observe(&mut self, kick: usize, state: &WaveFunction) {
        self(kick, state)
    }
}

/// Receives both states of a twin evolution after every kick.
pub trait TwinObserver {
    fn observe(&mut self, kick: usize, first: &WaveFunction, second: &WaveFunction);
}

impl<F: FnMut(usize, &WaveFunction, &WaveFunction)> TwinObserver for F {
    fn observe(&mut self, kick: usize, first: &WaveFunction, second: &WaveFunction) {
        self(kick, first, second)
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: WaveFunction,
    pub leaks: Vec<LeakWarning>,
}

#[derive(Debug, Clone)]
pub struct TwinEvolution {
    pub first: WaveFunction,
    pub second: WaveFunction,
    pub leaks_first: Vec<LeakWarning>,
    pub leaks_second: Vec<LeakWarning>,
}

/// `apply_kick(psi, K, beta, tau)`.
pub fn apply_kick(psi: &WaveFunction, kick_strength: f64, beta: f64, tau: f64) -> WaveFunction {
    let propagator = Propagator::new(psi.grid(), tau, kick_strength);
    let mut out = psi.clone();
    propagator
        .kick(&mut out, kick_strength, beta)
        .expect("propagator built on the state's own grid");
    out
}

/// `apply_free_flight(psi, tau)`.
pub fn apply_free_flight(psi: &WaveFunction, tau: f64) -> WaveFunction {
    let mut propagator = Propagator::new(psi.grid(), tau, 0.0);
    let mut out = psi.clone();
    propagator
        .free_flight(&mut out)
        .expect("propagator built on the state's own grid");
    out
}

/// One kick period with `params`; the returned warning carries kick index 1.
pub fn step(psi: &WaveFunction, params: &SimParams) -> Result<(WaveFunction, Option<LeakWarning>)> {
    let mut propagator = Propagator::for_params(params)?;
    let mut out = psi.clone();
    let leak = propagator.step(&mut out, params.k, params.beta, 1)?;
    Ok((out, leak))
}

/// Applies `params.n_kicks` periods, handing the state to every observer after each kick.
pub fn evolve(
    psi0: &WaveFunction,
    params: &SimParams,
    observers: &mut [&mut dyn Observer],
) -> Result<Evolution> {
    let mut propagator = Propagator::for_params(params)?;
    propagator.check_grid(psi0)?;
    let mut state = psi0.clone();
    let mut leaks = Vec::new();
    for kick in 1..=params.n_kicks {
        if let Some(leak) = propagator.step(&mut state, params.k, params.beta, kick)? {
            leaks.push(leak);
        }
        for observer in observers.iter_mut() {
            observer.observe(kick, &state);
        }
    }
    Ok(Evolution { state, leaks })
}

/// Evolves one initial state under two parameter sets in lockstep.
///
/// The twins must share grid and kick count. Each kick, the two steps run
/// concurrently, then the observers see both states.
pub fn evolve_twins(
    psi0: &WaveFunction,
    first: &SimParams,
    second: &SimParams,
    observers: &mut [&mut dyn TwinObserver],
) -> Result<TwinEvolution> {
    if first.grid != second.grid || first.n_kicks != second.n_kicks {
        return Err(Error::Config(
            "twin evolutions must share grid and kick count".into(),
        ));
    }
    let mut prop_a = Propagator::for_params(first)?;
    let mut prop_b = Propagator::for_params(second)?;
    prop_a.check_grid(psi0)?;
    let mut a = psi0.clone();
    let mut b = psi0.clone();
    let mut leaks_first = Vec::new();
    let mut leaks_second = Vec::new();
    for kick in 1..=first.n_kicks {
        let (ra, rb) = rayon::join(
            || prop_a.step(&mut a, first.k, first.beta, kick),
            || prop_b.step(&mut b, second.k, second.beta, kick),
        );
        leaks_first.extend(ra?);
        leaks_second.extend(rb?);
        for observer in observers.iter_mut() {
            observer.observe(kick, &a, &b);
        }
    }
    Ok(TwinEvolution {
        first: a,
        second: b,
        leaks_first,
        leaks_second,
    })
}
