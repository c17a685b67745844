//! Shared fixtures for the benchmarks.

use kickfid_core::classical::rotation_frequency;
use kickfid_core::grid::{make_coherent_state, GridSpec, SimParams, WaveFunction};

pub const TAU: f64 = 0.01;

pub fn params(n_kicks: usize, beta: f64) -> SimParams {
    SimParams {
        k: 1.0,
        beta,
        tau: TAU,
        x0: 0.18,
        p0: 0.0,
        n_kicks,
        grid: GridSpec::default(),
    }
}

pub fn initial_state(params: &SimParams) -> WaveFunction {
    let grid = params.grid.build().expect("default grid");
    let omega = rotation_frequency(params.k).expect("elliptic K");
    make_coherent_state(&grid, params.tau, omega, params.x0, params.p0).expect("packet fits")
}
