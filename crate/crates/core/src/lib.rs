//! Kicked wavepacket dynamics with kick-applied mean-field interactions:
//! split-step propagation, fidelity and Wigner observables, spectral period
//! extraction and a harmonic-oscillator model of the fidelity.

pub mod analytic;
pub mod classical;
pub mod error;
pub mod grid;
pub mod io;
pub mod observables;
pub mod propagator;
pub mod spectral;

pub use rustfft::num_complex::Complex64;

pub use analytic::{A7Reading, MomentumForm, OscModelParams, PredictedFrequencies};
pub use classical::{Orbit, PhasePoint};
pub use error::{Error, Result};
pub use grid::{GridSpec, SimParams, SpatialGrid, WaveFunction};
pub use observables::{OverlapPath, TimeSeries, WignerGrid};
pub use propagator::{LeakWarning, Observer, Propagator, TwinObserver};
pub use spectral::{Band, BandOutcome, BandSet, PeakReport, PeriodReport, SpectralOptions, Spectrum, Window};
