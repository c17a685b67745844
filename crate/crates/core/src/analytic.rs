//! Harmonic-oscillator model of the fidelity and of lagged Wigner correlations.
//!
//! Two oscillators with frequencies `omega1`, `omega2` carry Gaussian Wigner
//! functions along `x_i = rho cos(omega_i t)`, `p_i = -m omega_i rho sin(omega_i t)`.
//! Interactions enter only through breathing widths
//! `sigma_x^2 + gamma_x cos(Omega_i t + phi_x)` and the momentum counterpart.
//! Overlaps carry the `2 pi tau` normalization, so identical pure states give one.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `|gamma| / (2 sigma^2)` accepted by [`OscModelParams::validate`].
pub const MAX_WIDTH_MODULATION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscModelParams {
    pub m: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub rho: f64,
    pub sigma_x2: f64,
    pub sigma_p2: f64,
    pub gamma_x: f64,
    pub gamma_p: f64,
    /// Width-oscillation frequencies of the two states.
    pub width_omega1: f64,
    pub width_omega2: f64,
    pub phi_x: f64,
    pub phi_p: f64,
    pub hbar_eff: f64,
}

impl OscModelParams {
    /// Unit mass, coherent widths of the mean frequency, no breathing and `Omega = 2 omega`.
    pub fn coherent(omega1: f64, omega2: f64, rho: f64, tau: f64) -> Self {
        let omega = 0.5 * (omega1 + omega2);
        Self {
            m: 1.0,
            omega1,
            omega2,
            rho,
            sigma_x2: tau / (2.0 * omega),
            sigma_p2: omega * tau / 2.0,
            gamma_x: 0.0,
            gamma_p: 0.0,
            width_omega1: 2.0 * omega,
            width_omega2: 2.0 * omega,
            phi_x: 0.0,
            phi_p: 0.0,
            hbar_eff: tau,
        }
    }

    /// Sets `gamma_x = gx * 2 sigma_x^2`, `gamma_p = gp * 2 sigma_p^2`.
    pub fn with_relative_gammas(mut self, gx: f64, gp: f64) -> Self {
        self.gamma_x = gx * 2.0 * self.sigma_x2;
        self.gamma_p = gp * 2.0 * self.sigma_p2;
        self
    }

    pub fn with_width_frequency(mut self, big_omega: f64) -> Self {
        self.width_omega1 = big_omega;
        self.width_omega2 = big_omega;
        self
    }

    pub fn with_phases(mut self, phi_x: f64, phi_p: f64) -> Self {
        self.phi_x = phi_x;
        self.phi_p = phi_p;
        self
    }

    pub fn omega(&self) -> f64 {
        0.5 * (self.omega1 + self.omega2)
    }

    pub fn width_omega(&self) -> f64 {
        0.5 * (self.width_omega1 + self.width_omega2)
    }

    pub fn gx(&self) -> f64 {
        self.gamma_x / (2.0 * self.sigma_x2)
    }

    pub fn gp(&self) -> f64 {
        self.gamma_p / (2.0 * self.sigma_p2)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m", self.m),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("sigma_x2", self.sigma_x2),
            ("sigma_p2", self.sigma_p2),
            ("hbar_eff", self.hbar_eff),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let floor = 0.25 * self.hbar_eff * self.hbar_eff;
        if self.sigma_x2 * self.sigma_p2 < floor - 1e-12 {
            return Err(Error::Config(format!(
                "widths violate the uncertainty floor: {} < {floor}",
                self.sigma_x2 * self.sigma_p2
            )));
        }
        for (name, g) in [("gamma_x", self.gx()), ("gamma_p", self.gp())] {
            if g.abs() > MAX_WIDTH_MODULATION {
                return Err(Error::Config(format!(
                    "{name} / (2 sigma^2) = {g} exceeds {MAX_WIDTH_MODULATION}"
                )));
            }
        }
        Ok(())
    }

    fn trajectory(&self, omega: f64, t: f64) -> (f64, f64) {
        let (s, c) = (omega * t).sin_cos();
        (self.rho * c, -self.m * omega * self.rho * s)
    }
}

/// `2 pi tau * int W1 W2` for Gaussians with the given squared widths and centres.
fn gaussian_overlap(tau: f64, sx: f64, sp: f64, dx: f64, dp: f64) -> f64 {
    tau / (sx * sp).sqrt() * (-0.5 * (dx * dx / sx + dp * dp / sp)).exp()
}

/// Fidelity without interactions; each oscillator keeps its own coherent widths.
pub fn fidelity_free(t: f64, params: &OscModelParams) -> f64 {
    let p = params;
    let sx = p.hbar_eff / (2.0 * p.m) * (1.0 / p.omega1 + 1.0 / p.omega2);
    let sp = p.m * p.hbar_eff / 2.0 * (p.omega1 + p.omega2);
    let (x1, p1) = p.trajectory(p.omega1, t);
    let (x2, p2) = p.trajectory(p.omega2, t);
    gaussian_overlap(p.hbar_eff, sx, sp, x1 - x2, p1 - p2).min(1.0)
}

/// How the momentum separation enters `s_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentumForm {
    /// `(p1 - p2)^2`, the separation of the two trajectories.
    #[default]
    Difference,
    /// `(p1 + p2)^2`, i.e. `m^2 rho^2 (omega1 sin omega1 t + omega2 sin omega2 t)^2`.
    Sum,
}

fn momentum_separation(p1: f64, p2: f64, form: MomentumForm) -> f64 {
    match form {
        MomentumForm::Difference => p1 - p2,
        MomentumForm::Sum => p1 + p2,
    }
}

/// Squared widths of both states at time `t`: `(sx1, sx2, sp1, sp2)`.
fn breathing_widths(t: f64, p: &OscModelParams) -> (f64, f64, f64, f64) {
    let c1x = (p.width_omega1 * t + p.phi_x).cos();
    let c2x = (p.width_omega2 * t + p.phi_x).cos();
    let c1p = (p.width_omega1 * t + p.phi_p).cos();
    let c2p = (p.width_omega2 * t + p.phi_p).cos();
    (
        p.sigma_x2 + p.gamma_x * c1x,
        p.sigma_x2 + p.gamma_x * c2x,
        p.sigma_p2 + p.gamma_p * c1p,
        p.sigma_p2 + p.gamma_p * c2p,
    )
}

/// `(s_x, s_p)` with the breathing widths kept in the denominators.
pub fn s_terms_exact(t: f64, params: &OscModelParams, form: MomentumForm) -> (f64, f64) {
    let (sx1, sx2, sp1, sp2) = breathing_widths(t, params);
    let (x1, p1) = params.trajectory(params.omega1, t);
    let (x2, p2) = params.trajectory(params.omega2, t);
    let dx = x1 - x2;
    let dp = momentum_separation(p1, p2, form);
    (dx * dx / (sx1 + sx2), dp * dp / (sp1 + sp2))
}

/// Overlap of the two breathing Gaussians.
pub fn fidelity_model(t: f64, params: &OscModelParams, form: MomentumForm) -> f64 {
    let (sx1, sx2, sp1, sp2) = breathing_widths(t, params);
    let (x1, p1) = params.trajectory(params.omega1, t);
    let (x2, p2) = params.trajectory(params.omega2, t);
    gaussian_overlap(
        params.hbar_eff,
        sx1 + sx2,
        sp1 + sp2,
        x1 - x2,
        momentum_separation(p1, p2, form),
    )
}

/// `amplitude * cos(frequency * t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosTerm {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl CosTerm {
    pub fn new(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self {
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn constant(amplitude: f64) -> Self {
        Self::new(amplitude, 0.0, 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (self.frequency * t + self.phase).cos()
    }
}

/// Finite sum of cosines, closed under products through `cos a cos b = (cos(a-b) + cos(a+b)) / 2`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CosineSeries {
    pub terms: Vec<CosTerm>,
}

impl CosineSeries {
    pub fn new(terms: Vec<CosTerm>) -> Self {
        Self { terms }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|c| c.eval(t)).sum()
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.terms.iter_mut().for_each(|c| c.amplitude *= factor);
        self
    }

    pub fn plus(mut self, other: &CosineSeries) -> Self {
        self.terms.extend_from_slice(&other.terms);
        self
    }

    pub fn times(&self, other: &CosineSeries) -> CosineSeries {
        let mut terms = Vec::with_capacity(2 * self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let amp = 0.5 * a.amplitude * b.amplitude;
                terms.push(CosTerm::new(amp, a.frequency - b.frequency, a.phase - b.phase));
                terms.push(CosTerm::new(amp, a.frequency + b.frequency, a.phase + b.phase));
            }
        }
        CosineSeries { terms }
    }

    /// Distinct `|frequency|` values carrying non-negligible amplitude, merged within `tol`.
    pub fn frequencies(&self, tol: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for term in &self.terms {
            if term.amplitude.abs() <= tol {
                continue;
            }
            let f = term.frequency.abs();
            if !out.iter().any(|g| (g - f).abs() <= tol) {
                out.push(f);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// `s_x + s_p` to first order in `gamma / (2 sigma^2)` as an explicit cosine series.
pub fn expanded_series(params: &OscModelParams, form: MomentumForm) -> CosineSeries {
    let p = params;
    let separation_x = CosineSeries::new(vec![
        CosTerm::new(p.rho, p.omega1, 0.0),
        CosTerm::new(-p.rho, p.omega2, 0.0),
    ]);
    // p_i = -m omega_i rho sin(omega_i t) = -m omega_i rho cos(omega_i t - pi/2).
    let sign = match form {
        MomentumForm::Difference => 1.0,
        MomentumForm::Sum => -1.0,
    };
    let separation_p = CosineSeries::new(vec![
        CosTerm::new(-p.m * p.omega1 * p.rho, p.omega1, -FRAC_PI_2),
        CosTerm::new(sign * p.m * p.omega2 * p.rho, p.omega2, -FRAC_PI_2),
    ]);
    let breathing = |g: f64, phi: f64| {
        CosineSeries::new(vec![
            CosTerm::constant(1.0),
            CosTerm::new(-g, p.width_omega1, phi),
            CosTerm::new(-g, p.width_omega2, phi),
        ])
    };
    let sx = separation_x
        .times(&separation_x)
        .scaled(1.0 / (2.0 * p.sigma_x2))
        .times(&breathing(p.gx(), p.phi_x));
    let sp = separation_p
        .times(&separation_p)
        .scaled(1.0 / (2.0 * p.sigma_p2))
        .times(&breathing(p.gp(), p.phi_p));
    sx.plus(&sp)
}

pub fn s_sum_expanded(t: f64, params: &OscModelParams, form: MomentumForm) -> f64 {
    expanded_series(params, form).eval(t)
}

/// Fidelity with the expanded exponent and the unperturbed prefactor.
pub fn fidelity_expanded(t: f64, params: &OscModelParams, form: MomentumForm) -> f64 {
    let prefactor =
        params.hbar_eff / (4.0 * params.sigma_x2 * params.sigma_p2).sqrt();
    prefactor * (-0.5 * s_sum_expanded(t, params, form)).exp()
}

/// Reading of the interaction term at the intermediate frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum A7Reading {
    /// `cos(Delta omega t - phi_p)`.
    #[default]
    TimeDependent,
    /// `cos(Delta omega - phi_p)`, a constant.
    Literal,
}

/// The eight closed-form terms with `omega`, `Omega` and the widths collapsed to common values.
///
/// Kept verbatim for comparison; [`expanded_series`] is the consistent first-order expansion.
pub fn a_terms(t: f64, params: &OscModelParams, reading: A7Reading) -> [f64; 8] {
    let p = params;
    let w = p.omega();
    let big = p.width_omega();
    let ws = p.omega1 + p.omega2;
    let dw = p.omega1 - p.omega2;
    let delta = ws - big;
    let r2 = p.rho * p.rho;
    let mw2 = p.m * p.m * w * w;
    let (sx2, sp2) = (p.sigma_x2, p.sigma_p2);
    let (sx4, sp4) = (sx2 * sx2, sp2 * sp2);
    let (gx, gp) = (p.gamma_x, p.gamma_p);
    let (phx, php) = (p.phi_x, p.phi_p);
    let a7_arg = match reading {
        A7Reading::TimeDependent => delta * t - php,
        A7Reading::Literal => delta - php,
    };
    [
        r2 / (2.0 * sx2) + r2 * mw2 / (2.0 * sp2),
        (-r2 / (2.0 * sx2) + r2 * mw2 / (2.0 * sp2)) * (dw * t).cos(),
        -r2 * mw2 / sp2 * (ws * t).cos(),
        r2 * gx / (2.0 * sx4) * (big * t + phx).cos()
            - r2 * gp * mw2 / (2.0 * sp4) * (big * t + php).cos(),
        r2 * gx / (4.0 * sx4) * ((big - dw) * t + phx).cos()
            - r2 * mw2 * gp / (4.0 * sp4) * ((big - dw) * t + php).cos(),
        r2 * gx / (4.0 * sx4) * ((big + dw) * t + phx).cos()
            - r2 * mw2 * gp / (4.0 * sp4) * ((big + dw) * t + php).cos(),
        r2 * mw2 * gp / (2.0 * sp4) * a7_arg.cos(),
        r2 * mw2 * gp / (2.0 * sp4) * ((ws + big) * t + php).cos(),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedFrequencies {
    pub omega_s: f64,
    /// `omega1 - omega2`.
    pub delta_omega: f64,
    /// `omega_s - Omega`.
    pub big_delta_omega: f64,
    pub t1: f64,
    pub t2: f64,
    /// `2 pi / |delta_omega|`; infinite for identical oscillators.
    pub t3: f64,
    /// Whether `omega_s > 10 Delta omega > 100 |delta omega|`.
    pub ordered: bool,
}

pub fn predicted_frequencies(params: &OscModelParams) -> Result<PredictedFrequencies> {
    let omega_s = params.omega1 + params.omega2;
    let delta_omega = params.omega1 - params.omega2;
    let big_delta_omega = omega_s - params.width_omega();
    if big_delta_omega.is_nan() || big_delta_omega <= 0.0 {
        return Err(Error::Regime(format!(
            "width frequency {} is not below omega1 + omega2 = {omega_s}",
            params.width_omega()
        )));
    }
    Ok(PredictedFrequencies {
        omega_s,
        delta_omega,
        big_delta_omega,
        t1: 2.0 * PI / omega_s,
        t2: 2.0 * PI / big_delta_omega,
        t3: 2.0 * PI / delta_omega.abs(),
        ordered: omega_s > 10.0 * big_delta_omega && big_delta_omega > 10.0 * delta_omega.abs(),
    })
}

/// Overlap of one oscillator's state at `t` with itself at `t - delta_t`.
///
/// Uses `omega1` for the rotation and `Omega1` for the breathing, so the lag
/// enters as the phases `omega delta_t` and `Omega delta_t`.
pub fn wigner_correlation_analytic(t: f64, delta_t: f64, params: &OscModelParams) -> f64 {
    let p = params;
    let (xa, pa) = p.trajectory(p.omega1, t);
    let (xb, pb) = p.trajectory(p.omega1, t - delta_t);
    let lag = p.width_omega1 * delta_t;
    let sx = 2.0 * p.sigma_x2
        + p.gamma_x * ((p.width_omega1 * t + p.phi_x).cos() + (p.width_omega1 * t + p.phi_x - lag).cos());
    let sp = 2.0 * p.sigma_p2
        + p.gamma_p * ((p.width_omega1 * t + p.phi_p).cos() + (p.width_omega1 * t + p.phi_p - lag).cos());
    gaussian_overlap(p.hbar_eff, sx, sp, xa - xb, pa - pb)
}
