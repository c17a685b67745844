//! Classical kicked map `p' = p - K x exp(-x^2/2)`, `x' = x + p'`, its
//! linearization at the origin and phase portraits.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, p: 0.0 };

    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        (self.x - other.x).hypot(self.p - other.p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub initial: PhasePoint,
    /// `points[0] == initial`, one entry per iteration after that.
    pub points: Vec<PhasePoint>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_abs_x(&self) -> f64 {
        self.points.iter().map(|pt| pt.x.abs()).fold(0.0, f64::max)
    }
}

/// One iteration of the kicked map.
pub fn map_step(pt: PhasePoint, k: f64) -> PhasePoint {
    let p = pt.p - k * pt.x * (-0.5 * pt.x * pt.x).exp();
    PhasePoint { x: pt.x + p, p }
}

pub fn iterate(pt: PhasePoint, k: f64, n: usize) -> Orbit {
    let mut points = Vec::with_capacity(n + 1);
    points.push(pt);
    let mut cur = pt;
    for _ in 0..n {
        cur = map_step(cur, k);
        points.push(cur);
    }
    Orbit {
        initial: pt,
        points,
    }
}

/// Linearization of the map at the fixed point `(0, 0)`: `[[1-K, 1], [-K, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentMatrix {
    pub entries: [[f64; 2]; 2],
}

impl TangentMatrix {
    pub fn at_origin(k: f64) -> Self {
        Self {
            entries: [[1.0 - k, 1.0], [-k, 1.0]],
        }
    }

    pub fn determinant(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        a * d - b * c
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn apply(&self, pt: PhasePoint) -> PhasePoint {
        let [[a, b], [c, d]] = self.entries;
        PhasePoint {
            x: a * pt.x + b * pt.p,
            p: c * pt.x + d * pt.p,
        }
    }
}

/// Eigenvalues `e^{+i omega}, e^{-i omega}` of the tangent map together with `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentEigen {
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub omega: f64,
}

pub fn tangent_eigen(k: f64) -> Result<TangentEigen> {
    if !(k > 0.0 && k < 4.0) {
        return Err(Error::NonElliptic(k));
    }
    let re = (2.0 - k) / 2.0;
    let im = (k * (4.0 - k)).sqrt() / 2.0;
    // atan2 keeps cos(omega) = (2 - K)/2 on both sides of K = 2.
    let omega = im.atan2(re);
    Ok(TangentEigen {
        alpha_plus: Complex64::new(re, im),
        alpha_minus: Complex64::new(re, -im),
        omega,
    })
}

/// Rotation frequency (radians per kick) of orbits near the origin.
pub fn rotation_frequency(k: f64) -> Result<f64> {
    tangent_eigen(k).map(|e| e.omega)
}

/// `omega(K1) - omega(K2)`.
pub fn delta_omega(k1: f64, k2: f64) -> Result<f64> {
    Ok(rotation_frequency(k1)? - rotation_frequency(k2)?)
}

/// Seeds used for the default portrait: `x0 = 0.1, 0.2, .., 1.4`, `p0 = 0`.
pub fn default_portrait_seeds() -> Vec<PhasePoint> {
    (1..=14).map(|j| PhasePoint::new(0.1 * j as f64, 0.0)).collect()
}

pub const DEFAULT_PORTRAIT_ITERATIONS: usize = 3000;

/// One orbit per seed, in seed order (the position is the orbit id).
pub fn phase_portrait(k: f64, seeds: &[PhasePoint], n: usize) -> Vec<Orbit> {
    seeds.par_iter().map(|&seed| iterate(seed, k, n)).collect()
}
