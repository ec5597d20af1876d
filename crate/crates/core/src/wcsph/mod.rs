//! Weakly compressible SPH in boundary-integral form, used to compare packed
//! and unpacked initial conditions.
//!
//! Walls enter only through `γ_a` and `∇γ_as`; free surfaces carry no
//! segments and keep the kernel deficiency uncorrected.

mod drop;
mod scenarios;
mod solver;

pub use drop::{drop_oracle, drop_oracle_by_quadrature, fit_ellipse, DropAxes};
pub use scenarios::{
    pressure_depth_slope, run_drop, run_hydrostatic, DropResult, DropSetup, HydrostaticResult, HydrostaticSetup,
    InitMode, Sample,
};
pub use solver::{stable_dt, DtLimit, Rates, Solver};

use thiserror::Error;

use crate::geometry::{GeometryError, Vec2};
use crate::packing::PackingError;

/// Relative density excursion beyond which a run is declared unstable.
pub const MAX_DENSITY_EXCURSION: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluidError {
    #[error("invalid fluid configuration: {0}")]
    InvalidConfig(String),
    #[error("density of particle {id} became {rho} at t = {t}")]
    NonPositiveDensity { id: usize, rho: f64, t: f64 },
    #[error("density of particle {id} deviates by {excursion:.3} from the reference at t = {t}")]
    Unstable { id: usize, excursion: f64, t: f64 },
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidConfig {
    /// Reference density, kg/m³.
    pub rho0: f64,
    /// Artificial sound speed, m/s.
    pub c0: f64,
    /// Dynamic viscosity, Pa·s.
    pub mu: f64,
    /// Body force per unit mass, m/s².
    pub f_ext: Vec2,
    /// Background pressure, Pa.
    pub p_b: f64,
    pub delta_diff: f64,
    pub t_end: f64,
    /// Particle spacing `dx_r`.
    pub dx: f64,
    /// Smoothing length.
    pub h: f64,
}

impl FluidConfig {
    /// Water at rest with default diffusion; the caller fills in the rest.
    pub fn water(dx: f64, h: f64, c0: f64) -> Self {
        Self {
            rho0: 1000.0,
            c0,
            mu: 0.0,
            f_ext: Vec2::ZERO,
            p_b: 0.0,
            delta_diff: 0.1,
            t_end: 0.0,
            dx,
            h,
        }
    }

    pub fn validate(&self) -> Result<(), FluidError> {
        let positive = [("rho0", self.rho0), ("c0", self.c0), ("dx", self.dx), ("h", self.h)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(FluidError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        let nonneg = [("mu", self.mu), ("delta_diff", self.delta_diff), ("t_end", self.t_end)];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(FluidError::InvalidConfig(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if !self.f_ext.is_finite() || !self.p_b.is_finite() {
            return Err(FluidError::InvalidConfig("body force and background pressure must be finite".into()));
        }
        Ok(())
    }

    /// Particle mass `ρ0 dx_r²`.
    pub fn mass(&self) -> f64 {
        self.rho0 * self.dx * self.dx
    }

    /// Tait equation of state.
    pub fn eos(&self, rho: f64) -> f64 {
        self.rho0 * self.c0 * self.c0 / 7.0 * ((rho / self.rho0).powi(7) - 1.0) + self.p_b
    }

    /// `dp/dρ` of the equation of state.
    pub fn sound_speed_sq(&self, rho: f64) -> f64 {
        self.c0 * self.c0 * (rho / self.rho0).powi(6)
    }

    /// Inverse of [`FluidConfig::eos`].
    pub fn density_for(&self, p: f64) -> f64 {
        self.rho0 * (7.0 * (p - self.p_b) / (self.rho0 * self.c0 * self.c0) + 1.0).powf(1.0 / 7.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluidState {
    pub position: Vec<Vec2>,
    pub velocity: Vec<Vec2>,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
    /// Uniform particle mass.
    pub mass: f64,
    pub t: f64,
}

impl FluidState {
    /// Particles at rest with reference density.
    pub fn at_rest(position: Vec<Vec2>, cfg: &FluidConfig) -> Self {
        let n = position.len();
        Self {
            position,
            velocity: vec![Vec2::ZERO; n],
            rho: vec![cfg.rho0; n],
            p: vec![cfg.p_b; n],
            mass: cfg.mass(),
            t: 0.0,
        }
    }

    /// Sets every pressure and the matching density.
    pub fn set_pressure<F: Fn(Vec2) -> f64>(&mut self, cfg: &FluidConfig, p: F) {
        for i in 0..self.len() {
            self.p[i] = p(self.position[i]);
            self.rho[i] = cfg.density_for(self.p[i]);
        }
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    /// Largest `|ρ/ρ0 - 1|` and the particle attaining it.
    pub fn max_density_excursion(&self, rho0: f64) -> (usize, f64) {
        let mut worst = (0, 0.0);
        for (i, &r) in self.rho.iter().enumerate() {
            let e = (r / rho0 - 1.0).abs();
            if e.is_nan() {
                return (i, f64::INFINITY);
            }
            if e > worst.1 {
                worst = (i, e);
            }
        }
        worst
    }
}

/// `Σ ½ m |v|²`.
pub fn kinetic_energy(state: &FluidState) -> f64 {
    0.5 * state.mass * state.velocity.iter().map(|v| v.norm_squared()).sum::<f64>()
}

/// Root-mean-square deviations `(p, v1, v2)` from per-particle references.
pub fn rms_errors(state: &FluidState, p_ref: &[f64], v_ref: &[Vec2]) -> (f64, f64, f64) {
    assert_eq!(p_ref.len(), state.len());
    assert_eq!(v_ref.len(), state.len());
    let n = state.len().max(1) as f64;
    let mut sums = (0.0, 0.0, 0.0);
    for i in 0..state.len() {
        sums.0 += (state.p[i] - p_ref[i]).powi(2);
        sums.1 += (state.velocity[i].x1 - v_ref[i].x1).powi(2);
        sums.2 += (state.velocity[i].x2 - v_ref[i].x2).powi(2);
    }
    ((sums.0 / n).sqrt(), (sums.1 / n).sqrt(), (sums.2 / n).sqrt())
}
