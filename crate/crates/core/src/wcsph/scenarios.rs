//! Validation scenarios: a hydrostatic tank and the free elliptical drop,
//! each started from the raw grid or from packed particles.

use std::fmt;
use std::str::FromStr;

use log::info;

use super::drop::{drop_oracle, fit_ellipse, DropAxes};
use super::solver::{stable_dt, DtLimit, Solver};
use super::{kinetic_energy, FluidConfig, FluidError, FluidState, MAX_DENSITY_EXCURSION};
use crate::geometry::{seed_grid, BoundarySet, SegmentKind, Vec2};
use crate::packing::{run_bipi, PackResult, PackingConfig};
use crate::shapes;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitMode {
    /// Cartesian seeding only.
    Grid,
    /// Seeding followed by boundary-integral packing.
    Bipi,
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMode::Grid => "grid",
            InitMode::Bipi => "bipi",
        })
    }
}

impl FromStr for InitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(InitMode::Grid),
            "bipi" => Ok(InitMode::Bipi),
            other => Err(format!("unknown init mode '{other}', expected grid or bipi")),
        }
    }
}

/// One row of a run's time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub kinetic_energy: f64,
    pub max_density_excursion: f64,
}

/// Initial particles for `boundary` (already refined) per `init`.
fn initial_positions(
    boundary: &BoundarySet,
    dx: f64,
    init: InitMode,
    packing: PackingConfig,
) -> Result<(Vec<Vec2>, Option<PackResult>), FluidError> {
    match init {
        InitMode::Grid => Ok((seed_grid(boundary, dx)?.position, None)),
        InitMode::Bipi => {
            let packed = run_bipi(boundary, packing)?;
            Ok((packed.particles.position.clone(), Some(packed)))
        }
    }
}

/// Steps `state` to `t_end`, sampling every `every` steps and at the end.
/// With `abort_excursion` set, a density excursion beyond it is an error.
fn integrate<F>(
    solver: &Solver,
    state: &mut FluidState,
    t_end: f64,
    every: usize,
    abort_excursion: Option<f64>,
    observer: &mut F,
) -> Result<(Vec<Sample>, f64, DtLimit), FluidError>
where
    F: FnMut(&FluidState, &Sample),
{
    let cfg = *solver.config();
    let (dt_max, limit) = stable_dt(&cfg);
    let steps = (t_end / dt_max).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    info!("integrating {steps} steps of {dt:.3e} s ({limit} limit binds)");
    let sample = |s: &FluidState| Sample {
        t: s.t,
        kinetic_energy: kinetic_energy(s),
        max_density_excursion: s.max_density_excursion(cfg.rho0).1,
    };
    let mut samples = vec![sample(state)];
    observer(state, &samples[0]);
    for k in 1..=steps {
        solver.step(state, dt)?;
        if let Some(limit) = abort_excursion {
            let (id, excursion) = state.max_density_excursion(cfg.rho0);
            if !(excursion <= limit) {
                return Err(FluidError::Unstable { id, excursion, t: state.t });
            }
        }
        if k % every.max(1) == 0 || k == steps {
            let s = sample(state);
            observer(state, &s);
            samples.push(s);
        }
    }
    Ok((samples, dt, limit))
}

#[derive(Clone, Debug)]
pub struct HydrostaticSetup {
    /// Fluid region; edges marked free are used for packing only.
    pub geometry: BoundarySet,
    /// Height of the free surface, where the initial pressure is `P_B`.
    pub surface: f64,
    pub fluid: FluidConfig,
    pub packing: PackingConfig,
    pub init: InitMode,
    pub sample_every: usize,
}

impl HydrostaticSetup {
    /// The wedge tank with water to 0.5 m, `μ = 10 Pa·s`, gravity and
    /// `c0 = 10 √(g H)`.
    pub fn wedge_tank(dx: f64, h_ratio: f64, init: InitMode, t_end: f64) -> Self {
        let g = 9.81;
        let depth = 0.5;
        let fluid = FluidConfig {
            mu: 10.0,
            f_ext: Vec2::new(0.0, -g),
            t_end,
            ..FluidConfig::water(dx, h_ratio * dx, 10.0 * (g * depth).sqrt())
        };
        Self {
            geometry: shapes::standard_wedge_tank(),
            surface: depth,
            fluid,
            packing: PackingConfig::new(dx, h_ratio),
            init,
            sample_every: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HydrostaticResult {
    pub samples: Vec<Sample>,
    pub state: FluidState,
    pub dt: f64,
    pub dt_limit: DtLimit,
    pub packing: Option<PackResult>,
    /// Least-squares slope of final pressure against depth, Pa/m.
    pub pressure_slope: f64,
}

/// Least-squares slope of `p` against depth below `surface`.
pub fn pressure_depth_slope(state: &FluidState, surface: f64) -> f64 {
    let n = state.len() as f64;
    let depth: Vec<f64> = state.position.iter().map(|x| surface - x.x2).collect();
    let mean_d = depth.iter().sum::<f64>() / n;
    let mean_p = state.p.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (d, p) in depth.iter().zip(&state.p) {
        sxy += (d - mean_d) * (p - mean_p);
        sxx += (d - mean_d) * (d - mean_d);
    }
    sxy / sxx
}

/// Starts from hydrostatic pressure at rest and integrates to `t_end`.
pub fn run_hydrostatic<F>(setup: &HydrostaticSetup, mut observer: F) -> Result<HydrostaticResult, FluidError>
where
    F: FnMut(&FluidState, &Sample),
{
    let cfg = setup.fluid;
    let refined = setup.geometry.refined(cfg.dx);
    let (positions, packing) = initial_positions(&refined, cfg.dx, setup.init, setup.packing)?;
    info!("hydrostatic run with {} particles ({} init)", positions.len(), setup.init);
    let walls = refined.walls_only();
    let solver = Solver::new(cfg, walls.segments())?;

    let mut state = FluidState::at_rest(positions, &cfg);
    let g = cfg.f_ext.norm();
    state.set_pressure(&cfg, |x| cfg.p_b + cfg.rho0 * g * (setup.surface - x.x2));

    let (samples, dt, dt_limit) = integrate(
        &solver,
        &mut state,
        cfg.t_end,
        setup.sample_every,
        Some(MAX_DENSITY_EXCURSION),
        &mut observer,
    )?;
    let pressure_slope = pressure_depth_slope(&state, setup.surface);
    Ok(HydrostaticResult {
        samples,
        state,
        dt,
        dt_limit,
        packing,
        pressure_slope,
    })
}

#[derive(Clone, Debug)]
pub struct DropSetup {
    pub r0: f64,
    pub a0: f64,
    pub fluid: FluidConfig,
    pub packing: PackingConfig,
    pub init: InitMode,
    pub sample_every: usize,
}

impl DropSetup {
    /// Inviscid drop with `c0 = 10 A0 R0`, run to `A0 t = 2`.
    pub fn new(r0: f64, a0: f64, dx: f64, h_ratio: f64, init: InitMode) -> Self {
        let fluid = FluidConfig {
            t_end: 2.0 / a0,
            ..FluidConfig::water(dx, h_ratio * dx, 10.0 * a0 * r0)
        };
        Self {
            r0,
            a0,
            fluid,
            packing: PackingConfig::new(dx, h_ratio),
            init,
            sample_every: 50,
        }
    }

    /// Polygon for seeding and packing, with edges near `dx/2` long.
    pub fn outline(&self) -> BoundarySet {
        let n = (4.0 * std::f64::consts::PI * self.r0 / self.fluid.dx).ceil() as usize;
        shapes::circle(self.r0, n.max(8), SegmentKind::Free)
    }
}

#[derive(Clone, Debug)]
pub struct DropResult {
    pub samples: Vec<Sample>,
    pub state: FluidState,
    pub dt: f64,
    pub dt_limit: DtLimit,
    pub packing: Option<PackResult>,
    /// Particles tracked as the drop's edge: the outermost 10% at `t = 0`.
    pub edge: Vec<usize>,
    /// Semi-axes `(a, b)` fitted to the edge particles at `t_end`.
    pub fitted: (f64, f64),
    pub oracle: DropAxes,
    /// Mean `|r - r_ellipse(θ)|` of edge particles against the oracle.
    pub edge_deviation: f64,
}

impl DropResult {
    pub fn fitted_ratio(&self) -> f64 {
        self.fitted.0 / self.fitted.1
    }

    pub fn oracle_ratio(&self) -> f64 {
        self.oracle.a / self.oracle.b
    }
}

/// Ids of the outermost `fraction` of particles by distance from the origin.
fn outermost(position: &[Vec2], fraction: f64) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..position.len()).collect();
    ids.sort_by(|&i, &j| position[j].norm().total_cmp(&position[i].norm()).then(i.cmp(&j)));
    let keep = ((position.len() as f64 * fraction).ceil() as usize).max(1).min(position.len());
    let mut edge = ids[..keep].to_vec();
    edge.sort_unstable();
    edge
}

/// Releases a circular drop with the straining flow and compares its edge to
/// the reference ellipse at `t_end`.
pub fn run_drop<F>(setup: &DropSetup, mut observer: F) -> Result<DropResult, FluidError>
where
    F: FnMut(&FluidState, &Sample),
{
    let cfg = setup.fluid;
    let outline = setup.outline().refined(cfg.dx);
    let (positions, packing) = initial_positions(&outline, cfg.dx, setup.init, setup.packing)?;
    info!("drop run with {} particles ({} init)", positions.len(), setup.init);
    let edge = outermost(&positions, 0.1);
    let solver = Solver::new(cfg, &[])?;

    let mut state = FluidState::at_rest(positions, &cfg);
    let (a0, r0, rho0) = (setup.a0, setup.r0, cfg.rho0);
    for i in 0..state.len() {
        let x = state.position[i];
        state.velocity[i] = Vec2::new(a0 * x.x1, -a0 * x.x2);
    }
    state.set_pressure(&cfg, |x| 0.5 * rho0 * a0 * a0 * (r0 * r0 - x.norm_squared()) + cfg.p_b);

    let (samples, dt, dt_limit) = integrate(&solver, &mut state, cfg.t_end, setup.sample_every, None, &mut observer)?;
    let oracle = drop_oracle(a0, r0, state.t);
    let edge_points: Vec<Vec2> = edge.iter().map(|&i| state.position[i]).collect();
    let fitted = fit_ellipse(&edge_points);
    let edge_deviation = edge_points
        .iter()
        .map(|p| (p.norm() - oracle.radius_at(p.x2.atan2(p.x1))).abs())
        .sum::<f64>()
        / edge_points.len() as f64;
    Ok(DropResult {
        samples,
        state,
        dt,
        dt_limit,
        packing,
        edge,
        fitted,
        oracle,
        edge_deviation,
    })
}
