use std::fmt;

use rayon::prelude::*;

use super::{FluidConfig, FluidError, FluidState};
use crate::geometry::{Segment, Vec2};
use crate::kernel::KernelSpec;
use crate::neighbors::{Neighbor, NeighborIndex};
use crate::wallrenorm::{GammaResult, WallIntegrator};

/// Which term of the time-step criterion binds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DtLimit {
    Acoustic,
    BodyForce,
    /// The `0.125 h²` term, taken literally with `h` in meters.
    Literal,
    Viscous,
}

impl fmt::Display for DtLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DtLimit::Acoustic => "acoustic",
            DtLimit::BodyForce => "body force",
            DtLimit::Literal => "0.125 h^2",
            DtLimit::Viscous => "viscous",
        })
    }
}

/// `min(0.25 h/c0, 0.25 √(h/|F|), 0.125 h², 0.125 ρ0 h²/μ)`, dropping the
/// force and viscous terms when `F = 0` or `μ = 0`.
pub fn stable_dt(cfg: &FluidConfig) -> (f64, DtLimit) {
    let h = cfg.h;
    let mut best = (0.25 * h / cfg.c0, DtLimit::Acoustic);
    let force = cfg.f_ext.norm();
    let mut candidates = vec![(0.125 * h * h, DtLimit::Literal)];
    if force > 0.0 {
        candidates.push((0.25 * (h / force).sqrt(), DtLimit::BodyForce));
    }
    if cfg.mu > 0.0 {
        candidates.push((0.125 * cfg.rho0 * h * h / cfg.mu, DtLimit::Viscous));
    }
    for c in candidates {
        if c.0 < best.0 {
            best = c;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Rates {
    /// `Dρ/Dt`, kg/m³/s.
    pub drho: f64,
    /// `Dv/Dt`, m/s².
    pub dv: Vec2,
}

/// What one particle sees: its kernel neighbors and wall terms.
pub struct Local<'s> {
    pub a: usize,
    pub neighbors: &'s [Neighbor],
    pub wall: &'s GammaResult,
}

/// Rate evaluation and explicit stepping against a fixed wall set.
pub struct Solver<'a> {
    cfg: FluidConfig,
    kernel: KernelSpec,
    walls: WallIntegrator<'a>,
}

impl<'a> Solver<'a> {
    /// `walls` holds the no-slip wall segments only; pass an empty slice for
    /// a fully free-surface flow.
    pub fn new(cfg: FluidConfig, walls: &'a [Segment]) -> Result<Self, FluidError> {
        cfg.validate()?;
        let kernel = KernelSpec::new(cfg.h);
        Ok(Self {
            cfg,
            kernel,
            walls: WallIntegrator::new(walls, kernel),
        })
    }

    pub fn config(&self) -> &FluidConfig {
        &self.cfg
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    fn segment(&self, s: usize) -> &Segment {
        &self.walls.segments()[s]
    }

    fn volume(state: &FluidState, b: usize) -> f64 {
        state.mass / state.rho[b]
    }

    /// `η² = 0.01 h²` regularizes the `1/r²` factors.
    fn eta2(&self) -> f64 {
        0.01 * self.cfg.h * self.cfg.h
    }

    /// Mass conservation with static walls, plus density diffusion.
    pub fn continuity_rate(&self, state: &FluidState, loc: &Local) -> f64 {
        let a = loc.a;
        let va = state.velocity[a];
        let mut particles = 0.0;
        for n in loc.neighbors {
            let gw = self.kernel.grad_w_r(n.disp, n.dist);
            particles += (state.velocity[n.id] - va).dot(gw) * Self::volume(state, n.id);
        }
        let mut walls = 0.0;
        for &(_, g) in &loc.wall.grad {
            walls += (-va).dot(g);
        }
        -state.rho[a] / loc.wall.gamma * (particles - walls) + self.density_diffusion(state, loc)
    }

    /// `δ h c0 (2/γ_a) Σ_b ψ_ab (x_ab·∇_a W_ab)/(r² + η²) V_b` with
    /// `x_ab = x_a - x_b`. Since `x_ab·∇_a W_ab ≤ 0`, a denser neighbor
    /// raises `ρ_a`.
    ///
    /// `ψ_ab` is `ρ_a - ρ_b` less the difference a hydrostatic column under
    /// `F_ext` would have, `ρ̄ F·x_ab / c̄²` at the pair's mean density, so the
    /// term does not erode the stratification that balances the body force.
    /// With `F_ext = 0` it is the plain density difference.
    pub fn density_diffusion(&self, state: &FluidState, loc: &Local) -> f64 {
        if self.cfg.delta_diff == 0.0 {
            return 0.0;
        }
        let a = loc.a;
        let eta2 = self.eta2();
        let f = self.cfg.f_ext;
        let mut sum = 0.0;
        for n in loc.neighbors {
            let gw = self.kernel.grad_w_r(n.disp, n.dist);
            let (ra, rb) = (state.rho[a], state.rho[n.id]);
            let mut psi = ra - rb;
            if f != Vec2::ZERO {
                let mean = 0.5 * (ra + rb);
                psi -= mean * f.dot(n.disp) / self.cfg.sound_speed_sq(mean);
            }
            sum += psi * n.disp.dot(gw) / (n.dist * n.dist + eta2) * Self::volume(state, n.id);
        }
        self.cfg.delta_diff * self.cfg.h * self.cfg.c0 * 2.0 / loc.wall.gamma * sum
    }

    /// Density used for the wall pressure: doubled linearly as the particle
    /// closes in on the segment centroid inside half a spacing.
    pub fn compressed_density(&self, rho_a: f64, x: Vec2, s: &Segment) -> f64 {
        let r = (x - s.centroid).norm();
        let dx = self.cfg.dx;
        if r < 0.5 * dx {
            2.0 * rho_a / dx * (dx - r)
        } else {
            rho_a
        }
    }

    /// `p(ρ̃_a) + ρ_a c0 (v_s - v_a)·n̂_s` with `v_s = 0`.
    pub fn wall_pressure(&self, state: &FluidState, a: usize, s: &Segment) -> f64 {
        let rho_t = self.compressed_density(state.rho[a], state.position[a], s);
        self.cfg.eos(rho_t) - state.rho[a] * self.cfg.c0 * state.velocity[a].dot(s.normal)
    }

    /// Morris-type `∇·∇v` with a no-slip wall term.
    ///
    /// The wall term stands in for the missing neighbors at `v_s = 0`; its
    /// coefficient `(x_s - x_a)·∇γ_as` is negative, like `x_ab·∇_a W_ab`.
    pub fn viscous_laplacian(&self, state: &FluidState, loc: &Local) -> Vec2 {
        let a = loc.a;
        let (xa, va) = (state.position[a], state.velocity[a]);
        let eta2 = self.eta2();
        let mut sum = Vec2::ZERO;
        for n in loc.neighbors {
            let gw = self.kernel.grad_w_r(n.disp, n.dist);
            let f = n.disp.dot(gw) / (n.dist * n.dist + eta2) * Self::volume(state, n.id);
            sum += (va - state.velocity[n.id]) * f;
        }
        for &(s, g) in &loc.wall.grad {
            let xs = self.segment(s).centroid - xa;
            sum += va * (xs.dot(g) / (xs.norm_squared() + eta2));
        }
        sum * (2.0 / loc.wall.gamma)
    }

    pub fn momentum_rate(&self, state: &FluidState, loc: &Local) -> Vec2 {
        let a = loc.a;
        let pa = state.p[a];
        let mut particles = Vec2::ZERO;
        for n in loc.neighbors {
            let gw = self.kernel.grad_w_r(n.disp, n.dist);
            particles += gw * ((pa + state.p[n.id]) * Self::volume(state, n.id));
        }
        let mut walls = Vec2::ZERO;
        for &(s, g) in &loc.wall.grad {
            walls += g * (pa + self.wall_pressure(state, a, self.segment(s)));
        }
        let rho = state.rho[a];
        let mut rate = (particles - walls) * (-1.0 / (rho * loc.wall.gamma)) + self.cfg.f_ext;
        if self.cfg.mu > 0.0 {
            rate += self.viscous_laplacian(state, loc) * (self.cfg.mu / rho);
        }
        rate
    }

    /// Rates of every particle on the current snapshot.
    pub fn rates(&self, state: &FluidState) -> Vec<Rates> {
        let all: Vec<usize> = (0..state.len()).collect();
        let index = NeighborIndex::new(&state.position, &all, self.kernel.support());
        all.par_iter()
            .map_init(Vec::<Neighbor>::new, |buf, &a| {
                index.neighbors_into(a, buf);
                let wall = self.walls.terms(state.position[a]);
                let loc = Local {
                    a,
                    neighbors: buf,
                    wall: &wall,
                };
                Rates {
                    drho: self.continuity_rate(state, &loc),
                    dv: self.momentum_rate(state, &loc),
                }
            })
            .collect()
    }

    /// Wall terms at every particle, for diagnostics.
    pub fn wall_terms(&self, state: &FluidState) -> Vec<GammaResult> {
        state.position.par_iter().map(|&x| self.walls.terms(x)).collect()
    }

    /// One explicit Euler step: density and velocity from the pre-step
    /// rates, then positions with the updated velocity.
    pub fn step(&self, state: &mut FluidState, dt: f64) -> Result<(), FluidError> {
        let rates = self.rates(state);
        self.apply(state, &rates, dt)
    }

    /// Commits precomputed rates, in id order.
    pub fn apply(&self, state: &mut FluidState, rates: &[Rates], dt: f64) -> Result<(), FluidError> {
        assert_eq!(rates.len(), state.len());
        let t = state.t + dt;
        for (i, r) in rates.iter().enumerate() {
            let rho = state.rho[i] + dt * r.drho;
            if !(rho > 0.0) {
                return Err(FluidError::NonPositiveDensity { id: i, rho, t });
            }
            state.rho[i] = rho;
            state.velocity[i] += r.dv * dt;
            state.position[i] += state.velocity[i] * dt;
            state.p[i] = self.cfg.eos(rho);
        }
        state.t = t;
        Ok(())
    }
}
