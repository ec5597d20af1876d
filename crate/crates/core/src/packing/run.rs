use std::fmt;

use log::{debug, info};
use rayon::prelude::*;

use super::config::window_change;
use super::fields::{concentration, concentration_gradient, shift_forced};
use super::{PackingConfig, PackingError};
use crate::geometry::{seed_grid, BoundarySet, Vec2};
use crate::kernel::KernelSpec;
use crate::neighbors::{select_near_boundary, Neighbor, NeighborIndex};
use crate::particles::ParticleSet;
use crate::wallrenorm::{gamma_halfplane, WallIntegrator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Near-wall redistribution.
    TwoA,
    /// Redistribution of everything except the frozen wall layer.
    TwoC,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::TwoA => "2a",
            Phase::TwoC => "2c",
        })
    }
}

/// Metrics after one packing iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub phase: Phase,
    /// Global iteration count, starting at 1.
    pub iter: usize,
    /// Mean distance of packable particles from their seed positions.
    pub tpd_avg: f64,
    /// Mean `|∇C|` of packable particles, evaluated before the shift.
    pub gradc_avg: f64,
    pub n_pack: usize,
}

/// Diagnostics of one iteration, beyond what is recorded.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IterationStats {
    /// Largest applied displacement.
    pub max_displacement: f64,
    /// Shifts shortened because they would have left the domain.
    pub halved: usize,
    /// Shifts dropped after repeated halving failed.
    pub reverted: usize,
}

#[derive(Clone, Debug)]
pub struct PackResult {
    pub particles: ParticleSet,
    pub records: Vec<IterationRecord>,
    pub iters_2a: usize,
    pub iters_2c: usize,
    pub frozen: usize,
    /// `γ` of a point at `k_b` from a straight wall.
    pub freeze_threshold: f64,
}

/// Mean `|x_a - x_a0|` over `ids`.
pub fn tpd_avg(p: &ParticleSet, ids: &[usize]) -> Result<f64, PackingError> {
    if ids.is_empty() {
        return Err(PackingError::EmptyPackable(Phase::TwoA));
    }
    let sum: f64 = ids.iter().map(|&i| (p.position[i] - p.seed_position[i]).norm()).sum();
    Ok(sum / ids.len() as f64)
}

/// Mean `|∇C_a|` over `ids`, using the stored gradients.
pub fn gradc_avg(p: &ParticleSet, ids: &[usize]) -> Result<f64, PackingError> {
    if ids.is_empty() {
        return Err(PackingError::EmptyPackable(Phase::TwoC));
    }
    let sum: f64 = ids.iter().map(|&i| p.grad_c[i].norm()).sum();
    Ok(sum / ids.len() as f64)
}

/// Packing state machine. Phases are driven explicitly so callers can
/// observe every iteration; [`run_bipi`] chains them.
pub struct PackRun<'a> {
    boundary: &'a BoundarySet,
    walls: WallIntegrator<'a>,
    kernel: KernelSpec,
    config: PackingConfig,
    particles: ParticleSet,
    records: Vec<IterationRecord>,
    packable: Vec<usize>,
    selected: Vec<usize>,
    phase: Phase,
    phase_iters: usize,
}

impl<'a> PackRun<'a> {
    /// Seeds the domain on the `dx` grid. `boundary` must already be refined.
    pub fn new(boundary: &'a BoundarySet, config: PackingConfig) -> Result<Self, PackingError> {
        let particles = seed_grid(boundary, config.dx)?;
        Self::from_particles(boundary, config, particles)
    }

    pub fn from_particles(
        boundary: &'a BoundarySet,
        config: PackingConfig,
        particles: ParticleSet,
    ) -> Result<Self, PackingError> {
        config.validate()?;
        let kernel = KernelSpec::new(config.h);
        let mut run = Self {
            boundary,
            walls: WallIntegrator::new(boundary.segments(), kernel),
            kernel,
            config,
            particles,
            records: Vec::new(),
            packable: Vec::new(),
            selected: Vec::new(),
            phase: Phase::TwoA,
            phase_iters: 0,
        };
        run.enter_2a()?;
        Ok(run)
    }

    pub fn particles(&self) -> &ParticleSet {
        &self.particles
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn config(&self) -> &PackingConfig {
        &self.config
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn packable(&self) -> &[usize] {
        &self.packable
    }

    fn set_flags(&mut self) {
        let n = self.particles.len();
        self.particles.packable = vec![false; n];
        self.particles.selected = vec![false; n];
        for &i in &self.packable {
            self.particles.packable[i] = true;
        }
        for &i in &self.selected {
            self.particles.selected[i] = true;
        }
    }

    fn enter_2a(&mut self) -> Result<(), PackingError> {
        let (packable, selected) = select_near_boundary(&self.particles, self.boundary, &self.kernel);
        if packable.is_empty() {
            return Err(PackingError::EmptyPackable(Phase::TwoA));
        }
        self.packable = packable;
        self.selected = selected;
        self.phase = Phase::TwoA;
        self.phase_iters = 0;
        self.set_flags();
        Ok(())
    }

    /// One synchronized iteration of the current phase.
    pub fn step(&mut self) -> IterationStats {
        let cfg = &self.config;
        let (diffusion, cap, dx) = (cfg.diffusion(), cfg.cap(), cfg.dx);
        let volume = self.particles.volume;
        let kernel = self.kernel;
        let positions = &self.particles.position;
        let index = NeighborIndex::new(positions, &self.selected, kernel.support());
        let walls = &self.walls;
        let segments = walls.segments();

        let shifts: Vec<(Vec2, Vec2)> = self
            .packable
            .par_iter()
            .map_init(Vec::<Neighbor>::new, |buf, &a| {
                let x = positions[a];
                index.neighbors_into(a, buf);
                let terms = walls.terms(x);
                let grad_c = concentration_gradient(buf, volume, terms.gamma, &terms.grad, &kernel);
                let shift = shift_forced(x, grad_c, terms.gamma, &terms.grad, segments, dx, diffusion, cap);
                (grad_c, shift)
            })
            .collect();

        let mut stats = IterationStats::default();
        for (&a, &(grad_c, shift)) in self.packable.iter().zip(&shifts) {
            self.particles.grad_c[a] = grad_c;
            let old = self.particles.position[a];
            let mut delta = shift;
            let mut new = old + delta;
            while (new - old).norm() > cap {
                delta = delta * (1.0 - f64::EPSILON);
                new = old + delta;
            }
            let mut tries = 0;
            while !self.boundary.contains(new) && tries < 4 {
                delta = delta * 0.5;
                new = old + delta;
                tries += 1;
            }
            if !self.boundary.contains(new) {
                new = old;
                stats.reverted += 1;
            } else if tries > 0 {
                stats.halved += 1;
            }
            stats.max_displacement = stats.max_displacement.max((new - old).norm());
            self.particles.position[a] = new;
        }

        self.phase_iters += 1;
        let n = self.packable.len() as f64;
        let tpd = self
            .packable
            .iter()
            .map(|&i| (self.particles.position[i] - self.particles.seed_position[i]).norm())
            .sum::<f64>()
            / n;
        let gradc = shifts.iter().map(|(g, _)| g.norm()).sum::<f64>() / n;
        self.records.push(IterationRecord {
            phase: self.phase,
            iter: self.records.len() + 1,
            tpd_avg: tpd,
            gradc_avg: gradc,
            n_pack: self.packable.len(),
        });
        stats
    }

    /// True once the current phase has met its stopping rule or budget.
    pub fn phase_done(&self) -> bool {
        let budget = match self.phase {
            Phase::TwoA => self.config.max_iters_2a,
            Phase::TwoC => self.config.max_iters_2c,
        };
        if self.phase_iters >= budget {
            return true;
        }
        let start = self.records.len() - self.phase_iters;
        let series: Vec<f64> = self.records[start..]
            .iter()
            .map(|r| match self.phase {
                Phase::TwoA => r.tpd_avg,
                Phase::TwoC => r.gradc_avg,
            })
            .collect();
        window_change(&series, self.config.window, self.config.min_iters).is_some_and(|c| c < self.config.tol)
    }

    /// Iterates the current phase until it stops; returns the iteration count.
    pub fn run_phase<F>(&mut self, observer: &mut F) -> usize
    where
        F: FnMut(&ParticleSet, &IterationRecord, &IterationStats),
    {
        while !self.phase_done() {
            let stats = self.step();
            let rec = *self.records.last().expect("step records an iteration");
            if rec.iter.is_multiple_of(500) {
                debug!("{} iter {}: tpd {:.3e} |gradC| {:.3e}", rec.phase, rec.iter, rec.tpd_avg, rec.gradc_avg);
            }
            observer(&self.particles, &rec, &stats);
        }
        self.phase_iters
    }

    /// Freezes particles whose `γ` is below that of a point at `k_b` from a
    /// straight wall. Returns the threshold and the number frozen.
    pub fn freeze(&mut self) -> (f64, usize) {
        let threshold = gamma_halfplane(self.config.k_b, &self.kernel);
        let walls = &self.walls;
        let gammas: Vec<f64> = self.particles.position.par_iter().map(|&x| walls.gamma(x)).collect();
        let mut count = 0;
        for (i, g) in gammas.into_iter().enumerate() {
            self.particles.gamma[i] = g;
            self.particles.frozen[i] = g < threshold;
            count += self.particles.frozen[i] as usize;
        }
        (threshold, count)
    }

    /// Switches to Step 2c: every unfrozen particle is packable and all are
    /// selected.
    pub fn enter_2c(&mut self) -> Result<(), PackingError> {
        self.packable = (0..self.particles.len()).filter(|&i| !self.particles.frozen[i]).collect();
        if self.packable.is_empty() {
            return Err(PackingError::EmptyPackable(Phase::TwoC));
        }
        self.selected = (0..self.particles.len()).collect();
        self.phase = Phase::TwoC;
        self.phase_iters = 0;
        self.set_flags();
        Ok(())
    }

    /// Fills `γ`, `C` and `∇C` for every particle at the current positions.
    pub fn evaluate_fields(&mut self) {
        let all: Vec<usize> = (0..self.particles.len()).collect();
        let positions = &self.particles.position;
        let index = NeighborIndex::new(positions, &all, self.kernel.support());
        let (walls, kernel, volume) = (&self.walls, self.kernel, self.particles.volume);
        let fields: Vec<(f64, f64, Vec2)> = all
            .par_iter()
            .map(|&a| {
                let nb = index.neighbors(a);
                let terms = walls.terms(positions[a]);
                (
                    terms.gamma,
                    concentration(&nb, volume, terms.gamma, &kernel),
                    concentration_gradient(&nb, volume, terms.gamma, &terms.grad, &kernel),
                )
            })
            .collect();
        for (i, (g, c, gc)) in fields.into_iter().enumerate() {
            self.particles.gamma[i] = g;
            self.particles.c[i] = c;
            self.particles.grad_c[i] = gc;
        }
    }

    pub fn into_particles(self) -> ParticleSet {
        self.particles
    }

    pub fn into_records(self) -> Vec<IterationRecord> {
        self.records
    }
}

/// Seeds, packs the wall band, freezes the wall layer, then packs the rest.
pub fn run_bipi(boundary: &BoundarySet, config: PackingConfig) -> Result<PackResult, PackingError> {
    run_bipi_observed(boundary, config, |_, _, _| {})
}

/// [`run_bipi`] with a callback after every iteration.
pub fn run_bipi_observed<F>(
    boundary: &BoundarySet,
    config: PackingConfig,
    mut observer: F,
) -> Result<PackResult, PackingError>
where
    F: FnMut(&ParticleSet, &IterationRecord, &IterationStats),
{
    let mut run = PackRun::new(boundary, config)?;
    info!(
        "seeded {} particles, {} packable in step 2a",
        run.particles().len(),
        run.packable().len()
    );
    let iters_2a = run.run_phase(&mut observer);
    let (freeze_threshold, frozen) = run.freeze();
    info!("step 2a stopped after {iters_2a} iterations; froze {frozen} particles");
    run.enter_2c()?;
    let iters_2c = run.run_phase(&mut observer);
    info!("step 2c stopped after {iters_2c} iterations");
    run.evaluate_fields();
    let records = run.records.clone();
    Ok(PackResult {
        particles: run.into_particles(),
        records,
        iters_2a,
        iters_2c,
        frozen,
        freeze_threshold,
    })
}
