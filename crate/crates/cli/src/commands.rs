//! Runs one subcommand from a resolved configuration and writes its outputs.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use bipi::packing::{run_bipi_observed, PackRun, PackingError};
use bipi::wcsph::{
    run_drop, run_hydrostatic, DropSetup, FluidConfig, FluidError, FluidState, HydrostaticSetup, Sample,
};
use bipi::{BoundarySet, Vec2};
use log::{info, warn};
use serde_json::json;
use thiserror::Error;

use crate::bench::bench;
use crate::config::{ConfigError, RunConfig, Subcommand};
use crate::output::{self, ColorField};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Geometry {
        path: PathBuf,
        source: bipi::geometry::GeometryError,
    },
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Fluid(#[from] FluidError),
}

impl CliError {
    /// 1 for configuration and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Geometry { .. } => 1,
            CliError::Packing(PackingError::InvalidConfig(_) | PackingError::Geometry(_)) => 1,
            CliError::Packing(PackingError::EmptyPackable(_)) => 2,
            CliError::Fluid(FluidError::InvalidConfig(_) | FluidError::Geometry(_)) => 1,
            CliError::Fluid(FluidError::Packing(e)) => CliError::Packing(e.clone()).exit_code(),
            CliError::Fluid(FluidError::NonPositiveDensity { .. } | FluidError::Unstable { .. }) => 2,
        }
    }
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_geometry(path: &Path) -> Result<BoundarySet, CliError> {
    let text = fs::read_to_string(path).map_err(io_at(path))?;
    BoundarySet::parse(&text).map_err(|source| CliError::Geometry {
        path: path.to_path_buf(),
        source,
    })
}

fn geometry(cfg: &RunConfig) -> Result<BoundarySet, CliError> {
    let path = cfg
        .geometry
        .as_ref()
        .ok_or(ConfigError::MissingGeometry(cfg.command))?;
    load_geometry(path)
}

fn write_json(value: &serde_json::Value, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    fs::write(path, text + "\n").map_err(io_at(path))
}

fn common_summary(cfg: &RunConfig) -> serde_json::Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.to_string(),
        "geometry": cfg.geometry.as_ref().map(|p| p.display().to_string()),
        "dx": cfg.dx,
        "h_ratio": cfg.h_ratio,
    })
}

fn merge_json(mut base: serde_json::Value, extra: serde_json::Value) -> serde_json::Value {
    if let (Some(b), serde_json::Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

/// Runs `cfg.command`, writing into `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out).map_err(io_at(&cfg.out))?;
    match cfg.command {
        Subcommand::Seed => seed(cfg),
        Subcommand::Pack => pack(cfg),
        Subcommand::Hydrostatic => hydrostatic(cfg),
        Subcommand::Drop => drop(cfg),
        Subcommand::Bench => bench_cmd(cfg),
    }
}

fn seed(cfg: &RunConfig) -> Result<(), CliError> {
    let boundary = geometry(cfg)?;
    let refined = boundary.refined(cfg.dx);
    let mut run = PackRun::new(&refined, cfg.packing())?;
    run.evaluate_fields();
    let set = run.particles();
    let out = &cfg.out;
    let p = out.join("particles.csv");
    output::write_particles_csv_file(set, &p).map_err(io_at(&p))?;
    let p = out.join("particles.vtk");
    output::write_vtk_file(set, &p).map_err(io_at(&p))?;
    let p = out.join("gradc.svg");
    output::render_svg_scatter_file(set, &refined, ColorField::GradCMag, &p).map_err(io_at(&p))?;
    info!("seeded {} particles", set.len());
    write_json(
        &merge_json(common_summary(cfg), json!({ "n": set.len(), "n_packable": run.packable().len() })),
        &out.join("summary.json"),
    )
}

fn pack(cfg: &RunConfig) -> Result<(), CliError> {
    let boundary = geometry(cfg)?;
    let refined = boundary.refined(cfg.dx);
    let mut reverted = 0;
    let result = run_bipi_observed(&refined, cfg.packing(), |_, rec, stats| {
        reverted += stats.reverted;
        log::debug!("{:?} iter {} gradc {:.4e}", rec.phase, rec.iter, rec.gradc_avg);
    })?;
    if reverted > 0 {
        warn!("{reverted} shifts were dropped to keep particles inside the domain");
    }
    let set = &result.particles;
    let out = &cfg.out;
    let p = out.join("particles.csv");
    output::write_particles_csv_file(set, &p).map_err(io_at(&p))?;
    let p = out.join("particles.vtk");
    output::write_vtk_file(set, &p).map_err(io_at(&p))?;
    let p = out.join("metrics.csv");
    output::write_metrics_csv_file(&result.records, &p).map_err(io_at(&p))?;
    let p = out.join("gradc.svg");
    output::render_svg_scatter_file(set, &refined, ColorField::GradCMag, &p).map_err(io_at(&p))?;
    let p = out.join("gamma.svg");
    output::render_svg_scatter_file(set, &refined, ColorField::Gamma, &p).map_err(io_at(&p))?;
    let last = result.records.last();
    write_json(
        &merge_json(
            common_summary(cfg),
            json!({
                "n": set.len(),
                "iters_2a": result.iters_2a,
                "iters_2c": result.iters_2c,
                "frozen": result.frozen,
                "freeze_threshold": result.freeze_threshold,
                "final_tpd_avg": last.map(|r| r.tpd_avg),
                "final_gradc_avg": last.map(|r| r.gradc_avg),
            }),
        ),
        &out.join("summary.json"),
    )
}

fn fluid_config(cfg: &RunConfig, c0: f64) -> FluidConfig {
    FluidConfig {
        mu: cfg.mu,
        f_ext: Vec2::new(0.0, -cfg.gravity),
        p_b: cfg.pb,
        t_end: cfg.t_end,
        ..FluidConfig::water(cfg.dx, cfg.h(), c0)
    }
}

fn write_flow(out: &Path, samples: &[Sample], state: &FluidState) -> Result<(), CliError> {
    let p = out.join("timeseries.csv");
    output::write_timeseries_csv_file(samples, &p).map_err(io_at(&p))?;
    let p = out.join("fluid.csv");
    output::write_fluid_csv_file(state, &p).map_err(io_at(&p))
}

fn progress(s: &Sample) {
    info!("t {:.4} ke {:.4e} max |ρ/ρ0 - 1| {:.4}", s.t, s.kinetic_energy, s.max_density_excursion);
}

fn hydrostatic(cfg: &RunConfig) -> Result<(), CliError> {
    let boundary = geometry(cfg)?;
    let bbox = boundary.bbox();
    let surface = cfg.surface.unwrap_or(bbox.max.x2);
    let depth = surface - bbox.min.x2;
    let c0 = cfg.c0.unwrap_or(10.0 * (cfg.gravity * depth).abs().sqrt());
    let setup = HydrostaticSetup {
        geometry: boundary,
        surface,
        fluid: fluid_config(cfg, c0),
        packing: cfg.packing(),
        init: cfg.init,
        sample_every: cfg.sample_every,
    };
    let result = run_hydrostatic(&setup, |_, s| progress(s))?;
    write_flow(&cfg.out, &result.samples, &result.state)?;
    let last = result.samples.last().copied();
    write_json(
        &merge_json(
            common_summary(cfg),
            json!({
                "init": cfg.init.to_string(),
                "n": result.state.len(),
                "c0": c0,
                "surface": surface,
                "dt": result.dt,
                "dt_limit": result.dt_limit.to_string(),
                "final_kinetic_energy": last.map(|s| s.kinetic_energy),
                "final_max_density_excursion": last.map(|s| s.max_density_excursion),
                "pressure_depth_slope": result.pressure_slope,
                "rho0_g": setup.fluid.rho0 * cfg.gravity,
            }),
        ),
        &cfg.out.join("summary.json"),
    )
}

fn drop(cfg: &RunConfig) -> Result<(), CliError> {
    let mut setup = DropSetup::new(cfg.r0, cfg.a0, cfg.dx, cfg.h_ratio, cfg.init);
    let c0 = cfg.c0.unwrap_or(setup.fluid.c0);
    setup.fluid = FluidConfig {
        f_ext: Vec2::new(0.0, 0.0),
        ..fluid_config(cfg, c0)
    };
    setup.packing = cfg.packing();
    setup.sample_every = cfg.sample_every;
    let result = run_drop(&setup, |_, s| progress(s))?;
    write_flow(&cfg.out, &result.samples, &result.state)?;
    write_json(
        &merge_json(
            common_summary(cfg),
            json!({
                "init": cfg.init.to_string(),
                "n": result.state.len(),
                "c0": c0,
                "dt": result.dt,
                "dt_limit": result.dt_limit.to_string(),
                "t": result.state.t,
                "fitted_a": result.fitted.0,
                "fitted_b": result.fitted.1,
                "fitted_ratio": result.fitted_ratio(),
                "oracle_a": result.oracle.a,
                "oracle_b": result.oracle.b,
                "oracle_ratio": result.oracle_ratio(),
                "edge_deviation": result.edge_deviation,
            }),
        ),
        &cfg.out.join("summary.json"),
    )
}

fn bench_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let boundary = geometry(cfg)?;
    let report = bench(&boundary, cfg.packing(), &cfg.resolutions)?;
    let p = cfg.out.join("bench.csv");
    let mut csv = String::from("dx,n,n_pack_2a,n_pack_2c,sec_2a,sec_2c\n");
    for r in &report.rows {
        csv += &format!(
            "{},{},{},{},{},{}\n",
            output::num(r.dx),
            r.n,
            r.n_pack_2a,
            r.n_pack_2c,
            output::num(r.sec_2a),
            output::num(r.sec_2c)
        );
    }
    fs::write(&p, csv).map_err(io_at(&p))?;
    println!("{:>10} {:>8} {:>12} {:>12}", "dx", "N", "2a s/iter", "2c s/iter");
    for r in &report.rows {
        println!("{:>10.4} {:>8} {:>12.3e} {:>12.3e}", r.dx, r.n, r.sec_2a, r.sec_2c);
    }
    println!("exponent 2a {:.3}  2c {:.3}", report.exponent_2a, report.exponent_2c);
    write_json(
        &merge_json(common_summary(cfg), serde_json::to_value(&report).expect("report serializes")),
        &cfg.out.join("summary.json"),
    )
}
