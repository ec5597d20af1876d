//! Command-line flags. Every flag is optional so that a value from a
//! configuration file can show through when the flag is absent.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser};

use crate::config::Subcommand;

#[derive(Debug, Parser)]
#[command(name = "bipi", version, about = "Boundary-integral particle packing and WCSPH validation runs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// `key = value` configuration file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// Seed the Cartesian grid and evaluate γ, C and ∇C.
    Seed {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Seed and pack.
    Pack {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        pack: PackArgs,
    },
    /// Hydrostatic tank from a raw or packed start.
    Hydrostatic {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        pack: PackArgs,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Free elliptical drop from a raw or packed start.
    Drop {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        pack: PackArgs,
        #[command(flatten)]
        flow: FlowArgs,
        #[command(flatten)]
        drop: DropArgs,
    },
    /// Per-iteration timing of both packing phases across resolutions.
    Bench {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        pack: PackArgs,
        /// Comma-separated particle spacings.
        #[arg(long)]
        resolutions: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Boundary file.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Particle spacing dx_r, m.
    #[arg(long)]
    pub dx: Option<f64>,
    /// Smoothing length over spacing, within [1.2, 3].
    #[arg(long)]
    pub h_ratio: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reserved; the pipeline is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PackArgs {
    /// Shifting coefficient J.
    #[arg(long)]
    pub j: Option<f64>,
    /// Relative window change that stops a phase.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub min_iters: Option<usize>,
    #[arg(long = "max-iters-2a")]
    pub max_iters_2a: Option<usize>,
    #[arg(long = "max-iters-2c")]
    pub max_iters_2c: Option<usize>,
    /// Freeze distance in units of dx_r.
    #[arg(long)]
    pub k_b: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// End time, s.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Initial particles: grid or bipi.
    #[arg(long)]
    pub init: Option<String>,
    /// Dynamic viscosity, Pa·s.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Sound speed, m/s.
    #[arg(long)]
    pub c0: Option<f64>,
    /// Background pressure, Pa.
    #[arg(long)]
    pub pb: Option<f64>,
    /// Gravitational acceleration, m/s².
    #[arg(long)]
    pub gravity: Option<f64>,
    /// Free-surface height for the initial hydrostatic pressure, m.
    #[arg(long)]
    pub surface: Option<f64>,
    /// Steps between time-series samples.
    #[arg(long)]
    pub sample_every: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DropArgs {
    /// Initial drop radius, m.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Initial strain rate, 1/s.
    #[arg(long)]
    pub a0: Option<f64>,
}

fn put<T: ToString>(map: &mut BTreeMap<String, String>, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        map.insert(key.to_string(), v.to_string());
    }
}

impl CommonArgs {
    fn collect(&self, m: &mut BTreeMap<String, String>) {
        if let Some(g) = &self.geometry {
            m.insert("geometry".into(), g.display().to_string());
        }
        put(m, "dx", &self.dx);
        put(m, "h_ratio", &self.h_ratio);
        if let Some(o) = &self.out {
            m.insert("out".into(), o.display().to_string());
        }
        put(m, "seed", &self.seed);
    }
}

impl PackArgs {
    fn collect(&self, m: &mut BTreeMap<String, String>) {
        put(m, "j", &self.j);
        put(m, "tol", &self.tol);
        put(m, "window", &self.window);
        put(m, "min_iters", &self.min_iters);
        put(m, "max_iters_2a", &self.max_iters_2a);
        put(m, "max_iters_2c", &self.max_iters_2c);
        put(m, "k_b", &self.k_b);
    }
}

impl FlowArgs {
    fn collect(&self, m: &mut BTreeMap<String, String>) {
        put(m, "t_end", &self.t_end);
        put(m, "init", &self.init);
        put(m, "mu", &self.mu);
        put(m, "c0", &self.c0);
        put(m, "pb", &self.pb);
        put(m, "gravity", &self.gravity);
        put(m, "surface", &self.surface);
        put(m, "sample_every", &self.sample_every);
    }
}

impl Command {
    /// The subcommand and the flags given on the command line, keyed like
    /// the configuration file.
    pub fn flags(&self) -> (Subcommand, BTreeMap<String, String>) {
        let mut m = BTreeMap::new();
        let sub = match self {
            Command::Seed { common } => {
                common.collect(&mut m);
                Subcommand::Seed
            }
            Command::Pack { common, pack } => {
                common.collect(&mut m);
                pack.collect(&mut m);
                Subcommand::Pack
            }
            Command::Hydrostatic { common, pack, flow } => {
                common.collect(&mut m);
                pack.collect(&mut m);
                flow.collect(&mut m);
                Subcommand::Hydrostatic
            }
            Command::Drop {
                common,
                pack,
                flow,
                drop,
            } => {
                common.collect(&mut m);
                pack.collect(&mut m);
                flow.collect(&mut m);
                put(&mut m, "r0", &drop.r0);
                put(&mut m, "a0", &drop.a0);
                Subcommand::Drop
            }
            Command::Bench {
                common,
                pack,
                resolutions,
            } => {
                common.collect(&mut m);
                pack.collect(&mut m);
                put(&mut m, "resolutions", resolutions);
                Subcommand::Bench
            }
        };
        (sub, m)
    }
}
