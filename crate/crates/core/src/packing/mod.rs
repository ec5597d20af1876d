//! Boundary-integral particle packing: seeding, near-wall redistribution
//! (Step 2a), freezing the wall layer (Step 2b), and global redistribution
//! (Step 2c).

mod config;
mod fields;
mod run;

pub use config::{window_change, PackingConfig};
pub use fields::{
    boundary_force_term, cap_shift, concentration, concentration_gradient, corrected_gradient, shift_forced,
    shift_plain,
};
pub use run::{gradc_avg, run_bipi, run_bipi_observed, tpd_avg, IterationRecord, IterationStats, PackResult, PackRun, Phase};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PackingError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid packing configuration: {0}")]
    InvalidConfig(String),
    #[error("no packable particles in phase {0}")]
    EmptyPackable(Phase),
}
