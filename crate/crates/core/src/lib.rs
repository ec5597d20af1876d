//! Boundary-integral particle initialization for SPH, with a small
//! weakly-compressible solver for validating packed configurations.

pub mod geometry;
pub mod kernel;
pub mod neighbors;
pub mod packing;
pub mod particles;
pub mod quadrature;
pub mod shapes;
pub mod wallrenorm;
pub mod wcsph;

pub use geometry::{BoundarySet, Segment, SegmentKind, Vec2};
pub use kernel::KernelSpec;
pub use particles::ParticleSet;
