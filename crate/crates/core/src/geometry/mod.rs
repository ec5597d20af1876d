//! Polygonal boundaries, containment and nearest-segment queries, and the
//! initial Cartesian seeding.

mod boundary;
mod seed;
mod segment_grid;
mod vec2;

pub use boundary::{parse_boundary, Aabb, BoundarySet, Loop, NearestSegment, Segment, SegmentKind};
pub use seed::seed_grid;
pub use segment_grid::SegmentGrid;
pub use vec2::Vec2;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("boundary has no loops")]
    Empty,
    #[error("loop {loop_id} has {count} vertices; at least 3 are required")]
    TooFewVertices { loop_id: usize, count: usize },
    #[error("loop {loop_id}, vertex {vertex}: non-finite coordinate")]
    NonFinite { loop_id: usize, vertex: usize },
    #[error("loop {loop_id}, edge {edge} has zero length")]
    ZeroLengthEdge { loop_id: usize, edge: usize },
    #[error("edge {edge_a} of loop {loop_a} intersects edge {edge_b} of loop {loop_b}")]
    SelfIntersection {
        loop_a: usize,
        edge_a: usize,
        loop_b: usize,
        edge_b: usize,
    },
    #[error("loop {loop_id} has signed area {signed_area:e}; {} loops must be {}", if *.hole { "hole" } else { "outer" }, if *.hole { "clockwise" } else { "counterclockwise" })]
    Orientation {
        loop_id: usize,
        signed_area: f64,
        hole: bool,
    },
    #[error("spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("no cell center of a {dx} grid falls inside the geometry")]
    NoParticles { dx: f64 },
}
