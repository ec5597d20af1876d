//! Geometries used by the validation scenarios.

use std::f64::consts::PI;

use crate::geometry::{BoundarySet, Loop, SegmentKind, Vec2};

/// Trapezoid with a 1 m base, 0.6 m top and 0.5 m height.
pub fn trapezoid() -> BoundarySet {
    let v = [(0.0, 0.0), (1.0, 0.0), (0.8, 0.5), (0.2, 0.5)];
    BoundarySet::from_loops(vec![Loop::walls(v.iter().map(|&(x, y)| Vec2::new(x, y)).collect())])
        .expect("trapezoid is a valid loop")
}

/// Axis-aligned rectangle with its lower-left corner at the origin.
pub fn rectangle(width: f64, height: f64) -> BoundarySet {
    let v = vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(width, 0.0),
        Vec2::new(width, height),
        Vec2::new(0.0, height),
    ];
    BoundarySet::from_loops(vec![Loop::walls(v)]).expect("rectangle dimensions must be positive")
}

/// Water region of a tank with a symmetric right-angled wedge on the floor.
/// The waterline is a packing-only edge.
pub fn wedge_tank(width: f64, wedge_height: f64, depth: f64) -> BoundarySet {
    let c = 0.5 * width;
    let v = vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(c - wedge_height, 0.0),
        Vec2::new(c, wedge_height),
        Vec2::new(c + wedge_height, 0.0),
        Vec2::new(width, 0.0),
        Vec2::new(width, depth),
        Vec2::new(0.0, depth),
    ];
    let mut kinds = vec![SegmentKind::Wall; v.len()];
    kinds[5] = SegmentKind::Free;
    BoundarySet::from_loops(vec![Loop {
        vertices: v,
        edge_kinds: kinds,
    }])
    .expect("wedge tank dimensions must be consistent")
}

/// Tank of width 2.05 m filled to 0.5 m with a wedge of height √2/8 m.
pub fn standard_wedge_tank() -> BoundarySet {
    wedge_tank(2.05, 2f64.sqrt() / 8.0, 0.5)
}

/// Regular polygon inscribed in a circle of radius `r` about the origin.
pub fn circle(r: f64, n: usize, kind: SegmentKind) -> BoundarySet {
    let v = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            Vec2::new(r * t.cos(), r * t.sin())
        })
        .collect();
    BoundarySet::from_loops(vec![Loop {
        vertices: v,
        edge_kinds: vec![kind; n],
    }])
    .expect("circle needs at least 3 vertices")
}
