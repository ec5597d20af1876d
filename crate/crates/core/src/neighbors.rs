//! Cell-linked list over a subset of particles.

use crate::geometry::{BoundarySet, Vec2};
use crate::kernel::KernelSpec;
use crate::particles::ParticleSet;

/// A neighbor `b` of a query point `x`: `disp = x - x_b`, `dist = |disp|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub disp: Vec2,
    pub dist: f64,
}

/// Buckets of particle ids on a square grid with cell size `2h`.
#[derive(Clone, Debug)]
pub struct NeighborIndex<'a> {
    positions: &'a [Vec2],
    radius: f64,
    origin: Vec2,
    nx: usize,
    ny: usize,
    cell_start: Vec<usize>,
    entries: Vec<usize>,
}

/// Builds the index over `universe`, a set of ids into `positions`.
pub fn build_index<'a>(positions: &'a [Vec2], universe: &[usize], kernel: &KernelSpec) -> NeighborIndex<'a> {
    NeighborIndex::new(positions, universe, kernel.support())
}

impl<'a> NeighborIndex<'a> {
    pub fn new(positions: &'a [Vec2], universe: &[usize], radius: f64) -> Self {
        if universe.is_empty() {
            return Self {
                positions,
                radius,
                origin: Vec2::ZERO,
                nx: 0,
                ny: 0,
                cell_start: Vec::new(),
                entries: Vec::new(),
            };
        }
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &i in universe {
            lo = lo.min(positions[i]);
            hi = hi.max(positions[i]);
        }
        let nx = ((hi.x1 - lo.x1) / radius).floor() as usize + 1;
        let ny = ((hi.x2 - lo.x2) / radius).floor() as usize + 1;
        let mut idx = Self {
            positions,
            radius,
            origin: lo,
            nx,
            ny,
            cell_start: vec![0; nx * ny + 1],
            entries: vec![0; universe.len()],
        };

        // Counting sort keeps ids within a bucket in universe order.
        let cells: Vec<usize> = universe.iter().map(|&i| idx.cell_index(positions[i])).collect();
        for &c in &cells {
            idx.cell_start[c + 1] += 1;
        }
        for c in 0..nx * ny {
            idx.cell_start[c + 1] += idx.cell_start[c];
        }
        let mut fill = idx.cell_start.clone();
        for (&i, &c) in universe.iter().zip(&cells) {
            idx.entries[fill[c]] = i;
            fill[c] += 1;
        }
        idx
    }

    fn cell_coords(&self, p: Vec2) -> (i64, i64) {
        (
            ((p.x1 - self.origin.x1) / self.radius).floor() as i64,
            ((p.x2 - self.origin.x2) / self.radius).floor() as i64,
        )
    }

    fn cell_index(&self, p: Vec2) -> usize {
        let (i, j) = self.cell_coords(p);
        let i = i.clamp(0, self.nx as i64 - 1) as usize;
        let j = j.clamp(0, self.ny as i64 - 1) as usize;
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Universe particles within `2h` of particle `a`, excluding `a`, sorted by id.
    pub fn neighbors(&self, a: usize) -> Vec<Neighbor> {
        let mut out = Vec::new();
        self.neighbors_into(a, &mut out);
        out
    }

    pub fn neighbors_into(&self, a: usize, out: &mut Vec<Neighbor>) {
        self.collect(self.positions[a], Some(a), out);
    }

    /// Universe particles within `2h` of an arbitrary point, sorted by id.
    pub fn neighbors_of_point(&self, p: Vec2) -> Vec<Neighbor> {
        let mut out = Vec::new();
        self.collect(p, None, &mut out);
        out
    }

    fn collect(&self, p: Vec2, skip: Option<usize>, out: &mut Vec<Neighbor>) {
        out.clear();
        if self.entries.is_empty() {
            return;
        }
        let (ci, cj) = self.cell_coords(p);
        let r2 = self.radius * self.radius;
        for j in (cj - 1).max(0)..=(cj + 1).min(self.ny as i64 - 1) {
            for i in (ci - 1).max(0)..=(ci + 1).min(self.nx as i64 - 1) {
                let c = j as usize * self.nx + i as usize;
                for &b in &self.entries[self.cell_start[c]..self.cell_start[c + 1]] {
                    if Some(b) == skip {
                        continue;
                    }
                    let disp = p - self.positions[b];
                    let d2 = disp.norm_squared();
                    if d2 <= r2 {
                        out.push(Neighbor {
                            id: b,
                            disp,
                            dist: d2.sqrt(),
                        });
                    }
                }
            }
        }
        out.sort_unstable_by_key(|n| n.id);
    }
}

/// Particles within `2h` of the boundary (packable) and within `4h`
/// (selected, the packable ones plus their kernel support).
pub fn select_near_boundary(p: &ParticleSet, b: &BoundarySet, kernel: &KernelSpec) -> (Vec<usize>, Vec<usize>) {
    let k_a = kernel.support();
    let reach = k_a + kernel.support();
    let grid = crate::geometry::SegmentGrid::new(b.segments(), reach);
    let mut packable = Vec::new();
    let mut selected = Vec::new();
    for (i, &x) in p.position.iter().enumerate() {
        let near = grid.within(b.segments(), x, reach);
        let dist = near
            .iter()
            .map(|&s| b.segments()[s].closest_point(x).0)
            .fold(f64::INFINITY, f64::min);
        if dist <= k_a {
            packable.push(i);
        }
        if dist <= reach {
            selected.push(i);
        }
    }
    (packable, selected)
}
