use super::{Segment, Vec2};

/// Uniform bucket grid over boundary segments for radius queries.
#[derive(Clone, Debug)]
pub struct SegmentGrid {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl SegmentGrid {
    pub fn new(segments: &[Segment], cell: f64) -> Self {
        assert!(cell > 0.0, "cell size must be positive");
        if segments.is_empty() {
            return Self {
                origin: Vec2::ZERO,
                cell,
                nx: 0,
                ny: 0,
                buckets: Vec::new(),
            };
        }
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for s in segments {
            lo = lo.min(s.a).min(s.b);
            hi = hi.max(s.a).max(s.b);
        }
        let nx = ((hi.x1 - lo.x1) / cell).floor() as usize + 1;
        let ny = ((hi.x2 - lo.x2) / cell).floor() as usize + 1;
        let mut grid = Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (id, s) in segments.iter().enumerate() {
            let (i0, j0) = grid.cell_of(s.a.min(s.b));
            let (i1, j1) = grid.cell_of(s.a.max(s.b));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    grid.buckets[j * nx + i].push(id);
                }
            }
        }
        grid
    }

    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let i = ((p.x1 - self.origin.x1) / self.cell).floor().clamp(0.0, (self.nx - 1) as f64);
        let j = ((p.x2 - self.origin.x2) / self.cell).floor().clamp(0.0, (self.ny - 1) as f64);
        (i as usize, j as usize)
    }

    /// Ids, in increasing order, of segments with a point within `radius` of `p`.
    pub fn within(&self, segments: &[Segment], p: Vec2, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.within_into(segments, p, radius, &mut out);
        out
    }

    /// Like [`within`](Self::within), reusing `out`.
    pub fn within_into(&self, segments: &[Segment], p: Vec2, radius: f64, out: &mut Vec<usize>) {
        out.clear();
        if self.buckets.is_empty() {
            return;
        }
        let lo = p - Vec2::new(radius, radius);
        let hi = p + Vec2::new(radius, radius);
        let end = self.origin + Vec2::new(self.nx as f64, self.ny as f64) * self.cell;
        if hi.x1 < self.origin.x1 || hi.x2 < self.origin.x2 || lo.x1 > end.x1 || lo.x2 > end.x2 {
            return;
        }
        let (i0, j0) = self.cell_of(lo);
        let (i1, j1) = self.cell_of(hi);
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &id in &self.buckets[j * self.nx + i] {
                    if segments[id].closest_point(p).0 <= radius {
                        out.push(id);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}
