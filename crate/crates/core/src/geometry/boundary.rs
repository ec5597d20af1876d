use super::Vec2;
use super::GeometryError;

/// Role of a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    /// Solid wall, present during packing and during flow.
    Wall,
    /// Packing-only edge (e.g. a free surface), dropped before a flow run.
    Free,
}

/// A straight boundary element with its inward unit normal.
///
/// The fluid lies to the left of the directed edge `a -> b`, so the inward
/// normal is the direction rotated by +90 degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
    pub normal: Vec2,
    pub length: f64,
    pub loop_id: usize,
    pub centroid: Vec2,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2, loop_id: usize, kind: SegmentKind) -> Self {
        let d = b - a;
        let length = d.norm();
        Self {
            a,
            b,
            normal: (d / length).perp(),
            length,
            loop_id,
            centroid: (a + b) * 0.5,
            kind,
        }
    }

    /// Unit tangent from `a` to `b`.
    #[inline]
    pub fn direction(&self) -> Vec2 {
        -self.normal.perp()
    }

    /// Distance from `p` to the closest point of the segment, and that point.
    pub fn closest_point(&self, p: Vec2) -> (f64, Vec2) {
        let d = self.b - self.a;
        let t = ((p - self.a).dot(d) / d.norm_squared()).clamp(0.0, 1.0);
        let foot = if t == 1.0 { self.b } else { self.a + d * t };
        ((p - foot).norm(), foot)
    }
}

/// A closed polygonal loop. Edge `i` runs from `vertices[i]` to
/// `vertices[(i + 1) % n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    pub vertices: Vec<Vec2>,
    pub edge_kinds: Vec<SegmentKind>,
}

impl Loop {
    /// A loop whose edges are all walls.
    pub fn walls(vertices: Vec<Vec2>) -> Self {
        let edge_kinds = vec![SegmentKind::Wall; vertices.len()];
        Self {
            vertices,
            edge_kinds,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    /// Shoelace area: positive for counterclockwise loops.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut twice = 0.0;
        for i in 0..n {
            let (a, b) = self.edge(i);
            twice += a.cross(b);
        }
        0.5 * twice
    }

    /// Even-odd crossing test against this loop alone.
    fn crosses_ray(&self, p: Vec2) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let vi = self.vertices[i];
            let vj = self.vertices[j];
            // Half-open rule: the edge owns its lower endpoint.
            if (vi.x2 > p.x2) != (vj.x2 > p.x2) {
                let x_cross = vi.x1 + (p.x2 - vi.x2) * (vj.x1 - vi.x1) / (vj.x2 - vi.x2);
                if p.x1 < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

/// Axis-aligned bounding rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Vec2::new(f64::INFINITY, f64::INFINITY),
            max: Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn include(&mut self, p: Vec2) {
        self.min = self.min.min(p);
        self.max = self.max.max(p);
    }

    pub fn width(&self) -> f64 {
        self.max.x1 - self.min.x1
    }

    pub fn height(&self) -> f64 {
        self.max.x2 - self.min.x2
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x1 >= self.min.x1 && p.x1 <= self.max.x1 && p.x2 >= self.min.x2 && p.x2 <= self.max.x2
    }
}

/// Result of a nearest-boundary query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearestSegment {
    pub segment: usize,
    pub distance: f64,
    pub foot: Vec2,
}

/// Polygonal fluid-domain boundary: outer loops counterclockwise, holes
/// clockwise, decomposed into straight segments with inward normals.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySet {
    loops: Vec<Loop>,
    segments: Vec<Segment>,
    bbox: Aabb,
}

impl BoundarySet {
    /// Validates the loops and builds one segment per edge.
    pub fn from_loops(loops: Vec<Loop>) -> Result<Self, GeometryError> {
        let mut bbox = Aabb::empty();
        for (id, lp) in loops.iter().enumerate() {
            if lp.len() < 3 {
                return Err(GeometryError::TooFewVertices {
                    loop_id: id,
                    count: lp.len(),
                });
            }
            if lp.edge_kinds.len() != lp.len() {
                return Err(GeometryError::Malformed {
                    line: 0,
                    message: format!("loop {id}: edge kind count does not match vertex count"),
                });
            }
            for (i, v) in lp.vertices.iter().enumerate() {
                if !v.is_finite() {
                    return Err(GeometryError::NonFinite { loop_id: id, vertex: i });
                }
                bbox.include(*v);
            }
        }
        if loops.is_empty() {
            return Err(GeometryError::Empty);
        }

        let scale = bbox.width().max(bbox.height());
        for (id, lp) in loops.iter().enumerate() {
            for i in 0..lp.len() {
                let (a, b) = lp.edge(i);
                if (b - a).norm() <= 1e-14 * scale {
                    return Err(GeometryError::ZeroLengthEdge { loop_id: id, edge: i });
                }
            }
        }

        check_intersections(&loops)?;
        check_orientation(&loops)?;

        let mut segments = Vec::new();
        for (id, lp) in loops.iter().enumerate() {
            for i in 0..lp.len() {
                let (a, b) = lp.edge(i);
                segments.push(Segment::new(a, b, id, lp.edge_kinds[i]));
            }
        }
        Ok(Self {
            loops,
            segments,
            bbox,
        })
    }

    /// Parses the plain-text boundary format.
    ///
    /// ```text
    /// # comment
    /// loop 4
    /// 0 0
    /// 1 0
    /// 1 1 free
    /// 0 1
    /// ```
    ///
    /// A trailing `free` on a vertex line marks the edge leaving that vertex
    /// as packing-only.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut loops = Vec::new();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        while let Some((line_no, line)) = lines.next() {
            let mut tokens = line.split_whitespace();
            if tokens.next() != Some("loop") {
                return Err(malformed(line_no, format!("expected `loop <n>`, found `{line}`")));
            }
            let n: usize = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| malformed(line_no, "`loop` needs a vertex count".into()))?;
            if tokens.next().is_some() {
                return Err(malformed(line_no, "trailing tokens after vertex count".into()));
            }
            let mut vertices = Vec::with_capacity(n);
            let mut edge_kinds = Vec::with_capacity(n);
            for _ in 0..n {
                let (vline_no, vline) = lines
                    .next()
                    .ok_or_else(|| malformed(line_no, format!("loop declares {n} vertices but the file ends early")))?;
                let mut tokens = vline.split_whitespace();
                let mut coord = |what: &str| -> Result<f64, GeometryError> {
                    tokens
                        .next()
                        .ok_or_else(|| malformed(vline_no, format!("missing {what}")))?
                        .parse::<f64>()
                        .map_err(|e| malformed(vline_no, format!("bad {what}: {e}")))
                };
                let x1 = coord("x1")?;
                let x2 = coord("x2")?;
                let kind = match tokens.next() {
                    None => SegmentKind::Wall,
                    Some("free") => SegmentKind::Free,
                    Some(other) => {
                        return Err(malformed(vline_no, format!("unexpected token `{other}`")));
                    }
                };
                if tokens.next().is_some() {
                    return Err(malformed(vline_no, "too many tokens on vertex line".into()));
                }
                vertices.push(Vec2::new(x1, x2));
                edge_kinds.push(kind);
            }
            loops.push(Loop {
                vertices,
                edge_kinds,
            });
        }
        Self::from_loops(loops)
    }

    /// Serializes the loops back into the text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for lp in &self.loops {
            out.push_str(&format!("loop {}\n", lp.len()));
            for (v, kind) in lp.vertices.iter().zip(&lp.edge_kinds) {
                match kind {
                    SegmentKind::Wall => out.push_str(&format!("{} {}\n", v.x1, v.x2)),
                    SegmentKind::Free => out.push_str(&format!("{} {} free\n", v.x1, v.x2)),
                }
            }
        }
        out
    }

    /// Splits every segment of length `L` into `floor(L / dx_r) + 1` equal
    /// pieces, so each piece is strictly shorter than `dx_r`.
    pub fn refined(&self, dx_r: f64) -> BoundarySet {
        assert!(dx_r > 0.0, "refinement spacing must be positive");
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let k = (s.length / dx_r).floor() as usize + 1;
            if k == 1 {
                segments.push(*s);
                continue;
            }
            let d = s.b - s.a;
            for i in 0..k {
                let p0 = if i == 0 { s.a } else { s.a + d * (i as f64 / k as f64) };
                let p1 = if i + 1 == k { s.b } else { s.a + d * ((i + 1) as f64 / k as f64) };
                segments.push(Segment {
                    a: p0,
                    b: p1,
                    normal: s.normal,
                    length: (p1 - p0).norm(),
                    loop_id: s.loop_id,
                    centroid: (p0 + p1) * 0.5,
                    kind: s.kind,
                });
            }
        }
        BoundarySet {
            loops: self.loops.clone(),
            segments,
            bbox: self.bbox,
        }
    }

    /// Copy without the packing-only segments. The loops are kept, so
    /// containment queries still describe the closed fluid region.
    pub fn walls_only(&self) -> BoundarySet {
        BoundarySet {
            loops: self.loops.clone(),
            segments: self
                .segments
                .iter()
                .filter(|s| s.kind == SegmentKind::Wall)
                .copied()
                .collect(),
            bbox: self.bbox,
        }
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// True iff `p` lies in the fluid region: inside an outer loop and
    /// outside every hole. Points exactly on an edge follow the half-open
    /// crossing rule.
    pub fn contains(&self, p: Vec2) -> bool {
        if !self.bbox.contains(p) {
            return false;
        }
        self.loops.iter().fold(false, |inside, lp| inside ^ lp.crosses_ray(p))
    }

    /// Closest segment to `p`; ties go to the lowest segment id.
    pub fn nearest(&self, p: Vec2) -> Option<NearestSegment> {
        let mut best: Option<NearestSegment> = None;
        for (id, s) in self.segments.iter().enumerate() {
            let (distance, foot) = s.closest_point(p);
            if best.is_none_or(|b| distance < b.distance) {
                best = Some(NearestSegment {
                    segment: id,
                    distance,
                    foot,
                });
            }
        }
        best
    }
}

/// Parses boundary-file text into a validated [`BoundarySet`].
pub fn parse_boundary(text: &str) -> Result<BoundarySet, GeometryError> {
    BoundarySet::parse(text)
}

fn malformed(line: usize, message: String) -> GeometryError {
    GeometryError::Malformed { line, message }
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x1 >= a.x1.min(b.x1) && p.x1 <= a.x1.max(b.x1) && p.x2 >= a.x2.min(b.x2) && p.x2 <= a.x2.max(b.x2)
}

/// Closed-segment intersection test (touching counts).
pub(crate) fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn check_intersections(loops: &[Loop]) -> Result<(), GeometryError> {
    let edges: Vec<(usize, usize, Vec2, Vec2)> = loops
        .iter()
        .enumerate()
        .flat_map(|(id, lp)| (0..lp.len()).map(move |i| (id, i, lp.edge(i).0, lp.edge(i).1)))
        .collect();
    for (m, &(la, ia, a0, a1)) in edges.iter().enumerate() {
        for &(lb, ib, b0, b1) in &edges[m + 1..] {
            if la == lb {
                let n = loops[la].len();
                let adjacent = ib == ia + 1 || (ia == 0 && ib == n - 1);
                if adjacent {
                    // Adjacent edges share a vertex; they only intersect if
                    // they fold back onto each other.
                    let (u, v) = (a1 - a0, b1 - b0);
                    if u.cross(v) == 0.0 && u.dot(v) < 0.0 {
                        return Err(GeometryError::SelfIntersection {
                            loop_a: la,
                            edge_a: ia,
                            loop_b: lb,
                            edge_b: ib,
                        });
                    }
                    continue;
                }
            }
            if segments_intersect(a0, a1, b0, b1) {
                return Err(GeometryError::SelfIntersection {
                    loop_a: la,
                    edge_a: ia,
                    loop_b: lb,
                    edge_b: ib,
                });
            }
        }
    }
    Ok(())
}

/// Loops nested at even depth must be counterclockwise, odd depth clockwise.
fn check_orientation(loops: &[Loop]) -> Result<(), GeometryError> {
    for (i, lp) in loops.iter().enumerate() {
        let probe = lp.vertices[0];
        let depth = loops
            .iter()
            .enumerate()
            .filter(|(j, other)| *j != i && other.crosses_ray(probe))
            .count();
        let area = lp.signed_area();
        let expect_ccw = depth % 2 == 0;
        if (expect_ccw && area <= 0.0) || (!expect_ccw && area >= 0.0) {
            return Err(GeometryError::Orientation {
                loop_id: i,
                signed_area: area,
                hole: !expect_ccw,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT_SQUARE: &str = "loop 4\n0 0\n1 0\n1 1\n0 1\n";

    fn square_with_hole() -> BoundarySet {
        BoundarySet::parse(
            "# outer\nloop 4\n0 0\n1 0\n1 1\n0 1\n# hole, clockwise\nloop 4\n0.4 0.4\n0.4 0.6\n0.6 0.6\n0.6 0.4\n",
        )
        .unwrap()
    }

    #[test]
    fn unit_square_has_inward_normals() {
        let b = BoundarySet::parse(UNIT_SQUARE).unwrap();
        assert_eq!(b.segments().len(), 4);
        assert_eq!(b.segments()[0].normal, Vec2::new(0.0, 1.0));
        assert_eq!(b.segments()[1].normal, Vec2::new(-1.0, 0.0));
        assert_eq!(b.bbox().min, Vec2::new(0.0, 0.0));
        assert_eq!(b.bbox().max, Vec2::new(1.0, 1.0));
    }

    #[test]
    fn hole_normals_point_into_fluid() {
        let b = square_with_hole();
        assert_eq!(b.segments().len(), 8);
        for s in &b.segments()[4..] {
            // A point just off the edge along the normal must be fluid.
            let probe = s.centroid + s.normal * 0.01;
            assert!(b.contains(probe), "normal of hole edge {:?} points into the hole", s);
            let inside_hole = s.centroid - s.normal * 0.01;
            assert!(!b.contains(inside_hole));
        }
    }

    #[test]
    fn crlf_and_comments_are_tolerated() {
        let b = BoundarySet::parse("# square\r\nloop 4\r\n0 0\r\n1 0\r\n1 1\r\n0 1\r\n").unwrap();
        assert_eq!(b.segments().len(), 4);
    }

    #[test]
    fn two_vertex_loop_is_rejected() {
        let err = BoundarySet::parse("loop 2\n0 0\n1 0\n").unwrap_err();
        assert!(matches!(err, GeometryError::TooFewVertices { count: 2, .. }));
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matches!(BoundarySet::parse("polygon 3\n"), Err(GeometryError::Malformed { line: 1, .. })));
        assert!(matches!(BoundarySet::parse("loop 3\n0 0\n1 0\n"), Err(GeometryError::Malformed { .. })));
        assert!(matches!(BoundarySet::parse("loop 3\n0 0\n1 x\n0 1\n"), Err(GeometryError::Malformed { line: 3, .. })));
        assert!(matches!(BoundarySet::parse(""), Err(GeometryError::Empty)));
    }

    #[test]
    fn zero_length_edge_is_rejected() {
        let err = BoundarySet::parse("loop 4\n0 0\n1 0\n1 0\n0 1\n").unwrap_err();
        assert!(matches!(err, GeometryError::ZeroLengthEdge { edge: 1, .. }));
    }

    #[test]
    fn bow_tie_is_rejected() {
        let err = BoundarySet::parse("loop 4\n0 0\n1 1\n1 0\n0 1\n").unwrap_err();
        assert!(matches!(err, GeometryError::SelfIntersection { .. }));
    }

    #[test]
    fn clockwise_outer_loop_is_rejected() {
        let err = BoundarySet::parse("loop 4\n0 0\n0 1\n1 1\n1 0\n").unwrap_err();
        assert!(matches!(err, GeometryError::Orientation { hole: false, .. }));
    }

    #[test]
    fn counterclockwise_hole_is_rejected() {
        let err = BoundarySet::parse("loop 4\n0 0\n1 0\n1 1\n0 1\nloop 4\n0.4 0.4\n0.6 0.4\n0.6 0.6\n0.4 0.6\n")
            .unwrap_err();
        assert!(matches!(err, GeometryError::Orientation { loop_id: 1, hole: true, .. }));
    }

    #[test]
    fn signed_areas_follow_nesting() {
        let b = square_with_hole();
        assert!(b.loops()[0].signed_area() > 0.0);
        assert!(b.loops()[1].signed_area() < 0.0);
    }

    #[test]
    fn refinement_split_counts() {
        let seg = |len: f64| {
            BoundarySet::parse(&format!("loop 3\n0 0\n{len} 0\n0 {len}\n")).unwrap()
        };
        let b = seg(0.05).refined(0.02);
        let bottom: Vec<_> = b.segments().iter().filter(|s| s.normal == Vec2::new(0.0, 1.0)).collect();
        assert_eq!(bottom.len(), 3);
        for s in &bottom {
            assert!((s.length - 0.05 / 3.0).abs() < 1e-15);
        }

        let b = seg(0.02).refined(0.02);
        let bottom = b.segments().iter().filter(|s| s.normal == Vec2::new(0.0, 1.0)).count();
        assert_eq!(bottom, 2);

        let b = seg(0.01).refined(0.02);
        let bottom = b.segments().iter().filter(|s| s.normal == Vec2::new(0.0, 1.0)).count();
        assert_eq!(bottom, 1);
    }

    #[test]
    fn refinement_keeps_length_and_normals() {
        let b = square_with_hole();
        let r = b.refined(0.03);
        assert!(r.segments().iter().all(|s| s.length < 0.03));
        let rel = (r.total_length() - b.total_length()).abs() / b.total_length();
        assert!(rel < 1e-12);
        for s in r.segments() {
            let parent = b
                .segments()
                .iter()
                .find(|p| p.loop_id == s.loop_id && p.normal == s.normal)
                .expect("subsegment normal must equal a parent normal exactly");
            assert_eq!(parent.kind, s.kind);
        }
    }

    #[test]
    fn containment_examples() {
        let b = BoundarySet::parse(UNIT_SQUARE).unwrap();
        assert!(b.contains(Vec2::new(0.5, 0.5)));
        assert!(!b.contains(Vec2::new(2.0, 2.0)));
        assert!(!square_with_hole().contains(Vec2::new(0.5, 0.5)));
        assert!(square_with_hole().contains(Vec2::new(0.2, 0.5)));
    }

    #[test]
    fn containment_on_edges_is_deterministic() {
        let b = BoundarySet::parse(UNIT_SQUARE).unwrap();
        // Bottom edge and left edge are owned by the region, top and right are not.
        assert!(b.contains(Vec2::new(0.5, 0.0)));
        assert!(b.contains(Vec2::new(0.0, 0.5)));
        assert!(!b.contains(Vec2::new(0.5, 1.0)));
        assert!(!b.contains(Vec2::new(1.0, 0.5)));
        assert_eq!(b.contains(Vec2::new(0.0, 0.0)), b.contains(Vec2::new(0.0, 0.0)));
    }

    #[test]
    fn nearest_boundary_examples() {
        let b = BoundarySet::parse(UNIT_SQUARE).unwrap();
        let n = b.nearest(Vec2::new(0.5, 0.1)).unwrap();
        assert_eq!(n.segment, 0);
        assert!((n.distance - 0.1).abs() < 1e-15);
        assert_eq!(n.foot, Vec2::new(0.5, 0.0));

        // Equidistant from bottom (id 0) and left (id 3) edges.
        let n = b.nearest(Vec2::new(0.1, 0.1)).unwrap();
        assert_eq!(n.segment, 0);
        assert!((n.distance - 0.1).abs() < 1e-15);

        let n = b.nearest(Vec2::new(1.0, 1.0)).unwrap();
        assert_eq!(n.distance, 0.0);
    }

    #[test]
    fn text_round_trip_keeps_free_edges() {
        let text = "loop 4\n0 0\n1 0\n1 1 free\n0 1\n";
        let b = BoundarySet::parse(text).unwrap();
        assert_eq!(b.segments()[2].kind, SegmentKind::Free);
        assert_eq!(b.walls_only().segments().len(), 3);
        let again = BoundarySet::parse(&b.to_text()).unwrap();
        assert_eq!(again, b);
    }
}
