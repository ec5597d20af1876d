//! Wall renormalization: the kernel mass `γ` inside the fluid and the
//! per-segment boundary integrals `∇γ_as = ∫_s W n̂_s dS`.
//!
//! `γ` is evaluated in polar form around the particle. Each ray from the
//! particle leaves (or re-enters) the fluid where it crosses a segment, and
//! the kernel mass beyond the crossing is `1/2π - G(r)` with
//! `G(r) = ∫_0^r W s ds`. Gathering the crossings segment by segment turns
//! the angular integral into a line integral along each segment, so ray
//! crossings are located exactly instead of by sampling.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{BoundarySet, Segment, SegmentGrid, Vec2};
use crate::kernel::KernelSpec;
use crate::quadrature::{self, GaussLegendre};

const REL_TOL: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WallError {
    #[error("point {0} lies outside the fluid domain")]
    OutsideDomain(Vec2),
}

/// `γ` at a point together with the nonzero per-segment gradients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GammaResult {
    pub gamma: f64,
    /// `(segment id, ∇γ_as)` in increasing id order.
    pub grad: Vec<(usize, Vec2)>,
}

impl GammaResult {
    pub fn grad_sum(&self) -> Vec2 {
        self.grad.iter().fold(Vec2::ZERO, |acc, (_, g)| acc + *g)
    }
}

/// Segment geometry seen from a point: signed normal distance `d` (positive
/// on the fluid side) and the tangential interval `[t0, t1]`, measured from
/// the foot of the perpendicular and clipped to the kernel support.
struct Chord {
    d: f64,
    t0: f64,
    t1: f64,
}

fn chord(x: Vec2, s: &Segment, k: &KernelSpec) -> Option<Chord> {
    let rel = x - s.a;
    let d = rel.dot(s.normal);
    let support = k.support();
    if d.abs() >= support {
        return None;
    }
    let u = s.direction();
    let ta = -rel.dot(u);
    let tb = ta + s.length;
    let half = (support * support - d * d).sqrt();
    let t0 = ta.max(-half);
    let t1 = tb.min(half);
    if t0 >= t1 {
        return None;
    }
    Some(Chord { d, t0, t1 })
}

/// `∫_{t0}^{t1} f(t) dt`, split at the foot point so each piece is smooth.
fn split_integral<F: Fn(f64) -> f64>(f: F, t0: f64, t1: f64, rule: Option<&GaussLegendre>, abs_tol: f64) -> f64 {
    let pieces: [(f64, f64); 2] = if t0 < 0.0 && t1 > 0.0 { [(t0, 0.0), (0.0, t1)] } else { [(t0, t1), (0.0, 0.0)] };
    pieces
        .iter()
        .filter(|(a, b)| b > a)
        .map(|&(a, b)| match rule {
            Some(r) => r.integrate(&f, a, b),
            None => quadrature::adaptive(&f, a, b, REL_TOL, abs_tol),
        })
        .sum()
}

fn grad_gamma_segment_impl(x: Vec2, s: &Segment, k: &KernelSpec, rule: Option<&GaussLegendre>) -> Vec2 {
    let Some(c) = chord(x, s, k) else {
        return Vec2::ZERO;
    };
    let d2 = c.d * c.d;
    let abs_tol = 1e-15 * k.alpha * k.h;
    let line = split_integral(|t| k.w((d2 + t * t).sqrt()), c.t0, c.t1, rule, abs_tol);
    s.normal * line
}

/// `∫_s W(|x - x'|) n̂_s dS'` over the part of `s` inside the support of `x`.
pub fn grad_gamma_segment(x: Vec2, s: &Segment, k: &KernelSpec) -> Vec2 {
    grad_gamma_segment_impl(x, s, k, None)
}

/// Same integral with a single fixed Gauss-Legendre rule on each side of the
/// foot point, for convergence checks.
pub fn grad_gamma_segment_fixed(x: Vec2, s: &Segment, k: &KernelSpec, rule: &GaussLegendre) -> Vec2 {
    grad_gamma_segment_impl(x, s, k, Some(rule))
}

/// Kernel mass beyond segment `s`, as seen from `x`, over the rays that
/// cross it inside the support. `segments[ids]` are the candidates near `x`,
/// needed to resolve a point sitting exactly on a vertex.
fn deficit(x: Vec2, s: &Segment, segments: &[Segment], ids: &[usize], k: &KernelSpec) -> f64 {
    let Some(c) = chord(x, s, k) else {
        return 0.0;
    };
    let eps = 1e-12 * k.h;
    if c.d.abs() > eps {
        let dtheta = (c.t1 / c.d).atan() - (c.t0 / c.d).atan();
        let d2 = c.d * c.d;
        let abs_tol = 1e-16 * k.alpha;
        let line = split_integral(
            |t| k.radial_integral_over_r2((d2 + t * t).sqrt()),
            c.t0,
            c.t1,
            None,
            abs_tol,
        );
        return dtheta / (2.0 * PI) - c.d * line;
    }

    // The point lies on the line through s.
    if (x - s.a).norm() <= eps {
        let incoming = ids.iter().map(|&i| &segments[i]).find(|o| (o.b - x).norm() <= eps);
        return match incoming {
            Some(o) => {
                let (u_in, u_out) = (o.direction(), s.direction());
                let turn = u_in.cross(u_out).atan2(u_in.dot(u_out));
                (PI + turn) / (2.0 * PI)
            }
            None => 0.25,
        };
    }
    if (x - s.b).norm() <= eps {
        let outgoing = ids.iter().any(|&i| (segments[i].a - x).norm() <= eps);
        return if outgoing { 0.0 } else { 0.25 };
    }
    if c.t0 < 0.0 && c.t1 > 0.0 {
        0.5
    } else {
        0.0
    }
}

fn gamma_from(x: Vec2, segments: &[Segment], ids: &[usize], k: &KernelSpec) -> f64 {
    let mut missing = 0.0;
    for &i in ids {
        missing += deficit(x, &segments[i], segments, ids, k);
    }
    (1.0 - missing).min(1.0)
}

fn near_ids(x: Vec2, b: &BoundarySet, k: &KernelSpec) -> Vec<usize> {
    let support = k.support();
    (0..b.segments().len())
        .filter(|&i| b.segments()[i].closest_point(x).0 < support)
        .collect()
}

/// `γ(x) = ∫_{Ω ∩ support} W(|x - x'|) dV'`. Exactly 1 when no segment is
/// closer than `2h`.
pub fn gamma(x: Vec2, b: &BoundarySet, k: &KernelSpec) -> Result<f64, WallError> {
    if !b.contains(x) {
        return Err(WallError::OutsideDomain(x));
    }
    let ids = near_ids(x, b, k);
    if ids.is_empty() {
        return Ok(1.0);
    }
    Ok(gamma_from(x, b.segments(), &ids, k))
}

/// `γ` and every nonzero `∇γ_as` at `x`.
pub fn gamma_result(x: Vec2, b: &BoundarySet, k: &KernelSpec) -> Result<GammaResult, WallError> {
    if !b.contains(x) {
        return Err(WallError::OutsideDomain(x));
    }
    let ids = near_ids(x, b, k);
    Ok(terms_from(x, b.segments(), &ids, k))
}

fn terms_from(x: Vec2, segments: &[Segment], ids: &[usize], k: &KernelSpec) -> GammaResult {
    if ids.is_empty() {
        return GammaResult {
            gamma: 1.0,
            grad: Vec::new(),
        };
    }
    let grad = ids
        .iter()
        .map(|&i| (i, grad_gamma_segment(x, &segments[i], k)))
        .filter(|(_, g)| *g != Vec2::ZERO)
        .collect();
    GammaResult {
        gamma: gamma_from(x, segments, ids, k),
        grad,
    }
}

/// `γ` of a point at distance `d` from an infinite straight wall, by nested
/// quadrature of the kernel's one-dimensional marginal.
pub fn gamma_halfplane(d: f64, k: &KernelSpec) -> f64 {
    assert!(d >= 0.0, "distance must be nonnegative");
    let support = k.support();
    if d >= support {
        return 1.0;
    }
    let marginal = |y: f64| {
        let half = (support * support - y * y).max(0.0).sqrt();
        2.0 * quadrature::adaptive(&|x: f64| k.w((x * x + y * y).sqrt()), 0.0, half, 1e-13, 1e-18 * k.alpha * k.h)
    };
    (0.5 + quadrature::adaptive(&marginal, 0.0, d, 1e-13, 1e-18)).min(1.0)
}

/// Wall terms for many points against one segment set, with a bucket grid
/// limiting each query to segments inside the support.
#[derive(Clone, Debug)]
pub struct WallIntegrator<'a> {
    segments: &'a [Segment],
    grid: SegmentGrid,
    kernel: KernelSpec,
}

impl<'a> WallIntegrator<'a> {
    pub fn new(segments: &'a [Segment], kernel: KernelSpec) -> Self {
        Self {
            segments,
            grid: SegmentGrid::new(segments, kernel.support()),
            kernel,
        }
    }

    pub fn segments(&self) -> &'a [Segment] {
        self.segments
    }

    /// Ids of segments strictly closer than `2h` to `x`.
    pub fn near(&self, x: Vec2) -> Vec<usize> {
        let mut ids = self.grid.within(self.segments, x, self.kernel.support());
        ids.retain(|&i| self.segments[i].closest_point(x).0 < self.kernel.support());
        ids
    }

    /// `γ` and `∇γ_as` at `x`. The caller guarantees `x` is in the fluid.
    pub fn terms(&self, x: Vec2) -> GammaResult {
        terms_from(x, self.segments, &self.near(x), &self.kernel)
    }

    pub fn gamma(&self, x: Vec2) -> f64 {
        let ids = self.near(x);
        if ids.is_empty() {
            return 1.0;
        }
        gamma_from(x, self.segments, &ids, &self.kernel)
    }
}
