//! Free-surface elliptical drop: reference solution and boundary fitting.
//!
//! With `v1 = A x1`, `v2 = -A x2` and zero pressure on the ellipse with
//! semi-axes `a` (along `x1`) and `b`, the Euler equations close on
//! `ȧ = A a`, `ḃ = -A b`, `Ȧ = A² (b² - a²)/(a² + b²)`. Writing
//! `a = R0 eˢ`, `b = R0 e⁻ˢ` keeps `a b = R0²` by construction and reduces
//! the system to `ṡ = A`, `Ȧ = -A² tanh 2s`.

use crate::geometry::Vec2;
use crate::quadrature;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DropAxes {
    /// Semi-axis along `x1`.
    pub a: f64,
    /// Semi-axis along `x2`.
    pub b: f64,
    /// Strain rate.
    pub big_a: f64,
}

impl DropAxes {
    fn from_log(r0: f64, s: f64, big_a: f64) -> Self {
        Self {
            a: r0 * s.exp(),
            b: r0 * (-s).exp(),
            big_a,
        }
    }

    /// Distance from the center to the ellipse along direction `theta`.
    pub fn radius_at(&self, theta: f64) -> f64 {
        let (sin, cos) = theta.sin_cos();
        self.a * self.b / ((self.b * cos).powi(2) + (self.a * sin).powi(2)).sqrt()
    }
}

fn rk4(s: f64, big_a: f64, dt: f64, steps: usize) -> (f64, f64) {
    let f = |s: f64, a: f64| (a, -a * a * (2.0 * s).tanh());
    let (mut s, mut a) = (s, big_a);
    for _ in 0..steps {
        let k1 = f(s, a);
        let k2 = f(s + 0.5 * dt * k1.0, a + 0.5 * dt * k1.1);
        let k3 = f(s + 0.5 * dt * k2.0, a + 0.5 * dt * k2.1);
        let k4 = f(s + dt * k3.0, a + dt * k3.1);
        s += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        a += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (s, a)
}

/// Drop axes at time `t` by classical Runge-Kutta, halving the step until
/// the result moves by less than `1e-12`.
pub fn drop_oracle(a0: f64, r0: f64, t: f64) -> DropAxes {
    assert!(r0 > 0.0 && t >= 0.0);
    if t == 0.0 || a0 == 0.0 {
        return DropAxes::from_log(r0, 0.0, a0);
    }
    let mut steps = 256;
    let mut prev = rk4(0.0, a0, t / steps as f64, steps);
    loop {
        steps *= 2;
        let next = rk4(0.0, a0, t / steps as f64, steps);
        let moved = (next.0 - prev.0).abs().max((next.1 - prev.1).abs() / a0.abs());
        prev = next;
        if moved < 1e-12 || steps >= 1 << 22 {
            return DropAxes::from_log(r0, prev.0, prev.1);
        }
    }
}

/// Independent reference from kinetic energy conservation:
/// `A² (a² + b²)` is constant, so `A = A0 / √cosh 2s` and
/// `t(s) = ∫_0^s √cosh 2u du / A0`, inverted by bisection.
pub fn drop_oracle_by_quadrature(a0: f64, r0: f64, t: f64) -> DropAxes {
    assert!(r0 > 0.0 && t >= 0.0);
    if t == 0.0 || a0 == 0.0 {
        return DropAxes::from_log(r0, 0.0, a0);
    }
    let time_to = |s: f64| quadrature::adaptive(&|u: f64| (2.0 * u).cosh().sqrt(), 0.0, s, 1e-14, 1e-16) / a0.abs();
    // ṡ ≤ |A0|, so s lies within |A0| t of zero.
    let (mut lo, mut hi) = (0.0, a0.abs() * t);
    while hi - lo > 1e-15 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if time_to(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi) * a0.signum();
    DropAxes::from_log(r0, s, a0 / (2.0 * s).cosh().sqrt())
}

/// Least-squares fit of `x1²/a² + x2²/b² = 1` (axis-aligned, centered at the
/// origin). Returns `(a, b)`.
pub fn fit_ellipse(points: &[Vec2]) -> (f64, f64) {
    let (mut s40, mut s22, mut s04, mut s20, mut s02) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let (x2, y2) = (p.x1 * p.x1, p.x2 * p.x2);
        s40 += x2 * x2;
        s22 += x2 * y2;
        s04 += y2 * y2;
        s20 += x2;
        s02 += y2;
    }
    let det = s40 * s04 - s22 * s22;
    let u = (s20 * s04 - s02 * s22) / det;
    let v = (s40 * s02 - s22 * s20) / det;
    (1.0 / u.sqrt(), 1.0 / v.sqrt())
}
