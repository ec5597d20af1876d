//! Two-dimensional Wendland C2 kernel with support radius `2h`.

use std::f64::consts::PI;

use crate::geometry::Vec2;

/// Support radius in units of `h`.
pub const KAPPA: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub h: f64,
    pub alpha: f64,
}

impl KernelSpec {
    pub fn new(h: f64) -> Self {
        assert!(h > 0.0 && h.is_finite(), "smoothing length must be positive, got {h}");
        Self {
            h,
            alpha: 7.0 / (4.0 * PI * h * h),
        }
    }

    #[inline]
    pub fn support(&self) -> f64 {
        KAPPA * self.h
    }

    /// Kernel value at distance `r`.
    #[inline]
    pub fn w(&self, r: f64) -> f64 {
        let q = r / self.h;
        if q >= KAPPA {
            return 0.0;
        }
        let t = 1.0 - 0.5 * q;
        let t2 = t * t;
        self.alpha * t2 * t2 * (2.0 * q + 1.0)
    }

    /// dW/dq at `q = r / h`.
    #[inline]
    pub fn dw_dq(&self, q: f64) -> f64 {
        if q >= KAPPA {
            return 0.0;
        }
        let t = 1.0 - 0.5 * q;
        -5.0 * self.alpha * q * t * t * t
    }

    /// Gradient with respect to `x_a` of `W(|x_a - x_b|)`, given `d = x_a - x_b`.
    #[inline]
    pub fn grad_w(&self, d: Vec2) -> Vec2 {
        let r = d.norm();
        if r == 0.0 {
            return Vec2::ZERO;
        }
        d * (self.dw_dq(r / self.h) / (self.h * r))
    }

    /// Same as [`grad_w`](Self::grad_w) with `|d|` already known.
    #[inline]
    pub fn grad_w_r(&self, d: Vec2, r: f64) -> Vec2 {
        if r == 0.0 {
            return Vec2::ZERO;
        }
        d * (self.dw_dq(r / self.h) / (self.h * r))
    }

    /// `∫_0^r W(s) s ds`, the kernel mass inside radius `r` divided by 2π.
    pub fn radial_integral(&self, r: f64) -> f64 {
        let q = (r / self.h).min(KAPPA);
        self.alpha * self.h * self.h * q * q * radial_poly(q)
    }

    /// `radial_integral(r) / r²`, finite at `r = 0`.
    #[inline]
    pub fn radial_integral_over_r2(&self, r: f64) -> f64 {
        let q = r / self.h;
        if q >= KAPPA {
            return 1.0 / (2.0 * PI * r * r);
        }
        self.alpha * radial_poly(q)
    }
}

#[inline]
fn radial_poly(q: f64) -> f64 {
    // Antiderivative of (1 - 2.5q² + 2.5q³ - 0.9375q⁴ + 0.125q⁵) q, divided by q².
    let q2 = q * q;
    0.5 + q2 * (-0.625 + q * (0.5 + q * (-0.15625 + q * (0.125 / 7.0))))
}
