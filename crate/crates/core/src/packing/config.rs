use super::PackingError;

/// Packing parameters. Lengths in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PackingConfig {
    /// Particle spacing `dx_r`.
    pub dx: f64,
    /// Smoothing length.
    pub h: f64,
    /// Shifting coefficient; the diffusion constant is `D = J h²`.
    pub j: f64,
    /// Freeze distance: particles with `γ` below that of a point this far
    /// from a straight wall are frozen after Step 2a.
    pub k_b: f64,
    /// Relative change between consecutive windows that ends a phase.
    pub tol: f64,
    pub window: usize,
    /// Iterations a phase runs before the stopping test applies.
    pub min_iters: usize,
    pub max_iters_2a: usize,
    pub max_iters_2c: usize,
}

impl PackingConfig {
    /// Defaults for spacing `dx` and `h = h_ratio * dx`.
    pub fn new(dx: f64, h_ratio: f64) -> Self {
        Self {
            dx,
            h: h_ratio * dx,
            j: 0.5,
            k_b: 0.6 * dx,
            tol: 0.01,
            window: 50,
            min_iters: 200,
            max_iters_2a: 20_000,
            max_iters_2c: 40_000,
        }
    }

    pub fn diffusion(&self) -> f64 {
        self.j * self.h * self.h
    }

    /// Largest displacement applied to a particle in one iteration.
    pub fn cap(&self) -> f64 {
        0.5 * self.dx
    }

    /// Width of the packable band in Step 2a.
    pub fn k_a(&self) -> f64 {
        crate::kernel::KAPPA * self.h
    }

    pub fn validate(&self) -> Result<(), PackingError> {
        let bad = |m: String| Err(PackingError::InvalidConfig(m));
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return bad(format!("dx must be positive, got {}", self.dx));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("h must be positive, got {}", self.h));
        }
        if !(self.j > 0.0 && self.j.is_finite()) {
            return bad(format!("J must be positive, got {}", self.j));
        }
        if !(self.k_b > 0.5 * self.dx && self.k_b < self.k_a()) {
            return bad(format!("k_b = {} must lie in (0.5 dx, 2h)", self.k_b));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if self.window == 0 {
            return bad("window must be at least 1".into());
        }
        Ok(())
    }
}

/// Relative change of the metric mean between the last two windows, or
/// `None` while fewer than `max(min_iters, 2 * window)` values exist.
pub fn window_change(series: &[f64], window: usize, min_iters: usize) -> Option<f64> {
    let n = series.len();
    if n < min_iters.max(2 * window) {
        return None;
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let m1 = mean(&series[n - 2 * window..n - window]);
    let m2 = mean(&series[n - window..]);
    if m1 == m2 {
        return Some(0.0);
    }
    if m1 == 0.0 {
        return Some(f64::INFINITY);
    }
    Some(((m2 - m1) / m1).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PackingConfig::new(0.02, 2.0);
        assert_eq!(c.h, 0.04);
        assert_eq!(c.j, 0.5);
        assert!((c.diffusion() - 0.5 * 0.04 * 0.04).abs() < 1e-18);
        assert_eq!(c.cap(), 0.01);
        assert_eq!(c.k_a(), 0.08);
        assert!((c.k_b - 0.012).abs() < 1e-15);
        assert!(c.validate().is_ok());
        let mut bad = c;
        bad.tol = 1.5;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn window_rule() {
        assert_eq!(window_change(&[1.0; 199], 50, 200), None);
        assert_eq!(window_change(&[1.0; 200], 50, 200), Some(0.0));
        assert_eq!(window_change(&[0.0; 200], 50, 200), Some(0.0));
        let mut s = vec![0.0; 150];
        s.extend([1.0; 50]);
        assert_eq!(window_change(&s, 50, 200), Some(f64::INFINITY));
        let mut s = vec![2.0; 150];
        s.extend([2.02; 50]);
        let r = window_change(&s, 50, 200).unwrap();
        assert!((r - 0.01).abs() < 1e-12);
        // Only the last two windows count.
        let mut s = vec![100.0; 100];
        s.extend([1.0; 100]);
        assert_eq!(window_change(&s, 50, 100), Some(0.0));
    }
}
