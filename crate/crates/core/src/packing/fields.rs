//! Per-particle concentration, corrected gradients and shifting laws.

use crate::geometry::{Segment, Vec2};
use crate::kernel::KernelSpec;
use crate::neighbors::Neighbor;

/// `C_a = (V_a W(0) + Σ_b V_b W_ab) / γ_a`.
pub fn concentration(neighbors: &[Neighbor], volume: f64, gamma: f64, kernel: &KernelSpec) -> f64 {
    let mut sum = kernel.w(0.0) * volume;
    for n in neighbors {
        sum += kernel.w(n.dist) * volume;
    }
    sum / gamma
}

/// Boundary-integral gradient of a field `f`:
/// `(1/γ_a)(Σ_b f_b ∇_a W_ab V_b - Σ_s f_s ∇γ_as)`.
///
/// `f_b` is evaluated at neighbor ids and `f_s` at segment ids.
pub fn corrected_gradient<Fb, Fs>(
    neighbors: &[Neighbor],
    volume: f64,
    gamma: f64,
    wall: &[(usize, Vec2)],
    f_b: Fb,
    f_s: Fs,
    kernel: &KernelSpec,
) -> Vec2
where
    Fb: Fn(usize) -> f64,
    Fs: Fn(usize) -> f64,
{
    let mut particles = Vec2::ZERO;
    for n in neighbors {
        particles += kernel.grad_w_r(n.disp, n.dist) * (f_b(n.id) * volume);
    }
    let mut boundary = Vec2::ZERO;
    for &(s, g) in wall {
        boundary += g * f_s(s);
    }
    (particles - boundary) / gamma
}

/// `∇C_a`: the corrected gradient of the unit field.
pub fn concentration_gradient(
    neighbors: &[Neighbor],
    volume: f64,
    gamma: f64,
    wall: &[(usize, Vec2)],
    kernel: &KernelSpec,
) -> Vec2 {
    corrected_gradient(neighbors, volume, gamma, wall, |_| 1.0, |_| 1.0, kernel)
}

/// Scales `v` down to length `cap` when it is not already shorter.
pub fn cap_shift(v: Vec2, cap: f64) -> Vec2 {
    let n = v.norm();
    if n < cap {
        return v;
    }
    let mut out = v * (cap / n);
    while out.norm() > cap {
        out = out * (1.0 - f64::EPSILON);
    }
    out
}

/// Shift down the concentration gradient, `-D ∇C`, capped.
pub fn shift_plain(grad_c: Vec2, diffusion: f64, cap: f64) -> Vec2 {
    cap_shift(grad_c * -diffusion, cap)
}

/// Step-pressure wall term `½ (p_s/p_a - 1) ∇γ_as`: half of `∇γ_as` when the
/// particle is closer than `dx/2` to the segment centroid along the normal,
/// zero otherwise.
pub fn boundary_force_term(x: Vec2, s: &Segment, grad_gamma: Vec2, dx: f64) -> Vec2 {
    if (x - s.centroid).dot(s.normal).abs() < 0.5 * dx {
        grad_gamma * 0.5
    } else {
        Vec2::ZERO
    }
}

/// Shift with the wall step force,
/// `-D [∇C_a - (1/γ_a) Σ_s ½ (p_s/p_a - 1) ∇γ_as]`, capped.
pub fn shift_forced(
    x: Vec2,
    grad_c: Vec2,
    gamma: f64,
    wall: &[(usize, Vec2)],
    segments: &[Segment],
    dx: f64,
    diffusion: f64,
    cap: f64,
) -> Vec2 {
    let mut force = Vec2::ZERO;
    for &(s, g) in wall {
        force += boundary_force_term(x, &segments[s], g, dx);
    }
    cap_shift((grad_c - force / gamma) * -diffusion, cap)
}
