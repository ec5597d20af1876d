use crate::geometry::Vec2;

/// Particle state shared by packing and the flow solver, stored as
/// parallel arrays indexed by particle id.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSet {
    /// Seeding spacing `dx_r`.
    pub dx: f64,
    /// Per-particle volume, uniform and equal to `dx_r²`.
    pub volume: f64,
    pub position: Vec<Vec2>,
    /// Position at the end of seeding; reference for TPD.
    pub seed_position: Vec<Vec2>,
    pub gamma: Vec<f64>,
    pub c: Vec<f64>,
    pub grad_c: Vec<Vec2>,
    pub packable: Vec<bool>,
    pub selected: Vec<bool>,
    pub frozen: Vec<bool>,
}

impl ParticleSet {
    pub fn new(position: Vec<Vec2>, dx: f64) -> Self {
        let n = position.len();
        Self {
            dx,
            volume: dx * dx,
            seed_position: position.clone(),
            position,
            gamma: vec![1.0; n],
            c: vec![0.0; n],
            grad_c: vec![Vec2::ZERO; n],
            packable: vec![false; n],
            selected: vec![false; n],
            frozen: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    pub fn ids_where(flags: &[bool]) -> Vec<usize> {
        flags.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect()
    }
}
