//! Seeded uniform measurement noise.

use alloc::vec::Vec;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::discretization::SampledField;

/// Per-node uniform noise on `[-δ‖g‖∞, δ‖g‖∞]`, reproducible from a seed.
#[derive(Debug, Clone)]
pub struct UniformNoise {
    rng: ChaCha20Rng,
    seed: u64,
}

impl UniformNoise {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed), seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform sample on `[-1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        let u = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * u - 1.0
    }

    /// Uniform sample on `[lo, hi)`.
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + 0.5 * (self.next_symmetric() + 1.0) * (hi - lo)
    }

    /// `g + δ‖g‖∞ ξ` with independent `ξ_i ~ U[-1, 1)`.
    pub fn perturb(&mut self, g: &SampledField, delta: f64) -> SampledField {
        let scale = delta * g.sup_norm();
        let values: Vec<f64> = g.values().iter().map(|v| v + scale * self.next_symmetric()).collect();
        SampledField::from_parts_unchecked(*g.grid(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Grid;

    #[test]
    fn bounded_and_reproducible() {
        let g = SampledField::from_fn(Grid::unit(101).unwrap(), |x| 2.0 - x);
        let a = UniformNoise::new(11).perturb(&g, 0.01);
        let b = UniformNoise::new(11).perturb(&g, 0.01);
        assert_eq!(a, b);
        let d = a.sub(&g).unwrap();
        assert!(d.sup_norm() <= 0.02);
        assert!(d.sup_norm() > 0.015);
        assert_ne!(UniformNoise::new(12).perturb(&g, 0.01), a);
    }
}
