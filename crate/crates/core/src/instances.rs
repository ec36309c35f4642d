//! Seeded generation of random problem instances for the check suites.
//!
//! The generator is pinned so instances are reproducible across runs and
//! portable across implementations:
//!
//! * stream: ChaCha8 keyed with the 64-bit seed in little-endian position 0
//!   of the key (remaining key bytes zero);
//! * every draw goes through [`unit()`]: take the next 64-bit word, keep
//!   the top 53 bits, scale by 2^-53 — a uniform f64 in [0, 1);
//! * coordinates are `lo + u (hi - lo)` drawn atom-major (all coordinates
//!   of atom 0, then atom 1, ...);
//! * atom counts are `1 + floor(u * max)` clamped to `max`;
//! * raw weights are `0.05 + u` (bounded away from zero), then normalized.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measures::DiscreteMeasure;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform f64 in [0, 1) from the top 53 bits of the next word.
pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * 2f64.powi(-53)
}

/// Uniform f64 in [lo, hi).
pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + unit(rng) * (hi - lo)
}

/// Integer in 1..=max.
pub fn atom_count(rng: &mut ChaCha8Rng, max: usize) -> usize {
    ((unit(rng) * max as f64) as usize + 1).min(max)
}

pub fn sample_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| uniform_in(rng, -scale, scale)).collect()
}

/// Measure with `n` atoms in [-scale, scale)^dim; uniform weights when
/// `uniform_weights`, otherwise normalized draws of 0.05 + unit.
pub fn sample_measure_with(
    rng: &mut ChaCha8Rng,
    dim: usize,
    n: usize,
    scale: f64,
    uniform_weights: bool,
) -> DiscreteMeasure {
    let points: Vec<Vec<f64>> = (0..n).map(|_| sample_point(rng, dim, scale)).collect();
    if uniform_weights {
        DiscreteMeasure::uniform(points).expect("sampled points form a measure")
    } else {
        let raw: Vec<f64> = (0..n).map(|_| 0.05 + unit(rng)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        DiscreteMeasure::new(points, weights).expect("sampled weights form a measure")
    }
}

/// Random-size measure: dimension fixed, atom count up to `max_atoms`.
pub fn sample_measure(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_atoms: usize,
    scale: f64,
) -> DiscreteMeasure {
    let n = atom_count(rng, max_atoms);
    sample_measure_with(rng, dim, n, scale, false)
}

/// Pair of measures sharing a dimension drawn in 1..=max_dim.
pub fn sample_pair(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
    max_atoms: usize,
    scale: f64,
) -> (DiscreteMeasure, DiscreteMeasure) {
    let dim = atom_count(rng, max_dim);
    let mu = sample_measure(rng, dim, max_atoms, scale);
    let nu = sample_measure(rng, dim, max_atoms, scale);
    (mu, nu)
}

/// Triple of measures sharing a dimension drawn in 1..=max_dim.
pub fn sample_triple(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
    max_atoms: usize,
    scale: f64,
) -> (DiscreteMeasure, DiscreteMeasure, DiscreteMeasure) {
    let dim = atom_count(rng, max_dim);
    (
        sample_measure(rng, dim, max_atoms, scale),
        sample_measure(rng, dim, max_atoms, scale),
        sample_measure(rng, dim, max_atoms, scale),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instances() {
        let mut a = rng_from_seed(7);
        let mut b = rng_from_seed(7);
        for _ in 0..5 {
            let (m1, n1) = sample_pair(&mut a, 3, 10, 2.0);
            let (m2, n2) = sample_pair(&mut b, 3, 10, 2.0);
            assert!(m1.approx_eq(&m2, 0.0));
            assert!(n1.approx_eq(&n2, 0.0));
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = rng_from_seed(1);
        let mut b = rng_from_seed(2);
        let (m1, _) = sample_pair(&mut a, 3, 10, 2.0);
        let (m2, _) = sample_pair(&mut b, 3, 10, 2.0);
        assert!(!m1.approx_eq(&m2, 1e-12));
    }

    #[test]
    fn unit_stays_in_range_and_counts_are_bounded() {
        let mut rng = rng_from_seed(42);
        for _ in 0..1000 {
            let u = unit(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
        for _ in 0..1000 {
            let n = atom_count(&mut rng, 7);
            assert!((1..=7).contains(&n));
        }
    }
}
