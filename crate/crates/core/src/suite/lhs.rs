//! Latin Hypercube designs on the `[-5, 5]^dim` box.

use rand::Rng as _;

use crate::keyed_rng;
use crate::suite::bbob::{LOWER, UPPER};

/// `n × dim` design, row-major as `Vec<Vec<f64>>`. Each column places exactly
/// one point in each of `n` equal-width strata.
pub fn lhs_sample(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = keyed_rng!("lhs", seed, dim, n);
    let width = (UPPER - LOWER) / n as f64;
    let mut x = vec![vec![0.0; dim]; n];
    for d in 0..dim {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        for (row, &stratum) in x.iter_mut().zip(&perm) {
            let u: f64 = rng.random();
            let v = LOWER + (stratum as f64 + u) * width;
            row[d] = v.clamp(LOWER, UPPER);
        }
    }
    x
}

/// Default sample size for dimension `dim`.
pub fn default_size(dim: usize) -> usize {
    50 * dim
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_per_stratum() {
        let x = lhs_sample(3, 150, 7);
        assert_eq!(x.len(), 150);
        for d in 0..3 {
            let mut hits = vec![0usize; 150];
            for row in &x {
                let b = (((row[d] - LOWER) / (UPPER - LOWER)) * 150.0).floor() as usize;
                hits[b.min(149)] += 1;
            }
            assert!(hits.iter().all(|&h| h == 1));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(lhs_sample(2, 100, 1), lhs_sample(2, 100, 1));
        assert_ne!(lhs_sample(2, 100, 1), lhs_sample(2, 100, 2));
        assert_eq!(lhs_sample(2, default_size(2), 0).len(), 100);
    }
}
