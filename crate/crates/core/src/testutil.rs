//! Shared helpers for unit tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::BooleanFunction;

pub(crate) fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random complex table with entries uniform in the unit square around 0.
pub(crate) fn random_function(n: usize, seed: u64) -> BooleanFunction {
    let mut rng = test_rng(seed);
    let values = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    BooleanFunction::new(n, values).unwrap()
}

pub(crate) fn complex_table(reals: &[f64]) -> Vec<Complex64> {
    reals.iter().map(|&r| Complex64::new(r, 0.0)).collect()
}

pub(crate) fn assert_close(actual: f64, expected: f64, tol: f64) {
    assert!(
        (actual - expected).abs() <= tol,
        "expected {expected}, got {actual} (tol {tol})"
    );
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
