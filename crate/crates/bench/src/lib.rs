//! Shared inputs for the criterion benches.

use ndarray::{ArrayD, Dimension, IxDyn};

/// Deterministic, non-trivial test signal (no RNG needed for timing).
pub fn test_signal(shape: &[usize]) -> ArrayD<f64> {
    ArrayD::from_shape_fn(IxDyn(shape), |ix| {
        let s: usize = ix
            .slice()
            .iter()
            .enumerate()
            .map(|(a, &i)| (a + 3) * i * i)
            .sum();
        ((s % 251) as f64) - 125.0
    })
}
