use ndarray::ArrayD;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// Adds i.i.d. `N(0, σ²)` noise. Samples come from ChaCha20 seeded with
/// `seed_from_u64`, converted to normals by the ziggurat method of
/// `rand_distr`, in row-major order; both are platform independent.
pub fn add_gaussian_noise(signal: &ArrayD<f64>, sigma: f64, seed: u64) -> ArrayD<f64> {
    if sigma == 0.0 {
        return signal.clone();
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    signal.mapv(|v| {
        let z: f64 = rng.sample(StandardNormal);
        v + sigma * z
    })
}

/// Binary mask with each sample missing (0) independently with probability
/// `missing`, drawn from the same generator as the noise.
pub fn random_mask(shape: &[usize], missing: f64, seed: u64) -> ArrayD<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    ArrayD::from_shape_simple_fn(ndarray::IxDyn(shape), || {
        if rng.random::<f64>() < missing {
            0.0
        } else {
            1.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::IxDyn;

    #[test]
    fn zero_sigma_is_identity() {
        let x = ArrayD::from_elem(IxDyn(&[4, 4]), 3.0);
        assert_eq!(add_gaussian_noise(&x, 0.0, 1), x);
    }

    #[test]
    fn variance_and_seeding() {
        let x = ArrayD::zeros(IxDyn(&[512, 512]));
        let y = add_gaussian_noise(&x, 20.0, 7);
        let n = y.len() as f64;
        let mean = y.sum() / n;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / 400.0 - 1.0).abs() < 0.02, "{var}");
        assert_eq!(add_gaussian_noise(&x, 20.0, 7), y);
        assert_ne!(add_gaussian_noise(&x, 20.0, 8), y);
    }

    #[test]
    fn mask_fraction() {
        let m = random_mask(&[256, 256], 0.8, 3);
        let kept = m.sum() / m.len() as f64;
        assert!((kept - 0.2).abs() < 0.01);
        assert!(m.iter().all(|&v| v == 0.0 || v == 1.0));
    }
}
