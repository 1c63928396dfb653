use ndarray::ArrayD;

use crate::error::{Error, Result};
use crate::filters::Taps;
use crate::shear::convolve_axis;

/// `20 log10(255 √N / ‖f - g‖_F)`; identical inputs give `+∞`.
pub fn psnr(reference: &ArrayD<f64>, test: &ArrayD<f64>) -> Result<f64> {
    if reference.shape() != test.shape() {
        return Err(Error::Shape(format!(
            "psnr of {:?} against {:?}",
            reference.shape(),
            test.shape()
        )));
    }
    let err: f64 = reference
        .iter()
        .zip(test.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (255.0 * (reference.len() as f64).sqrt() / err).log10())
}

/// `B_δ`: 1 where `|g| ≥ δ`, else 0.
pub fn binarize(signal: &ArrayD<f64>, delta: f64) -> ArrayD<f64> {
    signal.mapv(|v| if v.abs() >= delta { 1.0 } else { 0.0 })
}

/// Sampled Gaussian `exp(-n²/2σ²)` on `|n| ≤ ⌈truncate·σ⌉`, L1-normalized.
pub fn gaussian_kernel(sigma: f64, truncate: f64) -> Taps {
    let r = (truncate * sigma).ceil() as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|n| (-(n * n) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = raw.iter().sum();
    Taps::centered(raw.into_iter().map(|v| v / s).collect()).expect("nonempty")
}

/// Separable periodic Gaussian blur. The square truncation keeps the 2D
/// kernel an exact outer product of two 1D kernels, so it stays L1-normalized.
#[derive(Clone, Debug)]
pub struct GaussianBlur {
    taps: Taps,
}

impl GaussianBlur {
    pub fn new(sigma: f64, truncate: f64) -> Self {
        GaussianBlur {
            taps: gaussian_kernel(sigma, truncate),
        }
    }

    pub fn apply(&self, x: &ArrayD<f64>) -> ArrayD<f64> {
        let mut out = x.clone();
        for axis in 0..x.ndim() {
            out = convolve_axis(&out, &self.taps, axis).expect("valid axis");
        }
        out
    }
}

impl Default for GaussianBlur {
    /// σ = 2 pixels, truncated at 4σ.
    fn default() -> Self {
        GaussianBlur::new(2.0, 4.0)
    }
}

fn check_truth(
    recovered: &ArrayD<f64>,
    truth: &ArrayD<f64>,
    blur: &GaussianBlur,
) -> Result<ArrayD<f64>> {
    if recovered.shape() != truth.shape() {
        return Err(Error::Shape(format!(
            "recovered {:?} vs truth {:?}",
            recovered.shape(),
            truth.shape()
        )));
    }
    if truth.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Config("ground truth must be binary".into()));
    }
    let blurred = blur.apply(truth);
    if blurred.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateTruth);
    }
    Ok(blurred)
}

fn relative_error(target: &ArrayD<f64>, target_norm: f64, est: &ArrayD<f64>) -> f64 {
    target
        .iter()
        .zip(est.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
        / target_norm
}

/// `Q(f̃, δ) = ‖g∗f - g∗B_δ f̃‖₂ / ‖g∗f‖₂` with `f` the binary truth.
pub fn quality_q(
    recovered: &ArrayD<f64>,
    truth: &ArrayD<f64>,
    delta: f64,
    blur: &GaussianBlur,
) -> Result<f64> {
    let target = check_truth(recovered, truth, blur)?;
    let norm = target.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(relative_error(
        &target,
        norm,
        &blur.apply(&binarize(recovered, delta)),
    ))
}

/// Minimum of `Q` over `δ = 0, 1, …, 255` and the smallest minimizing `δ`.
pub fn quality_q_opt(
    recovered: &ArrayD<f64>,
    truth: &ArrayD<f64>,
    blur: &GaussianBlur,
) -> Result<(f64, u32)> {
    let target = check_truth(recovered, truth, blur)?;
    let norm = target.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut best = (f64::INFINITY, 0u32);
    let mut last: Option<(ArrayD<f64>, f64)> = None;
    for delta in 0..=255u32 {
        let bin = binarize(recovered, delta as f64);
        // Q only changes when some |value| falls in [δ-1, δ).
        let q = match &last {
            Some((prev, q)) if *prev == bin => *q,
            _ => relative_error(&target, norm, &blur.apply(&bin)),
        };
        if q < best.0 {
            best = (q, delta);
        }
        last = Some((bin, q));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, IxDyn};

    #[test]
    fn psnr_examples() {
        let a = ArrayD::from_elem(IxDyn(&[4, 4]), 10.0);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        let b = a.mapv(|v| v + 255.0);
        assert!(psnr(&a, &b).unwrap().abs() < 1e-12);
        let c = a.mapv(|v| v + 25.5);
        assert!((psnr(&a, &c).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(psnr(&a, &c).unwrap(), psnr(&c, &a).unwrap());
    }

    #[test]
    fn binarize_examples() {
        let x = arr1(&[0.0, 100.0, 200.0]).into_dyn();
        assert_eq!(binarize(&x, 150.0), arr1(&[0.0, 0.0, 1.0]).into_dyn());
        assert!(binarize(&x, 0.0).iter().all(|&v| v == 1.0));
        assert!(binarize(&x, 256.0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn kernel_is_normalized() {
        let k = gaussian_kernel(2.0, 4.0);
        assert_eq!(k.len(), 17);
        assert!((k.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_examples() {
        let mut truth = ArrayD::zeros(IxDyn(&[32, 32]));
        for i in 4..28 {
            truth[[i, 10]] = 1.0;
        }
        let blur = GaussianBlur::default();
        for d in [0.25, 0.5, 1.0] {
            assert_eq!(quality_q(&truth, &truth, d, &blur).unwrap(), 0.0);
        }
        let zero = ArrayD::zeros(IxDyn(&[32, 32]));
        assert!((quality_q(&zero, &truth, 1.0, &blur).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            quality_q(&truth, &zero, 1.0, &blur),
            Err(Error::DegenerateTruth)
        ));
    }
}
