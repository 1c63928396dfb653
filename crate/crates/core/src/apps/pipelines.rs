use ndarray::ArrayD;

use super::threshold::{
    hard_threshold, max_scaled_coefficient, threshold_bands, ThresholdScaling, ThresholdSchedule,
};
use crate::error::{Error, Result};
use crate::system::ShearletSystem;
use crate::transform::{forward, inverse};

/// Final-to-initial threshold ratio used by the inpainting defaults.
pub const DEFAULT_INPAINT_DELTA_MIN: f64 = 0.01;
/// Separation stops at a higher relative threshold: below about 0.05 the
/// isotropic part starts absorbing fine curve detail.
pub const DEFAULT_SEPARATION_DELTA_MIN: f64 = 0.1;

/// `T⁻¹ T_δ T f` with per-scale thresholds `K_j σ`.
pub fn denoise(
    signal: &ArrayD<f64>,
    system: &ShearletSystem,
    schedule: &ThresholdSchedule,
) -> Result<ArrayD<f64>> {
    let coeffs = forward(signal, system)?;
    inverse(&hard_threshold(&coeffs, schedule, system)?, system)
}

/// Starting threshold of the iterative pipelines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaInit {
    /// The largest (scaled) coefficient of the input: the first pass keeps
    /// nothing but the strongest feature.
    Auto,
    Value(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InpaintConfig {
    pub iterations: usize,
    pub delta_init: DeltaInit,
    /// Final threshold as a fraction of the initial one.
    pub delta_min: f64,
    pub scaling: ThresholdScaling,
}

impl InpaintConfig {
    pub fn new(iterations: usize, delta_min: f64) -> Self {
        InpaintConfig {
            iterations,
            delta_init: DeltaInit::Auto,
            delta_min,
            scaling: ThresholdScaling::FilterNorm,
        }
    }
}

fn schedule(iterations: usize, delta_min: f64, delta_init: DeltaInit) -> Result<f64> {
    if iterations < 2 {
        return Err(Error::Config("at least two iterations are needed".into()));
    }
    if !(delta_min > 0.0 && delta_min < 1.0) {
        return Err(Error::Config(format!(
            "delta_min {delta_min} outside (0, 1)"
        )));
    }
    if let DeltaInit::Value(v) = delta_init {
        if !(v > 0.0) {
            return Err(Error::Config(format!("delta_init {v} must be positive")));
        }
    }
    Ok(delta_min.powf(1.0 / (iterations as f64 - 1.0)))
}

/// State handed to an inpainting observer before each update.
pub struct InpaintStep<'a> {
    pub iteration: usize,
    pub delta: f64,
    /// `M .* (f_masked - f_inpainted)` for the current estimate.
    pub residual: &'a ArrayD<f64>,
    pub estimate: &'a ArrayD<f64>,
}

/// Iterative-thresholding inpainting; see [`inpaint_with_observer`].
pub fn inpaint(
    masked: &ArrayD<f64>,
    mask: &ArrayD<f64>,
    system: &ShearletSystem,
    config: &InpaintConfig,
) -> Result<ArrayD<f64>> {
    inpaint_with_observer(masked, mask, system, config, |_| {})
}

/// Repeats `f ← T⁻¹ T_δ T(M.*(f_masked - f) + f)` with `δ` decaying
/// geometrically from `δ_init` to `δ_min·δ_init`. Every band, lowpass
/// included, is thresholded.
pub fn inpaint_with_observer(
    masked: &ArrayD<f64>,
    mask: &ArrayD<f64>,
    system: &ShearletSystem,
    config: &InpaintConfig,
    mut observer: impl FnMut(&InpaintStep),
) -> Result<ArrayD<f64>> {
    if masked.shape() != mask.shape() || masked.shape() != system.shape() {
        return Err(Error::Shape(format!(
            "image {:?}, mask {:?}, system {:?}",
            masked.shape(),
            mask.shape(),
            system.shape()
        )));
    }
    if mask.iter().any(|&m| m != 0.0 && m != 1.0) {
        return Err(Error::Config("mask must be binary".into()));
    }
    if mask.iter().all(|&m| m == 0.0) {
        return Err(Error::DegenerateMask);
    }
    if masked
        .iter()
        .zip(mask.iter())
        .any(|(&v, &m)| m == 0.0 && v != 0.0)
    {
        return Err(Error::Config(
            "masked image is nonzero where the mask is zero".into(),
        ));
    }
    let lambda = schedule(config.iterations, config.delta_min, config.delta_init)?;
    let mut delta = match config.delta_init {
        DeltaInit::Value(v) => v,
        DeltaInit::Auto => {
            max_scaled_coefficient(&forward(masked, system)?, system, config.scaling)
        }
    };
    let mut estimate = ArrayD::zeros(masked.raw_dim());
    for iteration in 0..config.iterations {
        let mut residual = masked - &estimate;
        residual *= mask;
        observer(&InpaintStep {
            iteration,
            delta,
            residual: &residual,
            estimate: &estimate,
        });
        residual += &estimate;
        let mut coeffs = forward(&residual, system)?;
        threshold_bands(&mut coeffs, delta, system, config.scaling);
        estimate = inverse(&coeffs, system)?;
        delta *= lambda;
    }
    Ok(estimate)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationConfig {
    pub iterations: usize,
    pub delta_init: DeltaInit,
    pub delta_min: f64,
    pub scaling: ThresholdScaling,
}

impl SeparationConfig {
    pub fn new(iterations: usize, delta_min: f64) -> Self {
        SeparationConfig {
            iterations,
            delta_init: DeltaInit::Auto,
            delta_min,
            scaling: ThresholdScaling::FilterNorm,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationResult {
    /// Part captured by the directional system.
    pub curvilinear: ArrayD<f64>,
    /// Part captured by the isotropic system.
    pub blobs: ArrayD<f64>,
}

/// Two-dictionary iterative thresholding. Each iteration computes one shared
/// residual, then updates the directional part and the isotropic part from
/// it with the same threshold.
pub fn separate(
    signal: &ArrayD<f64>,
    directional: &ShearletSystem,
    isotropic: &ShearletSystem,
    config: &SeparationConfig,
) -> Result<SeparationResult> {
    if directional.shape() != signal.shape() || isotropic.shape() != signal.shape() {
        return Err(Error::Shape(format!(
            "signal {:?}, systems {:?} and {:?}",
            signal.shape(),
            directional.shape(),
            isotropic.shape()
        )));
    }
    let lambda = schedule(config.iterations, config.delta_min, config.delta_init)?;
    let mut delta = match config.delta_init {
        DeltaInit::Value(v) => v,
        DeltaInit::Auto => {
            let a =
                max_scaled_coefficient(&forward(signal, directional)?, directional, config.scaling);
            let b = max_scaled_coefficient(&forward(signal, isotropic)?, isotropic, config.scaling);
            a.max(b)
        }
    };
    let mut f0 = ArrayD::zeros(signal.raw_dim());
    let mut f1 = ArrayD::zeros(signal.raw_dim());
    if delta == 0.0 {
        return Ok(SeparationResult {
            curvilinear: f0,
            blobs: f1,
        });
    }
    for _ in 0..config.iterations {
        let residual = signal - &f0 - &f1;
        let mut c0 = forward(&(&residual + &f0), directional)?;
        threshold_bands(&mut c0, delta, directional, config.scaling);
        let new_f0 = inverse(&c0, directional)?;
        let mut c1 = forward(&(&residual + &f1), isotropic)?;
        threshold_bands(&mut c1, delta, isotropic, config.scaling);
        f1 = inverse(&c1, isotropic)?;
        f0 = new_f0;
        delta *= lambda;
    }
    Ok(SeparationResult {
        curvilinear: f0,
        blobs: f1,
    })
}
