use crate::error::{Error, Result};
use crate::system::ShearletSystem;
use crate::transform::CoefficientStack;

/// Per-scale factors for a four-scale 2D system, coarse to fine.
pub const DEFAULT_K_2D: [f64; 4] = [2.5, 2.5, 2.5, 3.8];
/// Per-scale factors for a three-scale 3D system, coarse to fine.
pub const DEFAULT_K_3D: [f64; 3] = [3.0, 3.0, 4.0];

/// How a nominal threshold maps onto each band.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdScaling {
    /// Multiply by the band filter's spatial L2 norm, which is the standard
    /// deviation of white unit-variance noise in that band.
    FilterNorm,
    /// Use the nominal value for every band as is.
    Uniform,
}

/// `δ_j = K_j σ` per scale.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSchedule {
    pub factors: Vec<f64>,
    pub sigma: f64,
    pub scaling: ThresholdScaling,
}

impl ThresholdSchedule {
    pub fn new(factors: Vec<f64>, sigma: f64) -> Result<Self> {
        if factors.iter().any(|&k| !(k > 0.0)) || !(sigma >= 0.0) {
            return Err(Error::Config(
                "K factors must be positive and sigma nonnegative".into(),
            ));
        }
        Ok(ThresholdSchedule {
            factors,
            sigma,
            scaling: ThresholdScaling::FilterNorm,
        })
    }

    pub fn strict(mut self) -> Self {
        self.scaling = ThresholdScaling::Uniform;
        self
    }
}

fn band_scale(system: &ShearletSystem, i: usize, scaling: ThresholdScaling) -> f64 {
    match scaling {
        ThresholdScaling::FilterNorm => system.filter_norms()[i],
        ThresholdScaling::Uniform => 1.0,
    }
}

fn zero_below(band: &mut ndarray::ArrayD<f64>, delta: f64) {
    band.mapv_inplace(|v| if v.abs() < delta { 0.0 } else { v });
}

/// Keeps coefficients with `|x| ≥ K_j σ (‖ψ_i‖₂)` and zeroes the rest; the
/// lowpass band is left alone.
pub fn hard_threshold(
    coeffs: &CoefficientStack,
    schedule: &ThresholdSchedule,
    system: &ShearletSystem,
) -> Result<CoefficientStack> {
    if schedule.factors.len() != system.n_scales() {
        return Err(Error::Config(format!(
            "{} threshold factors for {} scales",
            schedule.factors.len(),
            system.n_scales()
        )));
    }
    let mut out = coeffs.clone();
    for (i, band) in out.bands.iter_mut().enumerate() {
        let Some(slot) = system.scale_slot(i) else {
            continue;
        };
        let delta =
            schedule.factors[slot] * schedule.sigma * band_scale(system, i, schedule.scaling);
        zero_below(band, delta);
    }
    Ok(out)
}

/// Thresholds every band, lowpass included, at `delta` (scaled per band).
/// This is the operator of the iterative pipelines.
pub fn threshold_bands(
    coeffs: &mut CoefficientStack,
    delta: f64,
    system: &ShearletSystem,
    scaling: ThresholdScaling,
) {
    for (i, band) in coeffs.bands.iter_mut().enumerate() {
        zero_below(band, delta * band_scale(system, i, scaling));
    }
}

/// Largest `|x| / scale_i` over all bands: the threshold that zeroes everything.
pub(crate) fn max_scaled_coefficient(
    coeffs: &CoefficientStack,
    system: &ShearletSystem,
    scaling: ThresholdScaling,
) -> f64 {
    coeffs
        .bands
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let s = band_scale(system, i, scaling);
            b.iter().fold(0.0f64, |m, v| m.max(v.abs())) / s
        })
        .fold(0.0, f64::max)
}
