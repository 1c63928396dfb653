//! Restoration pipelines built on the transform: hard-threshold denoising,
//! inpainting and two-dictionary separation by iterative thresholding, with
//! the PSNR and blurred-binary Q metrics and seeded noise/mask generators.

mod metrics;
mod noise;
pub mod phantom;
mod pipelines;
mod threshold;

pub use metrics::{binarize, gaussian_kernel, psnr, quality_q, quality_q_opt, GaussianBlur};
pub use noise::{add_gaussian_noise, random_mask};
pub use pipelines::{
    denoise, inpaint, inpaint_with_observer, separate, DeltaInit, InpaintConfig, InpaintStep,
    SeparationConfig, SeparationResult, DEFAULT_INPAINT_DELTA_MIN, DEFAULT_SEPARATION_DELTA_MIN,
};
pub use threshold::{
    hard_threshold, threshold_bands, ThresholdScaling, ThresholdSchedule, DEFAULT_K_2D,
    DEFAULT_K_3D,
};
