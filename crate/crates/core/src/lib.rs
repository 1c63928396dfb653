//! Digital shearlet transform on 2D and 3D periodic grids.
//!
//! Filters are compactly supported and non-separable: a wavelet cascade
//! along the principal axis, a directional fan filter, and a digital shear
//! that avoids the aliasing of naive integer shears. The transform is
//! undecimated and reconstructs exactly through dual filters.

// `!(x > 0.0)` is used on purpose so NaN parameters are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fft;
pub mod filters;
pub mod shear;

pub use error::{Error, Result};
pub use filters::{
    alpha_to_shear_levels, cascade, default_fan_filter, default_lowpass, mirror_highpass,
    orthonormality_defect, upsample_filter_2d, FanFilter, FilterCascade, Kernel2, QmfPair,
    ScaleProfile, Taps,
};
pub mod system;
pub mod system2d;
pub mod system3d;

pub use system::{
    build_phi_component, build_wavelet_tensor, dual_filters, frame_bounds, frame_weight,
    redundancy_2d, redundancy_3d, FilterIndex, FilterKind, ShearletSystem, SystemConfig,
    WedgeScaling,
};
pub use system2d::{build_shearlet_filter, build_system_2d, Cone};
pub use system3d::{build_shearlet_filter_3d, build_system_3d};
pub mod transform;

pub use transform::{forward, inverse, CoefficientStack};
pub mod apps;
pub mod descriptor;
pub mod io;

pub use descriptor::SystemDescriptor;
