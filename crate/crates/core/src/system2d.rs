//! 2D digital shearlet systems: two frequency cones, each holding
//! `2·2^{d_j} + 1` sheared filters per scale.

use ndarray::ArrayD;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::fft::fft_real;
use crate::filters::Kernel2;
use crate::system::{
    build_phi_component, check_extent, check_shear_range, FilterIndex, FilterKind, ShearletSystem,
    Storage, SystemConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    Horizontal,
    Vertical,
}

/// Spatial taps of the shearlet at scale `j`, shear `k`: the highpass
/// cascade along axis 0 applied to the sheared wedge. The vertical cone
/// is the transpose.
pub fn shearlet_taps_2d(config: &SystemConfig, j: u32, k: i64, cone: Cone) -> Result<Kernel2> {
    let phi = build_phi_component(config, j, k)?;
    let taps = phi.convolve_axis(0, &config.scale_highpass(j)?);
    Ok(match cone {
        Cone::Horizontal => taps,
        Cone::Vertical => taps.transpose(),
    })
}

/// Frequency response of one shearlet on a `shape` grid, taps periodized.
pub fn build_shearlet_filter(
    config: &SystemConfig,
    j: u32,
    k: i64,
    cone: Cone,
    shape: [usize; 2],
) -> Result<ArrayD<Complex64>> {
    check_extent(&shape)?;
    let taps = shearlet_taps_2d(config, j, k, cone)?;
    Ok(fft_real(taps.periodize(shape).into_dyn().view()))
}

/// Spatial taps of the separable lowpass `h_L ⊗ h_L`.
pub fn lowpass_taps_2d(config: &SystemConfig) -> Result<Kernel2> {
    let h = config.coarse_lowpass()?;
    Ok(Kernel2::outer(&h, &h))
}

/// Index list in system order: lowpass, then per scale the horizontal cone
/// followed by the vertical cone, shears ascending.
pub fn indices_2d(config: &SystemConfig) -> Vec<FilterIndex> {
    let mut out = vec![FilterIndex::lowpass()];
    for (j, d) in config.profile.scales() {
        let kmax = 1i32 << d;
        for kind in [FilterKind::ConeHorizontal, FilterKind::ConeVertical] {
            for k in -kmax..=kmax {
                if kind == FilterKind::ConeVertical && k.abs() == kmax && !config.full_system {
                    continue;
                }
                out.push(FilterIndex {
                    kind,
                    scale: j as i32,
                    shears: [k, 0],
                });
            }
        }
    }
    out
}

/// Builds every filter, the frame weight and the filter norms.
pub fn build_system_2d(shape: [usize; 2], config: &SystemConfig) -> Result<ShearletSystem> {
    check_extent(&shape)?;
    let indices = indices_2d(config);
    for idx in &indices[1..] {
        let d = config.profile.shear_levels[(idx.scale as u32 - config.profile.j0) as usize];
        check_shear_range(idx.shears[0] as i64, d)?;
    }
    // Each (scale, shear) pair yields taps shared by both cones.
    let mut pairs: Vec<(u32, i64)> = Vec::new();
    for (j, d) in config.profile.scales() {
        let kmax = 1i64 << d;
        pairs.extend((-kmax..=kmax).map(|k| (j, k)));
    }
    let taps: Vec<((u32, i64), Kernel2)> = pairs
        .par_iter()
        .map(|&(j, k)| Ok(((j, k), shearlet_taps_2d(config, j, k, Cone::Horizontal)?)))
        .collect::<Result<_>>()?;
    let lookup = |j: u32, k: i64| &taps.iter().find(|(key, _)| *key == (j, k)).unwrap().1;
    let lowpass = lowpass_taps_2d(config)?;
    let filters: Vec<ArrayD<Complex64>> = indices
        .par_iter()
        .map(|idx| {
            let kernel = match idx.kind {
                FilterKind::Lowpass => lowpass.clone(),
                FilterKind::ConeHorizontal => {
                    lookup(idx.scale as u32, idx.shears[0] as i64).clone()
                }
                _ => lookup(idx.scale as u32, idx.shears[0] as i64).transpose(),
            };
            fft_real(kernel.periodize(shape).into_dyn().view())
        })
        .collect();
    ShearletSystem::assemble(
        shape.to_vec(),
        Some(config.clone()),
        indices,
        Storage::Dense(filters),
    )
}
