//! 3D digital shearlet systems: three pyramids, each a product of a 1D
//! highpass along the principal axis and two sheared 2D factors on the
//! coordinate planes containing it.
//!
//! Filters are stored factored and materialized on demand, so a system
//! costs a few planes per scale rather than one volume per filter.

use ndarray::{Array2, Array3, ArrayD, Ix2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::fft::fft_real;
use crate::system::{
    build_phi_component, check_extent, check_shear_range, Factored3, FilterIndex, FilterKind,
    ScaleFactors3, ShearletSystem, Storage, SystemConfig, PYRAMID_AXES,
};

const PYRAMIDS: [FilterKind; 3] = [
    FilterKind::Pyramid1,
    FilterKind::Pyramid2,
    FilterKind::Pyramid3,
];

/// Pyramid number 0..3 for a 3D filter kind.
pub fn pyramid_of(kind: FilterKind) -> Option<usize> {
    PYRAMIDS.iter().position(|&p| p == kind)
}

/// Whether `(pyramid, k1, k2)` is a near-duplicate boundary filter dropped
/// when omission is on. Pyramid 1 keeps its whole boundary, pyramid 2 drops
/// the shears touching pyramid 1, pyramid 3 drops those touching either.
pub fn is_omitted_3d(pyramid: usize, k1: i64, k2: i64, k_max: i64) -> bool {
    match pyramid {
        1 => k1.abs() == k_max,
        2 => k1.abs() == k_max || k2.abs() == k_max,
        _ => false,
    }
}

/// Lowpass first, then per scale pyramids 1..3 with `(k1, k2)` ascending.
pub fn indices_3d(config: &SystemConfig) -> Vec<FilterIndex> {
    let mut out = vec![FilterIndex::lowpass()];
    for (j, d) in config.profile.scales() {
        let kmax = 1i64 << d;
        for (p, &kind) in PYRAMIDS.iter().enumerate() {
            for k1 in -kmax..=kmax {
                for k2 in -kmax..=kmax {
                    if !config.full_system && is_omitted_3d(p, k1, k2, kmax) {
                        continue;
                    }
                    out.push(FilterIndex {
                        kind,
                        scale: j as i32,
                        shears: [k1 as i32, k2 as i32],
                    });
                }
            }
        }
    }
    out
}

fn fft2(kernel: &crate::filters::Kernel2, shape: [usize; 2]) -> Array2<Complex64> {
    fft_real(kernel.periodize(shape).into_dyn().view())
        .into_dimensionality::<Ix2>()
        .expect("2D grid")
}

/// Frequency response of one 3D shearlet, materialized.
pub fn build_shearlet_filter_3d(
    config: &SystemConfig,
    j: u32,
    k1: i64,
    k2: i64,
    pyramid: usize,
    shape: [usize; 3],
) -> Result<ArrayD<Complex64>> {
    check_extent(&shape)?;
    let [a, b, c] = PYRAMID_AXES[pyramid];
    let g = config.scale_highpass(j)?.spectrum(shape[a]);
    let w1 = fft2(&build_phi_component(config, j, k1)?, [shape[a], shape[b]]);
    let w2 = fft2(&build_phi_component(config, j, k2)?, [shape[a], shape[c]]);
    Ok(ArrayD::from_shape_fn(ndarray::IxDyn(&shape), |ix| {
        g[ix[a]] * w1[[ix[a], ix[b]]] * w2[[ix[a], ix[c]]]
    }))
}

/// Spatial taps of a 3D shearlet with their center, in grid axis order.
/// Along the principal axis the highpass and both sheared factors convolve;
/// across it they combine as an outer product.
pub fn shearlet_taps_3d(
    config: &SystemConfig,
    j: u32,
    k1: i64,
    k2: i64,
    pyramid: usize,
) -> Result<(Array3<f64>, [usize; 3])> {
    let g = config.scale_highpass(j)?;
    let p1 = build_phi_component(config, j, k1)?;
    let p2 = build_phi_component(config, j, k2)?;
    let (l1a, l1b) = p1.dim();
    let (l2a, l2c) = p2.dim();
    let la = g.len() + l1a + l2a - 2;
    let mut t = Array3::<f64>::zeros((la, l1b, l2c));
    for nb in 0..l1b {
        for nc in 0..l2c {
            for (i1, &v1) in p1.taps().column(nb).iter().enumerate() {
                if v1 == 0.0 {
                    continue;
                }
                for (i2, &v2) in p2.taps().column(nc).iter().enumerate() {
                    if v2 == 0.0 {
                        continue;
                    }
                    for (ig, &vg) in g.as_slice().iter().enumerate() {
                        t[[ig + i1 + i2, nb, nc]] += vg * v1 * v2;
                    }
                }
            }
        }
    }
    let center_local = [
        g.center() + p1.center()[0] + p2.center()[0],
        p1.center()[1],
        p2.center()[1],
    ];
    let [a, b, c] = PYRAMID_AXES[pyramid];
    let mut perm = [0usize; 3];
    perm[a] = 0;
    perm[b] = 1;
    perm[c] = 2;
    let mut center = [0usize; 3];
    for axis in 0..3 {
        center[axis] = center_local[perm[axis]];
    }
    let taps = t.permuted_axes(perm).as_standard_layout().into_owned();
    Ok((taps, center))
}

/// Builds the factored system, the frame weight and the filter norms.
pub fn build_system_3d(shape: [usize; 3], config: &SystemConfig) -> Result<ShearletSystem> {
    check_extent(&shape)?;
    let indices = indices_3d(config);
    let j0 = config.profile.j0;
    for idx in &indices[1..] {
        let d = config.profile.shear_levels[(idx.scale as u32 - j0) as usize];
        check_shear_range(idx.shears[0] as i64, d)?;
        check_shear_range(idx.shears[1] as i64, d)?;
    }
    let scales: Vec<ScaleFactors3> = config
        .profile
        .scales()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(j, d)| {
            let k_max = 1i64 << d;
            let g = config.scale_highpass(j)?;
            let phis = (-k_max..=k_max)
                .map(|k| build_phi_component(config, j, k))
                .collect::<Result<Vec<_>>>()?;
            let planes = (0..3)
                .map(|a| {
                    (0..3)
                        .map(|b| {
                            if a == b {
                                Vec::new()
                            } else {
                                phis.iter().map(|p| fft2(p, [shape[a], shape[b]])).collect()
                            }
                        })
                        .collect()
                })
                .collect();
            Ok(ScaleFactors3 {
                k_max,
                highpass: [
                    g.spectrum(shape[0]),
                    g.spectrum(shape[1]),
                    g.spectrum(shape[2]),
                ],
                planes,
            })
        })
        .collect::<Result<_>>()?;
    let recipes = indices[1..]
        .iter()
        .map(|idx| {
            (
                (idx.scale as u32 - j0) as usize,
                pyramid_of(idx.kind).expect("pyramid kind"),
                idx.shears[0] as i64,
                idx.shears[1] as i64,
            )
        })
        .collect();
    let h = config.coarse_lowpass()?;
    let factored = Factored3 {
        recipes,
        scales,
        lowpass: [
            h.spectrum(shape[0]),
            h.spectrum(shape[1]),
            h.spectrum(shape[2]),
        ],
    };
    ShearletSystem::assemble(
        shape.to_vec(),
        Some(config.clone()),
        indices,
        Storage::Factored(Box::new(factored)),
    )
}
