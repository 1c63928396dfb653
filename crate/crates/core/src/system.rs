//! Shared machinery for 2D and 3D shearlet systems: filter indices, the
//! directional building blocks, and the assembled frequency-domain system
//! with its frame weight and duals.

use std::borrow::Cow;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::{cascade, FanFilter, Kernel2, QmfPair, ScaleProfile, Taps};
use crate::shear::shear_kernel;

/// Smallest supported extent along any axis.
pub const MIN_EXTENT: usize = 8;
/// Frame weights below this make the duals meaningless.
pub const SINGULAR_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum FilterKind {
    Lowpass = 0,
    /// Highpass along axis 0, sheared along axis 0.
    ConeHorizontal = 1,
    /// The horizontal cone with the two axes swapped.
    ConeVertical = 2,
    /// Principal axis 0.
    Pyramid1 = 3,
    /// Principal axis 1.
    Pyramid2 = 4,
    /// Principal axis 2.
    Pyramid3 = 5,
}

impl FilterKind {
    pub fn from_u8(v: u8) -> Option<Self> {
        use FilterKind::*;
        [
            Lowpass,
            ConeHorizontal,
            ConeVertical,
            Pyramid1,
            Pyramid2,
            Pyramid3,
        ]
        .get(v as usize)
        .copied()
    }
}

/// Identifies one filter. The lowpass carries `scale = -1` and zero shears;
/// 2D filters leave `shears[1]` at zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FilterIndex {
    pub kind: FilterKind,
    pub scale: i32,
    pub shears: [i32; 2],
}

impl FilterIndex {
    pub fn lowpass() -> Self {
        FilterIndex {
            kind: FilterKind::Lowpass,
            scale: -1,
            shears: [0, 0],
        }
    }

    pub fn is_lowpass(&self) -> bool {
        self.kind == FilterKind::Lowpass
    }
}

/// How the fan filter and its secondary-axis lowpass are dilated per scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeScaling {
    /// Every scale reuses the finest-scale wedge `P(ξ0, 2^{d+1} ξ1) ĥ_{d+1}(ξ1)`;
    /// scales differ only through the highpass cascade and the shear level.
    /// This is the construction that reproduces the published frame bounds.
    FinestScale,
    /// Dilates the fan by `2^{J-j-1}` along axis 0 and `2^{J-j+d}` along
    /// axis 1 with lowpass `h_{J-j+d}`, literally per scale.
    PerScale,
}

impl WedgeScaling {
    pub fn name(&self) -> &'static str {
        match self {
            WedgeScaling::FinestScale => "finest",
            WedgeScaling::PerScale => "per-scale",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "finest" => Ok(WedgeScaling::FinestScale),
            "per-scale" => Ok(WedgeScaling::PerScale),
            _ => Err(Error::Config(format!("unknown wedge scaling '{s}'"))),
        }
    }
}

/// Everything that determines a system apart from the grid size.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub profile: ScaleProfile,
    pub full_system: bool,
    pub wedge: WedgeScaling,
    pub qmf: QmfPair,
    pub fan: FanFilter,
}

impl SystemConfig {
    /// Default filters, boundary omission on, finest-scale wedges.
    pub fn new(profile: ScaleProfile) -> Result<Self> {
        Ok(SystemConfig {
            profile,
            full_system: false,
            wedge: WedgeScaling::FinestScale,
            qmf: QmfPair::default(),
            fan: crate::filters::default_fan_filter()?,
        })
    }

    /// Undecimated separable wavelet system: no shearing, impulse fan.
    pub fn isotropic(n_scales: usize) -> Self {
        SystemConfig {
            profile: ScaleProfile::new(vec![0; n_scales], 0),
            full_system: false,
            wedge: WedgeScaling::FinestScale,
            qmf: QmfPair::default(),
            fan: FanFilter::impulse(),
        }
    }

    fn lowpass(&self, level: i64) -> Result<Taps> {
        Ok(cascade(&self.qmf, level as i32)?.lowpass)
    }

    fn highpass(&self, level: i64) -> Result<Taps> {
        if level < 1 {
            return Err(Error::Domain(format!("highpass cascade level {level} < 1")));
        }
        Ok(cascade(&self.qmf, level as i32)?.highpass)
    }

    fn check_scale(&self, j: u32) -> Result<u32> {
        let p = &self.profile;
        if j < p.j0 || j >= p.finest() {
            return Err(Error::Domain(format!(
                "scale {j} outside {}..{}",
                p.j0,
                p.finest()
            )));
        }
        Ok(p.shear_levels[(j - p.j0) as usize])
    }

    /// The fan scaled to unit L1 norm, the form used inside every filter.
    pub fn normalized_fan(&self) -> Kernel2 {
        let k = &self.fan.kernel;
        k.scaled(1.0 / k.l1_norm())
    }

    /// Highpass cascade `g_{J-j}` along the principal axis at scale `j`.
    pub fn scale_highpass(&self, j: u32) -> Result<Taps> {
        self.check_scale(j)?;
        self.highpass(self.profile.finest() as i64 - j as i64)
    }

    /// Lowpass that completes the coarsest highpass: `h_L` with `L = n_scales`.
    pub fn coarse_lowpass(&self) -> Result<Taps> {
        self.lowpass(self.profile.n_scales() as i64)
    }

    /// Unsheared directional factor: the dilated fan convolved along axis 1
    /// with the matching lowpass cascade.
    pub fn wedge(&self, j: u32) -> Result<Kernel2> {
        let d = self.check_scale(j)? as i64;
        let big_j = self.profile.finest() as i64;
        let (up0, up1, level) = match self.wedge {
            WedgeScaling::FinestScale => (0, d + 1, d + 1),
            WedgeScaling::PerScale => (
                big_j - j as i64 - 1,
                big_j - j as i64 + d,
                big_j - j as i64 + d,
            ),
        };
        let fan = self
            .normalized_fan()
            .upsample([1usize << up0, 1usize << up1]);
        Ok(fan.convolve_axis(1, &self.lowpass(level)?))
    }
}

/// `W_j = g_{J-j} ⊗ h_{J-(j-d_j)}` (highpass along axis 0).
pub fn build_wavelet_tensor(j: i64, d: i64, big_j: i64, qmf: &QmfPair) -> Result<Kernel2> {
    let g_level = big_j - j;
    let h_level = big_j - (j - d);
    if g_level < 1 || h_level < 0 {
        return Err(Error::Domain(format!(
            "cascade levels ({g_level}, {h_level}) out of range"
        )));
    }
    let g = cascade(qmf, g_level as i32)?.highpass;
    let h = cascade(qmf, h_level as i32)?.lowpass;
    Ok(Kernel2::outer(&g, &h))
}

/// The sheared directional factor at scale `j` and shear `k`, without the
/// highpass: `S^{d_j}_{k/2^{d_j}}` applied to the wedge.
pub fn build_phi_component(config: &SystemConfig, j: u32, k: i64) -> Result<Kernel2> {
    let d = config.check_scale(j)?;
    let wedge = config.wedge(j)?;
    shear_kernel(&wedge, k, d, &config.lowpass(d as i64)?)
}

pub(crate) fn check_extent(shape: &[usize]) -> Result<()> {
    if shape.iter().any(|&n| n < MIN_EXTENT) {
        return Err(Error::UnsupportedSize {
            dims: shape.to_vec(),
            min: MIN_EXTENT,
        });
    }
    Ok(())
}

pub(crate) fn check_shear_range(k: i64, d: u32) -> Result<()> {
    if k.unsigned_abs() > 1u64 << d {
        return Err(Error::Domain(format!("|k| = {} exceeds 2^{d}", k.abs())));
    }
    Ok(())
}

/// Pieces from which a 3D filter is assembled on demand.
#[derive(Clone, Debug)]
pub(crate) struct Factored3 {
    /// Per filter (lowpass excluded): (scale slot, pyramid 0..3, k1, k2).
    pub recipes: Vec<(usize, usize, i64, i64)>,
    pub scales: Vec<ScaleFactors3>,
    pub lowpass: [Vec<Complex64>; 3],
}

#[derive(Clone, Debug)]
pub(crate) struct ScaleFactors3 {
    pub k_max: i64,
    /// `ĝ_{J-j}` sampled along each axis.
    pub highpass: [Vec<Complex64>; 3],
    /// `planes[a][b][k + k_max]`: the sheared factor on the (a, b) plane,
    /// shaped `(N_a, N_b)`; empty when a == b.
    pub planes: Vec<Vec<Vec<ndarray::Array2<Complex64>>>>,
}

/// Principal axis and the two secondary axes for each pyramid.
pub(crate) const PYRAMID_AXES: [[usize; 3]; 3] = [[0, 1, 2], [1, 0, 2], [2, 0, 1]];

impl Factored3 {
    fn materialize(&self, shape: &[usize], i: usize) -> ArrayD<Complex64> {
        if i == 0 {
            let [l0, l1, l2] = &self.lowpass;
            return ArrayD::from_shape_fn(IxDyn(shape), |ix| l0[ix[0]] * l1[ix[1]] * l2[ix[2]]);
        }
        let (slot, pyr, k1, k2) = self.recipes[i - 1];
        let s = &self.scales[slot];
        let [a, b, c] = PYRAMID_AXES[pyr];
        let g = &s.highpass[a];
        let w1 = &s.planes[a][b][(k1 + s.k_max) as usize];
        let w2 = &s.planes[a][c][(k2 + s.k_max) as usize];
        ArrayD::from_shape_fn(IxDyn(shape), |ix| {
            let (na, nb, nc) = (ix[a], ix[b], ix[c]);
            g[na] * w1[[na, nb]] * w2[[na, nc]]
        })
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Storage {
    Dense(Vec<ArrayD<Complex64>>),
    Factored(Box<Factored3>),
}

/// A complete digital shearlet system on a fixed periodic grid: one
/// frequency response per filter, the frame weight `Ψ̂ = Σ|ψ̂_i|²` and the
/// spatial L2 norm of every filter. Index 0 is always the lowpass.
#[derive(Clone, Debug)]
pub struct ShearletSystem {
    shape: Vec<usize>,
    config: Option<SystemConfig>,
    indices: Vec<FilterIndex>,
    storage: Storage,
    weight: ArrayD<f64>,
    norms: Vec<f64>,
}

fn filter_norm(f: &ArrayD<Complex64>) -> f64 {
    (f.iter().map(|v| v.norm_sqr()).sum::<f64>() / f.len() as f64).sqrt()
}

impl ShearletSystem {
    pub(crate) fn assemble(
        shape: Vec<usize>,
        config: Option<SystemConfig>,
        indices: Vec<FilterIndex>,
        storage: Storage,
    ) -> Result<Self> {
        let mut sys = ShearletSystem {
            weight: ArrayD::zeros(IxDyn(&shape)),
            shape,
            config,
            indices,
            storage,
            norms: Vec::new(),
        };
        // Fixed-size chunks summed in order keep the weight bit-identical
        // regardless of how many threads ran.
        let n = sys.len();
        let ids: Vec<usize> = (0..n).collect();
        let partials: Vec<(ArrayD<f64>, Vec<f64>)> = ids
            .par_chunks(8)
            .map(|chunk| {
                let mut acc = ArrayD::<f64>::zeros(IxDyn(&sys.shape));
                let mut norms = Vec::with_capacity(chunk.len());
                for &i in chunk {
                    let f = sys.filter(i);
                    acc.zip_mut_with(&f, |a, v| *a += v.norm_sqr());
                    norms.push(filter_norm(&f));
                }
                (acc, norms)
            })
            .collect();
        let mut weight = ArrayD::<f64>::zeros(IxDyn(&sys.shape));
        for (p, norms) in partials {
            weight += &p;
            sys.norms.extend(norms);
        }
        let min = weight.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min >= SINGULAR_FLOOR) {
            return Err(Error::SingularFrame {
                min,
                floor: SINGULAR_FLOOR,
            });
        }
        sys.weight = weight;
        Ok(sys)
    }

    /// A system from explicit frequency responses; the first must be the lowpass.
    pub fn from_filters(
        shape: &[usize],
        indices: Vec<FilterIndex>,
        filters: Vec<ArrayD<Complex64>>,
    ) -> Result<Self> {
        if indices.len() != filters.len() || filters.is_empty() {
            return Err(Error::Shape(format!(
                "{} indices for {} filters",
                indices.len(),
                filters.len()
            )));
        }
        if let Some(f) = filters.iter().find(|f| f.shape() != shape) {
            return Err(Error::Shape(format!(
                "filter shape {:?} differs from grid {shape:?}",
                f.shape()
            )));
        }
        Self::assemble(shape.to_vec(), None, indices, Storage::Dense(filters))
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    /// Number of filters, i.e. the redundancy.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[FilterIndex] {
        &self.indices
    }

    pub fn config(&self) -> Option<&SystemConfig> {
        self.config.as_ref()
    }

    /// Frequency response of filter `i`; 3D systems build it on demand.
    pub fn filter(&self, i: usize) -> Cow<'_, ArrayD<Complex64>> {
        match &self.storage {
            Storage::Dense(v) => Cow::Borrowed(&v[i]),
            Storage::Factored(f) => Cow::Owned(f.materialize(&self.shape, i)),
        }
    }

    /// `γ̂_i = ψ̂_i / Ψ̂`.
    pub fn dual(&self, i: usize) -> ArrayD<Complex64> {
        let mut f = self.filter(i).into_owned();
        f.zip_mut_with(&self.weight, |v, &w| *v /= w);
        f
    }

    /// `Ψ̂(ξ) = Σ_i |ψ̂_i(ξ)|²`, lowpass included.
    pub fn frame_weight(&self) -> &ArrayD<f64> {
        &self.weight
    }

    /// `(A, B)`: extremes of the frame weight over the grid.
    pub fn frame_bounds(&self) -> (f64, f64) {
        frame_bounds_of(&self.weight)
    }

    /// Spatial L2 norms `‖ψ_i‖₂ = sqrt(Σ|ψ̂_i|² / N)`.
    pub fn filter_norms(&self) -> &[f64] {
        &self.norms
    }

    /// Position of filter `i`'s scale within the profile, `None` for the lowpass.
    pub fn scale_slot(&self, i: usize) -> Option<usize> {
        let idx = self.indices[i];
        if idx.is_lowpass() {
            return None;
        }
        let j0 = self.config.as_ref().map_or(0, |c| c.profile.j0) as i32;
        Some((idx.scale - j0) as usize)
    }

    pub fn n_scales(&self) -> usize {
        match &self.config {
            Some(c) => c.profile.n_scales(),
            None => self
                .indices
                .iter()
                .filter(|i| !i.is_lowpass())
                .map(|i| i.scale + 1)
                .max()
                .unwrap_or(0) as usize,
        }
    }
}

pub fn frame_weight(system: &ShearletSystem) -> &ArrayD<f64> {
    system.frame_weight()
}

pub fn frame_bounds(system: &ShearletSystem) -> (f64, f64) {
    system.frame_bounds()
}

/// All duals at once; prefer [`ShearletSystem::dual`] for large systems.
pub fn dual_filters(system: &ShearletSystem) -> Vec<ArrayD<Complex64>> {
    (0..system.len()).map(|i| system.dual(i)).collect()
}

fn frame_bounds_of(w: &ArrayD<f64>) -> (f64, f64) {
    w.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        })
}

/// `R = 1 + Σ_j 2(2·2^{d_j} + 1)`, or `1 + Σ_j 2^{d_j + 2}` with omission.
pub fn redundancy_2d(profile: &ScaleProfile, full_system: bool) -> usize {
    1 + profile
        .shear_levels
        .iter()
        .map(|&d| {
            let n = 2 * (1usize << d) + 1;
            if full_system {
                2 * n
            } else {
                2 * n - 2
            }
        })
        .sum::<usize>()
}

/// `R = 1 + Σ_j 3n²` with `n = 2·2^{d_j} + 1`, or `1 + Σ_j (3n² - 6n + 4)` with omission.
pub fn redundancy_3d(profile: &ScaleProfile, full_system: bool) -> usize {
    1 + profile
        .shear_levels
        .iter()
        .map(|&d| {
            let n = 2 * (1usize << d) + 1;
            if full_system {
                3 * n * n
            } else {
                3 * n * n - 6 * n + 4
            }
        })
        .sum::<usize>()
}
