//! One- and two-dimensional building-block filters.
//!
//! Frequencies are in cycles per sample: a filter's response is periodic
//! with period 1 and the Nyquist frequency is 1/2.

use std::f64::consts::PI;

use ndarray::{s, Array2};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A finite real 1D filter. `center` is the array position of the tap at n = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Taps {
    taps: Vec<f64>,
    center: usize,
}

impl Taps {
    pub fn new(taps: Vec<f64>, center: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidFilter("empty tap sequence".into()));
        }
        if center >= taps.len() {
            return Err(Error::InvalidFilter(format!(
                "center {center} outside {} taps",
                taps.len()
            )));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidFilter("non-finite tap".into()));
        }
        Ok(Taps { taps, center })
    }

    /// Taps centered at `(len - 1) / 2`.
    pub fn centered(taps: Vec<f64>) -> Result<Self> {
        let c = taps.len().saturating_sub(1) / 2;
        Self::new(taps, c)
    }

    pub fn impulse() -> Self {
        Taps {
            taps: vec![1.0],
            center: 0,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.taps
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// `(n, h(n))` pairs with `n` relative to the center.
    pub fn iter_offsets(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        let c = self.center as isize;
        self.taps
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as isize - c, v))
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }

    /// `ĥ(ξ) = Σ h(n) e^{-2πi n ξ}`.
    pub fn response(&self, xi: f64) -> Complex64 {
        self.iter_offsets()
            .map(|(n, v)| v * Complex64::cis(-2.0 * PI * n as f64 * xi))
            .sum()
    }

    /// Zero insertion: the response of the result is `ĥ(factor·ξ)`.
    pub fn upsample(&self, factor: usize) -> Taps {
        assert!(factor >= 1);
        let mut out = vec![0.0; (self.len() - 1) * factor + 1];
        for (i, &v) in self.taps.iter().enumerate() {
            out[i * factor] = v;
        }
        Taps {
            taps: out,
            center: self.center * factor,
        }
    }

    /// Full linear convolution.
    pub fn convolve(&self, other: &Taps) -> Taps {
        let mut out = vec![0.0; self.len() + other.len() - 1];
        for (i, &a) in self.taps.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.taps.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Taps {
            taps: out,
            center: self.center + other.center,
        }
    }

    /// `h(-n)`.
    pub fn reversed(&self) -> Taps {
        let mut taps = self.taps.clone();
        taps.reverse();
        Taps {
            center: self.len() - 1 - self.center,
            taps,
        }
    }

    /// Wraps the taps onto a periodic grid of length `n`, center at index 0.
    pub fn periodize(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (k, v) in self.iter_offsets() {
            out[k.rem_euclid(n as isize) as usize] += v;
        }
        out
    }

    /// DFT of the periodized taps, i.e. `ĥ(m/n)` for `m = 0..n`.
    pub fn spectrum(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|m| self.response(m as f64 / n as f64)).collect()
    }
}

/// The default 9-tap maximally flat lowpass, normalized to `Σ h(n) = 1`.
///
/// With `x = sin²(πξ)` its response is the quartic
/// `1 - (15 - 8√2) x³ + (14 - 8√2) x⁴`: flat to third order at DC, zero at
/// Nyquist and exactly `1/√2` at `ξ = 1/4`. The taps are the cosine
/// coefficients of that polynomial.
pub fn default_lowpass() -> Taps {
    let r2 = 2f64.sqrt();
    let (a3, a4) = (15.0 - 8.0 * r2, 14.0 - 8.0 * r2);
    // A degree-4 cosine polynomial is recovered exactly from 64 samples.
    let m = 64;
    let samples: Vec<f64> = (0..m)
        .map(|i| {
            let w = 2.0 * PI * i as f64 / m as f64;
            let x = (w / 2.0).sin().powi(2);
            1.0 - a3 * x.powi(3) + a4 * x.powi(4)
        })
        .collect();
    let taps = (-4i32..=4)
        .map(|n| {
            samples
                .iter()
                .enumerate()
                .map(|(i, &h)| h * (2.0 * PI * (n * i as i32) as f64 / m as f64).cos())
                .sum::<f64>()
                / m as f64
        })
        .collect();
    Taps { taps, center: 4 }
}

/// `g(n) = (-1)^n h(n)`, `n` relative to the center.
pub fn mirror_highpass(lowpass: &Taps) -> Taps {
    let taps = lowpass
        .iter_offsets()
        .map(|(n, v)| if n.rem_euclid(2) == 0 { v } else { -v })
        .collect();
    Taps {
        taps,
        center: lowpass.center,
    }
}

/// `max_l |2 Σ_n h(n) h(n + 2l) - δ_{l0}|`.
pub fn orthonormality_defect(taps: &[f64]) -> f64 {
    let len = taps.len() as isize;
    let mut worst = 0.0f64;
    let mut l = 0isize;
    while 2 * l < len {
        let mut acc = 0.0;
        for n in 0..len - 2 * l {
            acc += taps[n as usize] * taps[(n + 2 * l) as usize];
        }
        let target = if l == 0 { 1.0 } else { 0.0 };
        worst = worst.max((2.0 * acc - target).abs());
        l += 1;
    }
    // Negative shifts mirror positive ones.
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct QmfPair {
    pub lowpass: Taps,
    pub highpass: Taps,
}

impl QmfPair {
    /// Pairs a lowpass with its mirror highpass.
    pub fn from_lowpass(lowpass: Taps) -> Self {
        let highpass = mirror_highpass(&lowpass);
        QmfPair { lowpass, highpass }
    }
}

impl Default for QmfPair {
    fn default() -> Self {
        QmfPair::from_lowpass(default_lowpass())
    }
}

/// Level-j cascades: `ĥ_j(ξ) = Π_{k<j} ĥ(2^k ξ)` and `ĝ_j(ξ) = ĝ(2^{j-1} ξ) ĥ_{j-1}(ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterCascade {
    pub level: usize,
    pub lowpass: Taps,
    /// Undefined at level 0; the unit impulse stands in there.
    pub highpass: Taps,
}

pub fn cascade(pair: &QmfPair, level: i32) -> Result<FilterCascade> {
    if level < 0 {
        return Err(Error::Domain(format!("negative cascade level {level}")));
    }
    let level = level as usize;
    let mut h = Taps::impulse();
    let mut g = Taps::impulse();
    for k in 0..level {
        let factor = 1usize << k;
        if k + 1 == level {
            g = h.convolve(&pair.highpass.upsample(factor));
        }
        h = h.convolve(&pair.lowpass.upsample(factor));
    }
    Ok(FilterCascade {
        level,
        lowpass: h,
        highpass: g,
    })
}

/// A finite real 2D filter with an explicit center tap.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2 {
    taps: Array2<f64>,
    center: [usize; 2],
}

impl Kernel2 {
    pub fn new(taps: Array2<f64>, center: [usize; 2]) -> Result<Self> {
        let (r, c) = taps.dim();
        if r == 0 || c == 0 {
            return Err(Error::InvalidFilter("empty 2D tap grid".into()));
        }
        if center[0] >= r || center[1] >= c {
            return Err(Error::InvalidFilter(format!(
                "center {center:?} outside {r}x{c} grid"
            )));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidFilter("non-finite tap".into()));
        }
        Ok(Kernel2 { taps, center })
    }

    pub fn impulse() -> Self {
        Kernel2 {
            taps: Array2::from_elem((1, 1), 1.0),
            center: [0, 0],
        }
    }

    /// `a(n0) b(n1)`.
    pub fn outer(a: &Taps, b: &Taps) -> Self {
        let taps = Array2::from_shape_fn((a.len(), b.len()), |(i, j)| {
            a.as_slice()[i] * b.as_slice()[j]
        });
        Kernel2 {
            taps,
            center: [a.center(), b.center()],
        }
    }

    pub fn taps(&self) -> &Array2<f64> {
        &self.taps
    }

    pub fn center(&self) -> [usize; 2] {
        self.center
    }

    pub fn dim(&self) -> (usize, usize) {
        self.taps.dim()
    }

    pub fn sum(&self) -> f64 {
        self.taps.sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.taps.iter().map(|v| v.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Kernel2 {
        Kernel2 {
            taps: &self.taps * factor,
            center: self.center,
        }
    }

    pub fn response(&self, xi0: f64, xi1: f64) -> Complex64 {
        let [c0, c1] = self.center;
        let mut acc = Complex64::new(0.0, 0.0);
        for ((i, j), &v) in self.taps.indexed_iter() {
            if v == 0.0 {
                continue;
            }
            let n0 = i as f64 - c0 as f64;
            let n1 = j as f64 - c1 as f64;
            acc += v * Complex64::cis(-2.0 * PI * (n0 * xi0 + n1 * xi1));
        }
        acc
    }

    /// Zero insertion by `factors[axis]` along each axis.
    pub fn upsample(&self, factors: [usize; 2]) -> Kernel2 {
        let (r, c) = self.dim();
        let [f0, f1] = factors;
        let mut out = Array2::zeros(((r - 1) * f0 + 1, (c - 1) * f1 + 1));
        out.slice_mut(s![..;f0, ..;f1]).assign(&self.taps);
        Kernel2 {
            taps: out,
            center: [self.center[0] * f0, self.center[1] * f1],
        }
    }

    /// Full linear convolution with `t` along `axis`.
    pub fn convolve_axis(&self, axis: usize, t: &Taps) -> Kernel2 {
        let (r, c) = self.dim();
        let (nr, nc) = if axis == 0 {
            (r + t.len() - 1, c)
        } else {
            (r, c + t.len() - 1)
        };
        let mut out = Array2::zeros((nr, nc));
        for (k, &w) in t.as_slice().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut dst = if axis == 0 {
                out.slice_mut(s![k..k + r, ..])
            } else {
                out.slice_mut(s![.., k..k + c])
            };
            dst.scaled_add(w, &self.taps);
        }
        let mut center = self.center;
        center[axis] += t.center();
        Kernel2 { taps: out, center }
    }

    pub fn transpose(&self) -> Kernel2 {
        Kernel2 {
            taps: self.taps.t().to_owned(),
            center: [self.center[1], self.center[0]],
        }
    }

    /// Wraps the taps onto a periodic `shape` grid, center at the origin.
    pub fn periodize(&self, shape: [usize; 2]) -> Array2<f64> {
        let mut out = Array2::zeros((shape[0], shape[1]));
        let [c0, c1] = self.center;
        let [n0, n1] = [shape[0] as isize, shape[1] as isize];
        for ((i, j), &v) in self.taps.indexed_iter() {
            if v == 0.0 {
                continue;
            }
            let a = (i as isize - c0 as isize).rem_euclid(n0) as usize;
            let b = (j as isize - c1 as isize).rem_euclid(n1) as usize;
            out[[a, b]] += v;
        }
        out
    }
}

fn check_power_of_two(f: usize) -> Result<()> {
    if f == 0 || !f.is_power_of_two() {
        return Err(Error::Domain(format!(
            "upsampling factor {f} is not a power of two"
        )));
    }
    Ok(())
}

/// Zero-insertion upsampling: the result has response `P̂(2^a ξ0, 2^b ξ1)`.
pub fn upsample_filter_2d(
    filter: &Kernel2,
    factor_rows: usize,
    factor_cols: usize,
) -> Result<Kernel2> {
    check_power_of_two(factor_rows)?;
    check_power_of_two(factor_cols)?;
    Ok(filter.upsample([factor_rows, factor_cols]))
}

const DEFAULT_FAN_ASSET: &str = include_str!("../assets/fan_dmaxflat4.txt");
/// sha256 of `assets/fan_dmaxflat4.txt` as written by `tools/gen_fan_filter.py`.
pub const DEFAULT_FAN_SHA256: &str =
    "b3b4f85c104bb35e86b6bf3334d72b47aeb80284d77d6190195e4aba0a91ef67";
pub const DEFAULT_FAN_PROVENANCE: &str = "dmaxflat4-diamond/mcclellan/modulated v1";

/// Directional 2D filter whose passband is the horizontal fan `|ξ1| < |ξ0|`.
#[derive(Clone, Debug, PartialEq)]
pub struct FanFilter {
    pub kernel: Kernel2,
    pub provenance: String,
    /// sha256 of the text the taps were parsed from.
    pub checksum: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl FanFilter {
    /// Parses the plain-text matrix format: a header line
    /// `rows cols center_row center_col` followed by the rows.
    pub fn parse(text: &str, provenance: &str) -> Result<Self> {
        let bad = |m: String| Error::Asset(m);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("empty fan filter text".into()))?
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(format!("bad header: {e}")))?;
        let [rows, cols, cr, cc] = header[..] else {
            return Err(bad(format!("header needs 4 fields, got {}", header.len())));
        };
        if rows % 2 == 0 || cols % 2 == 0 {
            return Err(bad(format!("grid {rows}x{cols} must be odd in both axes")));
        }
        let mut taps = Array2::zeros((rows, cols));
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("missing row {r}")))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(format!("row {r}: {e}")))?;
            if vals.len() != cols {
                return Err(bad(format!(
                    "row {r} has {} values, want {cols}",
                    vals.len()
                )));
            }
            for (c, v) in vals.into_iter().enumerate() {
                taps[[r, c]] = v;
            }
        }
        if lines.next().is_some() {
            return Err(bad("trailing data after the last row".into()));
        }
        let kernel = Kernel2::new(taps, [cr, cc]).map_err(|e| bad(e.to_string()))?;
        Ok(FanFilter {
            kernel,
            provenance: provenance.to_string(),
            checksum: sha256_hex(text.as_bytes()),
        })
    }

    /// Parses `text` after checking it against a recorded checksum.
    pub fn from_asset(text: &str, expected_sha256: &str, provenance: &str) -> Result<Self> {
        let got = sha256_hex(text.as_bytes());
        if got != expected_sha256 {
            return Err(Error::Asset(format!(
                "checksum mismatch: expected {expected_sha256}, got {got}"
            )));
        }
        Self::parse(text, provenance)
    }

    /// The all-pass degenerate fan: a single unit tap.
    pub fn impulse() -> Self {
        let text = "1 1 0 0\n1\n";
        FanFilter {
            kernel: Kernel2::impulse(),
            provenance: "impulse".into(),
            checksum: sha256_hex(text.as_bytes()),
        }
    }

    pub fn to_text(&self) -> String {
        let (r, c) = self.kernel.dim();
        let [cr, cc] = self.kernel.center();
        let mut out = format!("{r} {c} {cr} {cc}\n");
        for row in self.kernel.taps().rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

/// The shipped maximally flat fan filter.
pub fn default_fan_filter() -> Result<FanFilter> {
    FanFilter::from_asset(
        DEFAULT_FAN_ASSET,
        DEFAULT_FAN_SHA256,
        DEFAULT_FAN_PROVENANCE,
    )
}

/// Number of scales, per-scale shear levels `d_j` and the coarsest scale `j0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleProfile {
    pub shear_levels: Vec<u32>,
    pub j0: u32,
}

impl ScaleProfile {
    pub fn new(shear_levels: Vec<u32>, j0: u32) -> Self {
        ScaleProfile { shear_levels, j0 }
    }

    pub fn sl2d_1() -> Self {
        Self::new(vec![0, 0, 1, 1], 0)
    }

    pub fn sl2d_2() -> Self {
        Self::new(vec![1, 1, 2, 2], 0)
    }

    pub fn sl3d_1() -> Self {
        Self::new(vec![0, 0, 1], 0)
    }

    pub fn sl3d_2() -> Self {
        Self::new(vec![1, 1, 2], 0)
    }

    pub fn n_scales(&self) -> usize {
        self.shear_levels.len()
    }

    /// `J = j0 + n_scales`; cascade levels are taken relative to it.
    pub fn finest(&self) -> u32 {
        self.j0 + self.n_scales() as u32
    }

    /// `(j, d_j)` for absolute scales `j0 .. J`, coarse to fine.
    pub fn scales(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.shear_levels
            .iter()
            .enumerate()
            .map(move |(i, &d)| (self.j0 + i as u32, d))
    }
}

/// `d_j = ⌈(2 - α_j) j / 2⌉` for absolute scales `j_start, j_start + 1, ...`.
pub fn alpha_to_shear_levels(alpha: &[f64], j_start: u32) -> Result<Vec<u32>> {
    alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if !(a > 0.0 && a < 2.0) {
                return Err(Error::Domain(format!("alpha {a} outside (0, 2)")));
            }
            let j = (j_start + i as u32) as f64;
            // Guard against 2.0000000000000004-style round-up.
            Ok(((2.0 - a) * j / 2.0 - 1e-9).ceil().max(0.0) as u32)
        })
        .collect()
}
