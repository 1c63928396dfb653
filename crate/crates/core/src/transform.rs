//! Forward and inverse undecimated shearlet transform by pointwise
//! multiplication in the DFT domain, plus the SHCF coefficient file format.

use std::io::{Read, Write};

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{fft_inplace, fft_real, ifft_inplace};
use crate::system::{FilterIndex, FilterKind, ShearletSystem};

/// Largest tolerated imaginary residue of a band relative to `‖f‖₂`.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-8;
/// Filters per partial sum in the inverse; fixed so results do not depend
/// on the thread count.
const REDUCE_CHUNK: usize = 4;

/// One real band per system filter, each the size of the input.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientStack {
    pub shape: Vec<usize>,
    pub indices: Vec<FilterIndex>,
    pub bands: Vec<ArrayD<f64>>,
}

impl CoefficientStack {
    pub fn zeros(system: &ShearletSystem) -> Self {
        CoefficientStack {
            shape: system.shape().to_vec(),
            indices: system.indices().to_vec(),
            bands: vec![ArrayD::zeros(IxDyn(system.shape())); system.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    /// `Σ_i ‖band_i‖²`.
    pub fn energy(&self) -> f64 {
        self.bands
            .iter()
            .map(|b| b.iter().map(|v| v * v).sum::<f64>())
            .sum()
    }

    fn check_against(&self, system: &ShearletSystem) -> Result<()> {
        if self.shape != system.shape() {
            return Err(Error::Shape(format!(
                "coefficients on {:?}, system on {:?}",
                self.shape,
                system.shape()
            )));
        }
        if self.indices != system.indices() {
            return Err(Error::Shape(format!(
                "{} coefficient bands do not match the system's {} filters",
                self.len(),
                system.len()
            )));
        }
        if let Some(b) = self
            .bands
            .iter()
            .find(|b| b.shape() != self.shape.as_slice())
        {
            return Err(Error::Shape(format!("band of shape {:?}", b.shape())));
        }
        Ok(())
    }
}

fn l2(x: &ArrayD<f64>) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `band_i = IDFT(conj(ψ̂_i) · f̂)`: periodic cross-correlation of the signal
/// with each filter. Real filters make the bands real; the discarded
/// imaginary part is checked against [`IMAGINARY_RESIDUE_LIMIT`].
pub fn forward(signal: &ArrayD<f64>, system: &ShearletSystem) -> Result<CoefficientStack> {
    if signal.shape() != system.shape() {
        return Err(Error::Shape(format!(
            "signal {:?} vs system {:?}",
            signal.shape(),
            system.shape()
        )));
    }
    let spectrum = fft_real(signal.view());
    let norm = l2(signal);
    let bands = (0..system.len())
        .into_par_iter()
        .map(|i| {
            let mut prod = system.filter(i).into_owned();
            prod.zip_mut_with(&spectrum, |p, s| *p = p.conj() * s);
            ifft_inplace(&mut prod);
            let residue = prod.iter().map(|v| v.im * v.im).sum::<f64>().sqrt();
            if residue > IMAGINARY_RESIDUE_LIMIT * norm {
                return Err(Error::Numerical(format!(
                    "band {i} has imaginary residue {residue:e} for signal norm {norm:e}"
                )));
            }
            Ok(prod.mapv(|v| v.re))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientStack {
        shape: system.shape().to_vec(),
        indices: system.indices().to_vec(),
        bands,
    })
}

/// `f = IDFT(Σ_i DFT(band_i) · ψ̂_i / Ψ̂)`, i.e. synthesis with the duals.
pub fn inverse(coeffs: &CoefficientStack, system: &ShearletSystem) -> Result<ArrayD<f64>> {
    coeffs.check_against(system)?;
    let ids: Vec<usize> = (0..system.len()).collect();
    let partials: Vec<ArrayD<Complex64>> = ids
        .par_chunks(REDUCE_CHUNK)
        .map(|chunk| {
            let mut acc = ArrayD::<Complex64>::zeros(IxDyn(system.shape()));
            for &i in chunk {
                let mut band = coeffs.bands[i].mapv(|v| Complex64::new(v, 0.0));
                fft_inplace(&mut band);
                let f = system.filter(i);
                ndarray::Zip::from(&mut acc)
                    .and(&band)
                    .and(&*f)
                    .for_each(|a, &b, &w| *a += b * w);
            }
            acc
        })
        .collect();
    let mut total = ArrayD::<Complex64>::zeros(IxDyn(system.shape()));
    for p in &partials {
        total += p;
    }
    total.zip_mut_with(system.frame_weight(), |v, &w| *v /= w);
    ifft_inplace(&mut total);
    Ok(total.mapv(|v| v.re))
}

/// Same contract as [`forward`]; the engine is dimension-agnostic.
pub fn forward_3d(volume: &ArrayD<f64>, system: &ShearletSystem) -> Result<CoefficientStack> {
    if volume.ndim() != 3 {
        return Err(Error::Shape(format!(
            "expected a volume, got {}D",
            volume.ndim()
        )));
    }
    forward(volume, system)
}

pub fn inverse_3d(coeffs: &CoefficientStack, system: &ShearletSystem) -> Result<ArrayD<f64>> {
    if coeffs.shape.len() != 3 {
        return Err(Error::Shape(format!(
            "expected 3D coefficients, got {}D",
            coeffs.shape.len()
        )));
    }
    inverse(coeffs, system)
}

const MAGIC: &[u8; 4] = b"SHCF";
const VERSION: u16 = 1;

/// Writes the SHCF format: magic, version u16, dimensionality u8, dims u32
/// each, band count u32, index table (kind u8, scale i32, shears 2×i32),
/// then every band as row-major f64. All integers little-endian.
pub fn serialize<W: Write>(coeffs: &CoefficientStack, mut out: W) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&[coeffs.shape.len() as u8])?;
    for &d in &coeffs.shape {
        out.write_all(&(d as u32).to_le_bytes())?;
    }
    out.write_all(&(coeffs.bands.len() as u32).to_le_bytes())?;
    for idx in &coeffs.indices {
        out.write_all(&[idx.kind as u8])?;
        out.write_all(&idx.scale.to_le_bytes())?;
        out.write_all(&idx.shears[0].to_le_bytes())?;
        out.write_all(&idx.shears[1].to_le_bytes())?;
    }
    let mut buf = Vec::new();
    for band in &coeffs.bands {
        buf.clear();
        for v in band.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

pub fn to_bytes(coeffs: &CoefficientStack) -> Vec<u8> {
    let mut out = Vec::new();
    serialize(coeffs, &mut out).expect("writing to memory");
    out
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner
            .read_exact(&mut b)
            .map_err(|_| Error::Format(format!("truncated stream while reading {what}")))?;
        Ok(b)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(what)?))
    }

    fn i32(&mut self, what: &str) -> Result<i32> {
        Ok(i32::from_le_bytes(self.bytes(what)?))
    }
}

/// Reads an SHCF stream written by [`serialize`].
pub fn deserialize<R: Read>(input: R) -> Result<CoefficientStack> {
    let mut r = Reader { inner: input };
    if &r.bytes::<4>("magic")? != MAGIC {
        return Err(Error::Format("bad magic, not an SHCF stream".into()));
    }
    let version = u16::from_le_bytes(r.bytes("version")?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported SHCF version {version}")));
    }
    let ndim = r.bytes::<1>("dimensionality")?[0] as usize;
    if !(2..=3).contains(&ndim) {
        return Err(Error::Format(format!("dimensionality {ndim} not 2 or 3")));
    }
    let shape = (0..ndim)
        .map(|_| r.u32("dims").map(|d| d as usize))
        .collect::<Result<Vec<_>>>()?;
    if shape.contains(&0) {
        return Err(Error::Format(format!("zero extent in {shape:?}")));
    }
    let count = r.u32("band count")? as usize;
    let mut indices = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let kind = r.bytes::<1>("filter kind")?[0];
        let kind = FilterKind::from_u8(kind)
            .ok_or_else(|| Error::Format(format!("unknown filter kind {kind}")))?;
        let scale = r.i32("scale")?;
        let shears = [r.i32("shear")?, r.i32("shear")?];
        indices.push(FilterIndex {
            kind,
            scale,
            shears,
        });
    }
    let n: usize = shape.iter().product();
    let mut bands = Vec::with_capacity(count.min(1 << 16));
    let mut raw = vec![0u8; n * 8];
    for i in 0..count {
        r.inner
            .read_exact(&mut raw)
            .map_err(|_| Error::Format(format!("truncated stream in band {i}")))?;
        let vals: Vec<f64> = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        bands.push(ArrayD::from_shape_vec(IxDyn(&shape), vals).expect("sized"));
    }
    let mut probe = [0u8; 1];
    if r.inner.read(&mut probe).unwrap_or(0) != 0 {
        return Err(Error::Format("trailing bytes after the last band".into()));
    }
    Ok(CoefficientStack {
        shape,
        indices,
        bands,
    })
}

/// Deserializes and checks the header against `system`.
pub fn deserialize_for<R: Read>(input: R, system: &ShearletSystem) -> Result<CoefficientStack> {
    let c = deserialize(input)?;
    if c.len() != system.len() || c.shape != system.shape() {
        return Err(Error::Format(format!(
            "file holds {} bands on {:?}, system has {} filters on {:?}",
            c.len(),
            c.shape,
            system.len(),
            system.shape()
        )));
    }
    c.check_against(system)
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok(c)
}
