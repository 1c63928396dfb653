//! Binary PGM (P5) images and SVOL volumes.
//!
//! SVOL layout: magic `SVOL`, version u16, three u32 dims, then f64 samples
//! in row-major order, everything little-endian. A stack of 2D frames maps
//! to dims `(frames, rows, cols)`.

use std::fs;
use std::path::Path;

use ndarray::{Array2, Array3, ArrayD};

use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A grayscale image with its declared maximum value.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub data: Array2<f64>,
    pub maxval: u16,
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let bad = |m: &str| Error::Format(format!("PGM: {m}"));
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("missing P5 magic"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("malformed header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| bad("header number out of range"))?;
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("header not terminated by whitespace"));
    }
    pos += 1;
    let [w, h, maxval] = fields;
    if w == 0 || h == 0 || maxval == 0 || maxval > 65535 {
        return Err(bad("invalid width, height or maxval"));
    }
    let wide = maxval > 255;
    let need = w * h * if wide { 2 } else { 1 };
    let body = &bytes[pos..];
    if body.len() < need {
        return Err(bad("truncated pixel data"));
    }
    let data = Array2::from_shape_fn((h, w), |(r, c)| {
        let i = r * w + c;
        if wide {
            u16::from_be_bytes([body[2 * i], body[2 * i + 1]]) as f64
        } else {
            body[i] as f64
        }
    });
    Ok(Image {
        data,
        maxval: maxval as u16,
    })
}

/// Clamps to `[0, maxval]` and rounds to the nearest integer.
pub fn encode_pgm(data: &Array2<f64>, maxval: u16) -> Vec<u8> {
    let (h, w) = data.dim();
    let mut out = format!("P5\n{w} {h}\n{maxval}\n").into_bytes();
    for &v in data.iter() {
        let q = v.clamp(0.0, maxval as f64).round();
        let q = if q.is_nan() { 0.0 } else { q };
        if maxval > 255 {
            out.extend_from_slice(&(q as u16).to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    out
}

pub fn read_pgm(path: &Path) -> Result<Image> {
    decode_pgm(&fs::read(path).map_err(io_err(path))?)
}

pub fn write_pgm(path: &Path, data: &Array2<f64>, maxval: u16) -> Result<()> {
    fs::write(path, encode_pgm(data, maxval)).map_err(io_err(path))
}

const SVOL_MAGIC: &[u8; 4] = b"SVOL";
const SVOL_VERSION: u16 = 1;

pub fn encode_svol(vol: &Array3<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(18 + vol.len() * 8);
    out.extend_from_slice(SVOL_MAGIC);
    out.extend_from_slice(&SVOL_VERSION.to_le_bytes());
    for &d in vol.shape() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for &v in vol.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_svol(bytes: &[u8]) -> Result<Array3<f64>> {
    let bad = |m: String| Error::Format(format!("SVOL: {m}"));
    if bytes.len() < 18 || &bytes[..4] != SVOL_MAGIC {
        return Err(bad("missing magic or header".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != SVOL_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let dim =
        |i: usize| u32::from_le_bytes(bytes[6 + 4 * i..10 + 4 * i].try_into().unwrap()) as usize;
    let shape = [dim(0), dim(1), dim(2)];
    let n: usize = shape.iter().product();
    let body = &bytes[18..];
    if body.len() != n * 8 {
        return Err(bad(format!(
            "expected {} sample bytes, found {}",
            n * 8,
            body.len()
        )));
    }
    let vals = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Array3::from_shape_vec(shape, vals).expect("sized"))
}

pub fn read_svol(path: &Path) -> Result<Array3<f64>> {
    decode_svol(&fs::read(path).map_err(io_err(path))?)
}

pub fn write_svol(path: &Path, vol: &Array3<f64>) -> Result<()> {
    fs::write(path, encode_svol(vol)).map_err(io_err(path))
}

/// A 2D image or 3D volume loaded by sniffing the file's magic.
#[derive(Clone, Debug)]
pub enum Loaded {
    Image(Image),
    Volume(Array3<f64>),
}

impl Loaded {
    pub fn signal(&self) -> ArrayD<f64> {
        match self {
            Loaded::Image(img) => img.data.clone().into_dyn(),
            Loaded::Volume(v) => v.clone().into_dyn(),
        }
    }
}

pub fn read_signal(path: &Path) -> Result<Loaded> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.starts_with(b"P5") {
        Ok(Loaded::Image(decode_pgm(&bytes)?))
    } else if bytes.starts_with(SVOL_MAGIC) {
        Ok(Loaded::Volume(decode_svol(&bytes)?))
    } else {
        Err(Error::Format(format!(
            "{}: neither a P5 PGM nor an SVOL volume",
            path.display()
        )))
    }
}

/// Writes `signal` in the same format as `like`: PGM at its bit depth or SVOL.
pub fn write_signal(path: &Path, signal: &ArrayD<f64>, like: &Loaded) -> Result<()> {
    match like {
        Loaded::Image(img) => {
            let a = signal
                .clone()
                .into_dimensionality::<ndarray::Ix2>()
                .map_err(|_| Error::Shape("expected a 2D signal".into()))?;
            write_pgm(path, &a, img.maxval)
        }
        Loaded::Volume(_) => {
            let a = signal
                .clone()
                .into_dimensionality::<ndarray::Ix3>()
                .map_err(|_| Error::Shape("expected a 3D signal".into()))?;
            write_svol(path, &a)
        }
    }
}
