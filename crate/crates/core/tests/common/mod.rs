#![allow(dead_code, clippy::needless_range_loop)]

use ndarray::{ArrayD, IxDyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use shearlet::Taps;

/// Uniform samples on [-1, 1), reproducible from `seed`.
pub fn random_signal(shape: &[usize], seed: u64) -> ArrayD<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    ArrayD::from_shape_simple_fn(IxDyn(shape), || rng.random_range(-1.0..1.0))
}

pub fn l2(x: &ArrayD<f64>) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &ArrayD<f64>, b: &ArrayD<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Circular shift by `offsets`: `out[n] = x[n - offsets]`.
pub fn roll(x: &ArrayD<f64>, offsets: &[isize]) -> ArrayD<f64> {
    let shape = x.shape().to_vec();
    let mut out = ArrayD::zeros(x.raw_dim());
    for (ix, &v) in x.indexed_iter() {
        let dst: Vec<usize> = (0..shape.len())
            .map(|a| (ix[a] as isize + offsets[a]).rem_euclid(shape[a] as isize) as usize)
            .collect();
        out[IxDyn(&dst)] = v;
    }
    out
}

/// `out(n) = Σ_m taps(m) · f(n + m)` with `m` measured from `center`.
pub fn correlate(f: &ArrayD<f64>, taps: &ArrayD<f64>, center: &[usize]) -> ArrayD<f64> {
    let shape = f.shape().to_vec();
    ArrayD::from_shape_fn(f.raw_dim(), |n| {
        let mut acc = 0.0;
        for (m, &v) in taps.indexed_iter() {
            if v == 0.0 {
                continue;
            }
            let src: Vec<usize> = (0..shape.len())
                .map(|a| {
                    (n[a] as isize + m[a] as isize - center[a] as isize)
                        .rem_euclid(shape[a] as isize) as usize
                })
                .collect();
            acc += v * f[IxDyn(&src)];
        }
        acc
    })
}

/// The five stages written out with explicit loops on a 2D periodic grid,
/// shearing axis 0 along axis 1.
pub fn literal_shear(x: &ArrayD<f64>, k: i64, d: u32, h: &Taps) -> ArrayD<f64> {
    let (n0, n1) = (x.shape()[0], x.shape()[1]);
    let m = 1usize << d;
    let big = n0 * m;
    // 1. zero insertion
    let mut up = vec![vec![0.0; n1]; big];
    for i in 0..n0 {
        for j in 0..n1 {
            up[i * m][j] = x[[i, j]];
        }
    }
    let conv = |src: &Vec<Vec<f64>>, taps: &[f64], center: isize| {
        let mut out = vec![vec![0.0; n1]; big];
        for i in 0..big {
            for j in 0..n1 {
                let mut acc = 0.0;
                for (t, &w) in taps.iter().enumerate() {
                    let src_i =
                        (i as isize - (t as isize - center)).rem_euclid(big as isize) as usize;
                    acc += w * src[src_i][j];
                }
                out[i][j] = acc;
            }
        }
        out
    };
    // 2. interpolate
    let smooth = conv(&up, h.as_slice(), h.center() as isize);
    // 3. integer shear
    let mut sheared = vec![vec![0.0; n1]; big];
    for i in 0..big {
        for j in 0..n1 {
            let src = (i as i64 + k * j as i64).rem_euclid(big as i64) as usize;
            sheared[i][j] = smooth[src][j];
        }
    }
    // 4. reversed interpolation filter
    let rev: Vec<f64> = h.as_slice().iter().rev().cloned().collect();
    let back = conv(&sheared, &rev, (h.len() - 1 - h.center()) as isize);
    // 5. decimate and rescale
    ArrayD::from_shape_fn(IxDyn(&[n0, n1]), |ix| back[ix[0] * m][ix[1]] * m as f64)
}
