//! The digital shear operator on periodic grids and on finite tap arrays.
//!
//! Axis roles: the *sheared* axis is the one whose index gets displaced and
//! refined; the *shear* axis supplies the displacement. A shear by `k` maps
//! `out(n_sheared, n_shear) = in(n_sheared + k·n_shear, n_shear)`.

use ndarray::{ArrayD, Axis, Slice};

use crate::error::{Error, Result};
use crate::filters::{Kernel2, Taps};

fn check_axis(s: &ArrayD<f64>, axis: usize) -> Result<()> {
    if axis >= s.ndim() {
        return Err(Error::Domain(format!(
            "axis {axis} out of range for a {}-dimensional signal",
            s.ndim()
        )));
    }
    Ok(())
}

fn check_factor(factor: usize) -> Result<()> {
    if factor == 0 || !factor.is_power_of_two() {
        return Err(Error::Domain(format!(
            "factor {factor} is not a power of two"
        )));
    }
    Ok(())
}

/// Zero insertion along `axis`; the axis grows by `factor`.
pub fn upsample_axis(s: &ArrayD<f64>, axis: usize, factor: usize) -> Result<ArrayD<f64>> {
    check_axis(s, axis)?;
    check_factor(factor)?;
    let mut shape = s.shape().to_vec();
    shape[axis] *= factor;
    let mut out = ArrayD::zeros(shape);
    out.slice_axis_mut(Axis(axis), Slice::new(0, None, factor as isize))
        .assign(s);
    Ok(out)
}

/// Keeps the samples at indices divisible by `factor` along `axis`.
pub fn downsample_axis(s: &ArrayD<f64>, axis: usize, factor: usize) -> Result<ArrayD<f64>> {
    check_axis(s, axis)?;
    check_factor(factor)?;
    if !s.shape()[axis].is_multiple_of(factor) {
        return Err(Error::Domain(format!(
            "axis length {} not divisible by {factor}",
            s.shape()[axis]
        )));
    }
    Ok(
        s.slice_axis(Axis(axis), Slice::new(0, None, factor as isize))
            .to_owned(),
    )
}

/// Periodic convolution along `axis`, with the tap at `taps.center()` acting
/// at zero offset. Taps longer than the axis are periodized first, which
/// aliases them; that is only sensible when the caller wants exactly that.
pub fn convolve_axis(s: &ArrayD<f64>, taps: &Taps, axis: usize) -> Result<ArrayD<f64>> {
    check_axis(s, axis)?;
    let n = s.shape()[axis];
    let kernel: Vec<(usize, f64)> = taps
        .periodize(n)
        .into_iter()
        .enumerate()
        .filter(|&(_, v)| v != 0.0)
        .collect();
    let mut out = ArrayD::zeros(s.raw_dim());
    let mut lane = vec![0.0; n];
    for (src, mut dst) in s
        .lanes(Axis(axis))
        .into_iter()
        .zip(out.lanes_mut(Axis(axis)))
    {
        for (l, v) in lane.iter_mut().zip(src.iter()) {
            *l = *v;
        }
        for (i, d) in dst.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(m, w) in &kernel {
                acc += w * lane[(i + n - m) % n];
            }
            *d = acc;
        }
    }
    Ok(out)
}

/// Integer shear with periodic wrap along `sheared_axis`. A permutation of
/// the samples, so energy is preserved exactly.
pub fn resample_integer_shear(
    s: &ArrayD<f64>,
    k: i64,
    sheared_axis: usize,
    shear_axis: usize,
) -> Result<ArrayD<f64>> {
    check_axis(s, sheared_axis)?;
    check_axis(s, shear_axis)?;
    if sheared_axis == shear_axis {
        return Err(Error::Domain("sheared and shear axes must differ".into()));
    }
    let n = s.shape()[sheared_axis] as i64;
    let mut out = ArrayD::zeros(s.raw_dim());
    for (mut ix, v) in out.indexed_iter_mut() {
        let m = ix[shear_axis] as i64;
        let src = ix[sheared_axis] as i64 + k * m;
        ix[sheared_axis] = src.rem_euclid(n) as usize;
        *v = s[&ix];
    }
    Ok(out)
}

fn check_shear(k: i64, d: u32) -> Result<usize> {
    if d > 16 {
        return Err(Error::Domain(format!("shear level {d} too large")));
    }
    let m = 1usize << d;
    if k.unsigned_abs() as usize > m {
        return Err(Error::Domain(format!("|k| = {} exceeds 2^{d}", k.abs())));
    }
    Ok(m)
}

/// `S^d_{k/2^d}`: refine the sheared axis by `2^d`, interpolate with `interp`
/// (the level-d lowpass cascade), shear by `k` on the refined grid, undo the
/// interpolation with the reversed taps and return to the original rate.
/// The result is scaled by `2^d` so a zero shear with orthonormal `interp`
/// is the identity.
pub fn digital_shear(
    s: &ArrayD<f64>,
    k: i64,
    d: u32,
    interp: &Taps,
    sheared_axis: usize,
    shear_axis: usize,
) -> Result<ArrayD<f64>> {
    let m = check_shear(k, d)?;
    let up = upsample_axis(s, sheared_axis, m)?;
    let smooth = convolve_axis(&up, interp, sheared_axis)?;
    let sheared = resample_integer_shear(&smooth, k, sheared_axis, shear_axis)?;
    let back = convolve_axis(&sheared, &interp.reversed(), sheared_axis)?;
    let mut out = downsample_axis(&back, sheared_axis, m)?;
    out.mapv_inplace(|v| v * m as f64);
    Ok(out)
}

/// The digital shear applied to a finite tap array without periodization:
/// axis 0 is sheared, axis 1 supplies the displacement, both measured from
/// the kernel's center. The output grows as needed to hold every tap, so
/// periodizing it afterwards equals `digital_shear` of the periodized input.
pub fn shear_kernel(kernel: &Kernel2, k: i64, d: u32, interp: &Taps) -> Result<Kernel2> {
    let m = check_shear(k, d)?;
    let cols = kernel.dim().1;
    let [c0, c1] = kernel.center();
    // Convolution along the sheared axis commutes with the per-column
    // displacement, so both interpolation passes fold into one filter.
    let both = interp.convolve(&interp.reversed());
    let mi = m as isize;
    let mut columns = Vec::with_capacity(cols);
    let (mut lo, mut hi) = (isize::MAX, isize::MIN);
    for n1 in 0..cols {
        let col = kernel.taps().column(n1);
        if col.iter().all(|&v| v == 0.0) {
            columns.push(None);
            continue;
        }
        let col = Taps::new(col.to_vec(), c0).expect("nonempty column");
        let v = col.upsample(m).convolve(&both);
        let shift = k as isize * (n1 as isize - c1 as isize);
        let first = -(v.center() as isize) - shift;
        let last = first + v.len() as isize - 1;
        let o_first = first.div_euclid(mi) + (first.rem_euclid(mi) != 0) as isize;
        let o_last = last.div_euclid(mi);
        if o_first <= o_last {
            lo = lo.min(o_first);
            hi = hi.max(o_last);
        }
        columns.push(Some((v, first)));
    }
    // Keep the origin inside the grid even when every tap moved off it.
    let (lo, hi) = (lo.min(0), hi.max(0));
    let mut out = ndarray::Array2::zeros(((hi - lo + 1) as usize, cols));
    for (n1, col) in columns.into_iter().enumerate() {
        let Some((v, first)) = col else { continue };
        for (i, &val) in v.as_slice().iter().enumerate() {
            let q = first + i as isize;
            if q.rem_euclid(mi) == 0 {
                out[[(q / mi - lo) as usize, n1]] += val * m as f64;
            }
        }
    }
    Kernel2::new(out, [(-lo) as usize, c1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{cascade, default_lowpass, QmfPair};
    use ndarray::{arr1, Array2, IxDyn};

    fn grid(shape: &[usize], seed: u64) -> ArrayD<f64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        ArrayD::from_shape_fn(IxDyn(shape), |_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn upsample_examples() {
        let x = arr1(&[1.0, 2.0]).into_dyn();
        assert_eq!(upsample_axis(&x, 0, 1).unwrap(), x);
        assert_eq!(
            upsample_axis(&x, 0, 2).unwrap(),
            arr1(&[1.0, 0.0, 2.0, 0.0]).into_dyn()
        );
        assert!(upsample_axis(&x, 1, 2).is_err());
        let g = grid(&[4, 6], 1);
        let u = upsample_axis(&g, 1, 4).unwrap();
        assert!((u.mapv(|v| v * v).sum() - g.mapv(|v| v * v).sum()).abs() < 1e-12);
    }

    #[test]
    fn convolve_examples() {
        let x = arr1(&[1.0, 0.0, 0.0, 0.0]).into_dyn();
        assert_eq!(convolve_axis(&x, &Taps::impulse(), 0).unwrap(), x);
        let y = convolve_axis(&x, &Taps::new(vec![0.5, 0.5], 0).unwrap(), 0).unwrap();
        assert_eq!(y, arr1(&[0.5, 0.5, 0.0, 0.0]).into_dyn());
    }

    #[test]
    fn convolve_matches_dft_product() {
        let x = grid(&[16], 3);
        let t = Taps::new(vec![0.3, -1.0, 2.0, 0.25, 0.1], 1).unwrap();
        let y = convolve_axis(&x, &t, 0).unwrap();
        let xf = crate::fft::fft_real(x.view());
        let tf = t.spectrum(16);
        let mut prod = ArrayD::from_shape_fn(IxDyn(&[16]), |i| xf[[i[0]]] * tf[i[0]]);
        crate::fft::ifft_inplace(&mut prod);
        for (a, b) in y.iter().zip(prod.iter()) {
            assert!((a - b.re).abs() < 1e-12 && b.im.abs() < 1e-12);
        }
    }

    #[test]
    fn integer_shear_examples() {
        let g = grid(&[5, 7], 2);
        assert_eq!(resample_integer_shear(&g, 0, 1, 0).unwrap(), g);
        let back = resample_integer_shear(&resample_integer_shear(&g, 3, 1, 0).unwrap(), -3, 1, 0)
            .unwrap();
        assert_eq!(back, g);
        let mut delta = ArrayD::zeros(IxDyn(&[4, 4]));
        delta[[1, 0]] = 1.0;
        let out = resample_integer_shear(&delta, 1, 1, 0).unwrap();
        assert_eq!(out[[1, 3]], 1.0);
        assert_eq!(out.sum(), 1.0);
    }

    #[test]
    fn digital_shear_level_zero_is_integer_shear() {
        let g = grid(&[8, 8], 4);
        for k in -1..=1 {
            let a = digital_shear(&g, k, 0, &Taps::impulse(), 0, 1).unwrap();
            let b = resample_integer_shear(&g, k, 0, 1).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn haar_zero_shear_is_identity() {
        let haar = QmfPair::from_lowpass(Taps::new(vec![0.5, 0.5], 0).unwrap());
        let h1 = cascade(&haar, 1).unwrap().lowpass;
        let g = grid(&[8, 6], 5);
        let out = digital_shear(&g, 0, 1, &h1, 0, 1).unwrap();
        for (a, b) in out.iter().zip(g.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn shear_rejects_large_k() {
        let g = grid(&[8, 8], 6);
        assert!(digital_shear(&g, 3, 1, &default_lowpass(), 0, 1).is_err());
    }

    #[test]
    fn kernel_shear_matches_periodic_shear() {
        let pair = QmfPair::default();
        let k2 = Kernel2::new(
            Array2::from_shape_fn((5, 7), |(i, j)| ((i * 7 + j * 3) % 5) as f64 - 2.0),
            [2, 3],
        )
        .unwrap();
        for d in 0..=2u32 {
            let hd = cascade(&pair, d as i32).unwrap().lowpass;
            for k in -(1i64 << d)..=(1i64 << d) {
                let sheared = shear_kernel(&k2, k, d, &hd).unwrap();
                // A periodic shear by k/2^d is seam-free only when
                // N0·2^d divides k·N1.
                for shape in [[16, 64], [8, 32]] {
                    let lhs = sheared.periodize(shape);
                    let rhs =
                        digital_shear(&k2.periodize(shape).into_dyn(), k, d, &hd, 0, 1).unwrap();
                    for (a, b) in lhs.iter().zip(rhs.iter()) {
                        assert!((a - b).abs() < 1e-12, "d={d} k={k}");
                    }
                }
            }
        }
    }
}
