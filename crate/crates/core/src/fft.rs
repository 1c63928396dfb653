//! N-dimensional complex DFT over standard-layout `ndarray` grids.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::{ArrayD, ArrayViewD};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type Plan = Arc<dyn Fft<f64>>;
type PlanCache = (FftPlanner<f64>, HashMap<(usize, bool), Plan>);

/// Lanes transformed together along a strided axis.
const LANE_TILE: usize = 16;

fn plan(len: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<Mutex<PlanCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().unwrap();
    let (planner, plans) = &mut *guard;
    plans
        .entry((len, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

fn transform_axis(data: &mut [Complex64], shape: &[usize], axis: usize, inverse: bool) {
    let n = shape[axis];
    if n <= 1 {
        return;
    }
    let fft = plan(n, inverse);
    let inner: usize = shape[axis + 1..].iter().product();
    let block = n * inner;
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    if inner == 1 {
        fft.process_with_scratch(data, &mut scratch);
        return;
    }
    // Gather strided lanes a tile at a time so reads stay on few cache lines.
    let tile = LANE_TILE.min(inner);
    let mut lanes = vec![Complex64::default(); tile * n];
    for chunk in data.chunks_exact_mut(block) {
        for k0 in (0..inner).step_by(tile) {
            let w = tile.min(inner - k0);
            let buf = &mut lanes[..w * n];
            for i in 0..n {
                let row = &chunk[i * inner + k0..i * inner + k0 + w];
                for (k, &v) in row.iter().enumerate() {
                    buf[k * n + i] = v;
                }
            }
            fft.process_with_scratch(buf, &mut scratch);
            for i in 0..n {
                let row = &mut chunk[i * inner + k0..i * inner + k0 + w];
                for (k, v) in row.iter_mut().enumerate() {
                    *v = buf[k * n + i];
                }
            }
        }
    }
}

/// In-place forward DFT, `X(m) = Σ x(n) e^{-2πi m·n/N}`.
pub fn fft_inplace(data: &mut ArrayD<Complex64>) {
    run(data, false);
}

/// In-place inverse DFT including the `1/N` factor.
pub fn ifft_inplace(data: &mut ArrayD<Complex64>) {
    run(data, true);
    let scale = 1.0 / data.len() as f64;
    data.mapv_inplace(|v| v * scale);
}

fn run(data: &mut ArrayD<Complex64>, inverse: bool) {
    if !data.is_standard_layout() {
        *data = data.as_standard_layout().into_owned();
    }
    let shape = data.shape().to_vec();
    let slice = data.as_slice_mut().expect("standard layout");
    for axis in 0..shape.len() {
        transform_axis(slice, &shape, axis, inverse);
    }
}

/// DFT of a real grid.
pub fn fft_real(x: ArrayViewD<f64>) -> ArrayD<Complex64> {
    let mut out = x.mapv(|v| Complex64::new(v, 0.0));
    fft_inplace(&mut out);
    out
}
