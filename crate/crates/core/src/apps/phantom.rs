//! Deterministic synthetic test images on `[0, 255]`.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Renders `inside(u, v)` (unit-square coordinates, `u` along columns)
/// with 4×4 supersampling so edges are area-weighted.
fn coverage(n: usize, inside: impl Fn(f64, f64) -> bool) -> Array2<f64> {
    const S: usize = 4;
    Array2::from_shape_fn((n, n), |(r, c)| {
        let mut hits = 0;
        for a in 0..S {
            for b in 0..S {
                let v = (r as f64 + (a as f64 + 0.5) / S as f64) / n as f64;
                let u = (c as f64 + (b as f64 + 0.5) / S as f64) / n as f64;
                hits += inside(u, v) as usize;
            }
        }
        hits as f64 / (S * S) as f64
    })
}

fn paint(img: &mut Array2<f64>, cover: &Array2<f64>, value: f64) {
    img.zip_mut_with(cover, |p, &w| *p = (1.0 - w) * *p + w * value);
}

/// Piecewise-smooth cartoon: a shaded background with an ellipse, a disk,
/// a rotated square and a triangle.
pub fn cartoon(n: usize) -> Array2<f64> {
    let mut img = Array2::from_shape_fn((n, n), |(r, c)| {
        let (v, u) = (r as f64 / n as f64, c as f64 / n as f64);
        60.0 + 40.0 * u + 20.0 * v
    });
    let (ca, sa) = (0.5f64.cos(), 0.5f64.sin());
    let ellipse = coverage(n, |u, v| {
        let (x, y) = (u - 0.45, v - 0.5);
        let (p, q) = (ca * x + sa * y, -sa * x + ca * y);
        (p / 0.32).powi(2) + (q / 0.2).powi(2) <= 1.0
    });
    paint(&mut img, &ellipse, 180.0);
    let disk = coverage(n, |u, v| {
        (u - 0.58).powi(2) + (v - 0.56).powi(2) <= 0.09f64.powi(2)
    });
    paint(&mut img, &disk, 235.0);
    let (cb, sb) = (0.35f64.cos(), 0.35f64.sin());
    let square = coverage(n, |u, v| {
        let (x, y) = (u - 0.22, v - 0.2);
        (cb * x + sb * y).abs() <= 0.1 && (-sb * x + cb * y).abs() <= 0.1
    });
    paint(&mut img, &square, 110.0);
    let tri = [(0.72, 0.68), (0.92, 0.9), (0.6, 0.93)];
    let triangle = coverage(n, |u, v| {
        let side = |(x0, y0): (f64, f64), (x1, y1): (f64, f64)| {
            (x1 - x0) * (v - y0) - (y1 - y0) * (u - x0)
        };
        let s = [
            side(tri[0], tri[1]),
            side(tri[1], tri[2]),
            side(tri[2], tri[0]),
        ];
        s.iter().all(|&x| x >= 0.0) || s.iter().all(|&x| x <= 0.0)
    });
    paint(&mut img, &triangle, 25.0);
    img
}

fn dist_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

/// Distance (in pixels) from pixel center `(r, c)` to the curve set.
fn curve_distance(n: usize, r: usize, c: usize) -> f64 {
    let nf = n as f64;
    let p = (c as f64 + 0.5, r as f64 + 0.5);
    let mut d = f64::INFINITY;
    // Two circular arcs.
    for &(cx, cy, rad, a0, a1) in &[(0.5, 0.5, 0.33, 0.3, 2.6), (0.35, 0.62, 0.2, 3.4, 5.9)] {
        let (x, y) = (p.0 / nf - cx, p.1 / nf - cy);
        let ang = y.atan2(x).rem_euclid(std::f64::consts::TAU);
        if ang >= a0 && ang <= a1 {
            d = d.min(((x * x + y * y).sqrt() - rad).abs() * nf);
        } else {
            for a in [a0, a1] {
                let e = (cx + rad * a.cos(), cy + rad * a.sin());
                d = d.min(((p.0 / nf - e.0).powi(2) + (p.1 / nf - e.1).powi(2)).sqrt() * nf);
            }
        }
    }
    // Straight strokes at assorted angles.
    let s = |x: f64, y: f64| (x * nf, y * nf);
    for &(a, b) in &[
        (s(0.08, 0.1), s(0.6, 0.22)),
        (s(0.15, 0.92), s(0.9, 0.55)),
        (s(0.82, 0.08), s(0.9, 0.45)),
    ] {
        d = d.min(dist_to_segment(p, a, b));
    }
    // A sine wave across the lower part.
    let x = p.0 / nf;
    if (0.05..=0.95).contains(&x) {
        let y = 0.8 + 0.05 * (x * 12.0).sin();
        let slope = 0.05 * 12.0 * (x * 12.0).cos();
        d = d.min((p.1 / nf - y).abs() * nf / (1.0 + slope * slope).sqrt());
    }
    d
}

/// Binary curves (thin strokes) and points (small disks), disjoint and
/// separated by at least four pixels.
pub fn curves_and_points(n: usize) -> (Array2<f64>, Array2<f64>) {
    let dist = Array2::from_shape_fn((n, n), |(r, c)| curve_distance(n, r, c));
    let curves = dist.mapv(|d| if d <= 0.75 { 1.0 } else { 0.0 });
    let mut points = Array2::zeros((n, n));
    let mut rng = ChaCha20Rng::seed_from_u64(0x5EED);
    let target = (n * n) / 1600;
    let mut centers: Vec<(f64, f64)> = Vec::new();
    let mut attempts = 0;
    while centers.len() < target && attempts < 100 * target {
        attempts += 1;
        let (r, c) = (rng.random_range(3..n - 3), rng.random_range(3..n - 3));
        if dist[[r, c]] < 6.0
            || centers
                .iter()
                .any(|&(a, b)| (a - r as f64).hypot(b - c as f64) < 12.0)
        {
            continue;
        }
        centers.push((r as f64, c as f64));
    }
    for &(cr, cc) in &centers {
        for r in (cr as usize - 3)..=(cr as usize + 3) {
            for c in (cc as usize - 3)..=(cc as usize + 3) {
                if (r as f64 - cr).hypot(c as f64 - cc) <= 1.6 {
                    points[[r, c]] = 1.0;
                }
            }
        }
    }
    (curves, points)
}
