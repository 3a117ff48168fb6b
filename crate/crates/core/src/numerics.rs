//! One-dimensional numerical kernels: adaptive quadrature, bracketed roots,
//! golden-section maximization and small least-squares solves.

use crate::error::{Error, Result};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights on the odd-indexed Kronrod nodes (and the centre).
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = GK_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        kron += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G_WEIGHTS[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature of `f` over `[a, b]`.
/// Returns the value and an error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let mut panels = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..2000 {
        let total: f64 = panels.iter().map(|p| p.2 .0).sum();
        let err: f64 = panels.iter().map(|p| p.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("nonempty");
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        panels.push((lo, mid, gk15(&f, lo, mid)));
        panels.push((mid, hi, gk15(&f, mid, hi)));
    }
    let mut total = 0.0;
    let mut err = 0.0;
    let mut comp = 0.0;
    for p in &panels {
        // Kahan summation across panels
        let y = p.2 .0 - comp;
        let s = total + y;
        comp = (s - total) - y;
        total = s;
        err += p.2 .1;
    }
    (total, err)
}

/// Root of `f` in `[a, b]` given a sign change, by bisection with secant
/// acceleration, to relative width `rel_tol`.
pub fn bracketed_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidArgument(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for it in 0..400 {
        let width = hi - lo;
        if width <= rel_tol * lo.abs().max(hi.abs()) || width <= f64::MIN_POSITIVE {
            break;
        }
        let secant = hi - fhi * (hi - lo) / (fhi - flo);
        let mid = 0.5 * (lo + hi);
        let x = if it % 3 != 2 && secant > lo && secant < hi {
            secant
        } else {
            mid
        };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    Ok(if flo.abs() < fhi.abs() { lo } else { hi })
}

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, x_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > x_tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Least-squares solution of the overdetermined system `a x ≈ b` by
/// Householder QR. `a` is row-major with `cols` columns; `b` may hold
/// several right-hand sides, one per column of `b` (`nrhs` columns).
pub fn least_squares(a: &[f64], cols: usize, b: &[f64], nrhs: usize) -> Result<Vec<f64>> {
    let rows = a.len() / cols;
    if rows < cols || b.len() != rows * nrhs {
        return Err(Error::InvalidArgument(format!(
            "least squares needs rows >= cols, got {rows} x {cols}"
        )));
    }
    let mut r = a.to_vec();
    let mut y = b.to_vec();
    for j in 0..cols {
        let norm = (j..rows).map(|i| r[i * cols + j].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("rank-deficient system".into()));
        }
        let alpha = if r[j * cols + j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..rows).map(|i| r[i * cols + j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in j..cols {
            let dot: f64 = (j..rows).map(|i| v[i - j] * r[i * cols + c]).sum();
            let s = 2.0 * dot / vnorm2;
            for i in j..rows {
                r[i * cols + c] -= s * v[i - j];
            }
        }
        for c in 0..nrhs {
            let dot: f64 = (j..rows).map(|i| v[i - j] * y[i * nrhs + c]).sum();
            let s = 2.0 * dot / vnorm2;
            for i in j..rows {
                y[i * nrhs + c] -= s * v[i - j];
            }
        }
    }
    let mut x = vec![0.0; cols * nrhs];
    for c in 0..nrhs {
        for j in (0..cols).rev() {
            let mut s = y[j * nrhs + c];
            for k in j + 1..cols {
                s -= r[j * cols + k] * x[k * nrhs + c];
            }
            x[j * nrhs + c] = s / r[j * cols + j];
        }
    }
    Ok(x)
}
