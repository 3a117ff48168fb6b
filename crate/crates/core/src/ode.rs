//! Adaptive Dormand–Prince 5(4) integration.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights.
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Steps shorter than this fraction of `|t|` count as a stiffness blowup.
    pub min_relative_step: f64,
}

impl OdeOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_steps: 1_000_000,
            min_relative_step: 1e-13,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y′ = f(t, y)` from `(t_out[0], y0)` and returns the state at
/// every output time. `check` is called on each accepted state and may abort.
pub fn integrate<F, G>(
    f: F,
    y0: &[f64],
    t_out: &[f64],
    opts: OdeOptions,
    mut check: G,
) -> Result<(Vec<Vec<f64>>, OdeStats)>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
    G: FnMut(f64, &[f64]) -> Result<()>,
{
    if t_out.is_empty() {
        return Ok((Vec::new(), OdeStats::default()));
    }
    if t_out.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "output times must be strictly increasing".into(),
        ));
    }
    let dim = y0.len();
    let mut t = t_out[0];
    let mut y = y0.to_vec();
    let mut out = vec![y.clone()];
    let mut stats = OdeStats::default();
    let span = t_out[t_out.len() - 1] - t;
    let mut h = initial_step(&f, t, &y, opts).min(span);
    let mut k = vec![vec![0.0; dim]; 7];
    k[0] = f(t, &y);

    for &target in &t_out[1..] {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::SingularSeed(format!(
                    "step budget exhausted at t = {t}"
                )));
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            if step < opts.min_relative_step * t.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::SingularSeed(format!(
                    "step size underflow at t = {t}"
                )));
            }
            for s in 1..7 {
                let ys: Vec<f64> = (0..dim)
                    .map(|i| y[i] + step * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>())
                    .collect();
                k[s] = f(t + C[s] * step, &ys);
            }
            let y5: Vec<f64> = (0..dim)
                .map(|i| y[i] + step * (0..6).map(|j| B5[j] * k[j][i]).sum::<f64>())
                .collect();
            let mut err: f64 = 0.0;
            for i in 0..dim {
                let e = step * (0..7).map(|j| (B5[j] - B4[j]) * k[j][i]).sum::<f64>();
                let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() {
                stats.rejected += 1;
                h = step * 0.2;
                continue;
            }
            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                y = y5;
                k[0] = f(t, &y);
                check(t, &y)?;
            } else {
                stats.rejected += 1;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !last || err > 1.0 {
                h = step * factor;
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

fn initial_step<F>(f: &F, t: f64, y: &[f64], opts: OdeOptions) -> f64
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let d = f(t, y);
    let sc = |i: usize| opts.atol + opts.rtol * y[i].abs();
    let d0 = (0..y.len()).map(|i| (y[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..y.len()).map(|i| (d[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(0.1 * t.abs().max(1e-3))
}
