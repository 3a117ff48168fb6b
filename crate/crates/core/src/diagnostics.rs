//! Decay-order estimation and the experiments built on it: unique
//! continuation from `(γ, g_(n))` and radial extension of boundary Killing
//! fields.

use serde::Serialize;

use crate::constraints;
use crate::error::{Error, Result};
use crate::evolution::{self, DifferenceRecord, MetricCurve};
use crate::field::{SymTensorField, VectorField};
use crate::series::{self, ExpandOptions};
use crate::tensor;

/// Norms below this are indistinguishable from roundoff.
pub const NUMERICAL_FLOOR: f64 = 1e-13;
pub const DEFAULT_WINDOW: (f64, f64) = (1e-2, 1e-1);

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct DecayFit {
    /// Least-squares slope of `log ‖·‖` against `log t`; absent at the floor.
    pub exponent: Option<f64>,
    /// Coefficient of determination; absent at the floor.
    pub r_squared: Option<f64>,
    pub window: (f64, f64),
    pub floor_hit: bool,
    pub floor: f64,
    pub samples: usize,
}

pub fn decay_fit(t: &[f64], norms: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    decay_fit_with_floor(t, norms, window, NUMERICAL_FLOOR)
}

pub fn decay_fit_with_floor(
    t: &[f64],
    norms: &[f64],
    window: (f64, f64),
    floor: f64,
) -> Result<DecayFit> {
    if t.len() != norms.len() {
        return Err(Error::InvalidArgument(
            "t and norm samples differ in length".into(),
        ));
    }
    if !(window.0 < window.1) {
        return Err(Error::InvalidArgument(format!(
            "window ({}, {}) is empty",
            window.0, window.1
        )));
    }
    if let Some(v) = norms.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("negative norm {v}")));
    }
    let inside: Vec<usize> = (0..t.len())
        .filter(|&i| t[i] > 0.0 && t[i] >= window.0 && t[i] <= window.1)
        .collect();
    if inside.len() < 5 {
        return Err(Error::EmptyWindow(inside.len()));
    }
    let peak = inside.iter().map(|&i| norms[i]).fold(0.0, f64::max);
    let usable: Vec<usize> = inside.iter().copied().filter(|&i| norms[i] >= floor).collect();
    let floor_fit = DecayFit {
        exponent: None,
        r_squared: None,
        window,
        floor_hit: true,
        floor,
        samples: inside.len(),
    };
    if peak < floor || usable.len() < 2 {
        return Ok(floor_fit);
    }
    let xs: Vec<f64> = usable.iter().map(|&i| t[i].ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|&i| norms[i].ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(DecayFit {
        exponent: Some(slope),
        r_squared: Some(r_squared),
        window,
        floor_hit: false,
        floor,
        samples: usable.len(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExperimentOptions {
    /// Series truncation order; `None` picks `n + 5`.
    pub order: Option<usize>,
    pub t0: f64,
    pub t1: f64,
    pub tol: f64,
    pub window: (f64, f64),
    pub floor: f64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            order: None,
            t0: evolution::DEFAULT_SEED_T,
            t1: 0.2,
            tol: 1e-12,
            window: DEFAULT_WINDOW,
            floor: NUMERICAL_FLOOR,
        }
    }
}

fn evolve_from(
    gamma: &SymTensorField,
    g_n: &SymTensorField,
    tol: f64,
    opts: &ExperimentOptions,
) -> Result<MetricCurve> {
    let order = opts.order.unwrap_or(gamma.dim() + 5);
    let s = series::expand_with(gamma, g_n, order, ExpandOptions::default())?;
    let s = if s.t_max() < opts.t0 {
        s.with_t_max(opts.t0)
    } else {
        s
    };
    evolution::evolve(&s, opts.t0, opts.t1, tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationReport {
    pub trace_free_exponent: DecayFit,
    pub trace_exponent: DecayFit,
    pub differences: Vec<DifferenceRecord>,
}

/// Evolves two data sets on the same boundary and fits the decay of the
/// trace-free and trace parts of their difference.
pub fn unique_continuation_experiment(
    gamma: &SymTensorField,
    g_na: &SymTensorField,
    g_nb: &SymTensorField,
) -> Result<ContinuationReport> {
    let opts = ExperimentOptions::default();
    unique_continuation_with(gamma, (g_na, opts.tol), (g_nb, opts.tol), &opts)
}

/// As [`unique_continuation_experiment`], with a separate integrator
/// tolerance per side.
pub fn unique_continuation_with(
    gamma: &SymTensorField,
    a: (&SymTensorField, f64),
    b: (&SymTensorField, f64),
    opts: &ExperimentOptions,
) -> Result<ContinuationReport> {
    let ca = evolve_from(gamma, a.0, a.1, opts)?;
    let cb = evolve_from(gamma, b.0, b.1, opts)?;
    let differences = evolution::difference(&ca, &cb)?;
    let t: Vec<f64> = differences.iter().map(|d| d.t).collect();
    let free: Vec<f64> = differences.iter().map(|d| d.trace_free_norm).collect();
    let trace: Vec<f64> = differences.iter().map(|d| d.trace_norm).collect();
    Ok(ContinuationReport {
        trace_free_exponent: decay_fit_with_floor(&t, &free, opts.window, opts.floor)?,
        trace_exponent: decay_fit_with_floor(&t, &trace, opts.window, opts.floor)?,
        differences,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryReport {
    /// `‖ℒ_X g_(n)‖_{L²}`.
    pub criterion_norm: f64,
    pub t: Vec<f64>,
    /// `‖ℒ_X g_t‖_{L²} / tⁿ` along the series.
    pub scaled_residuals: Vec<f64>,
    /// Local log-slopes of `‖ℒ_X g_t‖` between consecutive samples.
    pub series_residual_orders: Vec<f64>,
    pub fit: DecayFit,
    /// First `k` with `‖ℒ_X g_(k)‖ ≥ floor`.
    pub leading_order: Option<usize>,
    /// `‖ℒ_X g_(k)‖_{L²}` at the leading order.
    pub leading_coefficient: Option<f64>,
    pub extends: bool,
}

/// Extends `X` constantly in `t` and measures `‖ℒ_X g_t‖` on the series of
/// `(γ, g_(n))`.
pub fn isometry_extension_experiment(
    gamma: &SymTensorField,
    x: &VectorField,
    g_n: &SymTensorField,
    opts: &ExperimentOptions,
) -> Result<IsometryReport> {
    let n = gamma.dim();
    let criterion_norm = constraints::killing_extension_criterion(gamma, x, g_n)?;
    let order = opts.order.unwrap_or(n + 3);
    let s = series::expand(gamma, g_n, order)?;
    let s = if s.t_max() < opts.window.1 {
        s.with_t_max(opts.window.1)
    } else {
        s
    };
    let t = evolution::log_grid(opts.window.0, opts.window.1, 9);
    let norms = constraints::killing_extension_witness(&s, x, &t)?;
    let scaled_residuals = t
        .iter()
        .zip(&norms)
        .map(|(t, v)| v / t.powi(n as i32))
        .collect();
    let series_residual_orders = t
        .windows(2)
        .zip(norms.windows(2))
        .filter(|(_, v)| v[0] >= opts.floor && v[1] >= opts.floor)
        .map(|(t, v)| (v[1] / v[0]).ln() / (t[1] / t[0]).ln())
        .collect();
    let fit = decay_fit_with_floor(&t, &norms, opts.window, opts.floor)?;
    let mut leading = None;
    for (k, c) in s.coeffs().iter().enumerate() {
        let v = tensor::l2_norm(gamma, &tensor::lie_derivative(x, c)?)?;
        if v >= opts.floor {
            leading = Some((k, v));
            break;
        }
    }
    Ok(IsometryReport {
        criterion_norm,
        extends: fit.floor_hit,
        t,
        scaled_residuals,
        series_residual_orders,
        fit,
        leading_order: leading.map(|l| l.0),
        leading_coefficient: leading.map(|l| l.1),
    })
}
