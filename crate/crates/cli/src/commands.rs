//! Experiment drivers behind each subcommand.

use std::f64::consts::PI;

use fglab::constraints::{self, example53, ConstraintPair, IdentityDocument};
use fglab::diagnostics::{self, ExperimentOptions};
use fglab::evolution::{self, constraint_residuals, log_grid, ConstraintReport};
use fglab::exact::{self, FitOptions, SchwarzschildParams};
use fglab::series::{self, ExpandOptions};
use fglab::tensor::{self, metric_of};
use fglab::{verify, BoundaryModel, Result, SymTensorField, VectorField};
use serde_json::{json, Value};

use crate::config::{Profile, RunConfig};

/// Result of a command: the report body, extra artifacts and success flag.
pub struct Outcome {
    pub result: Value,
    pub files: Vec<(String, String)>,
    pub success: bool,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Self {
            result,
            files: Vec::new(),
            success: true,
        }
    }
}

/// Residuals below this are rounding noise of an exactly truncating series.
const RESIDUAL_FLOOR: f64 = 1e-15;

fn constraint_summary(r: &ConstraintReport) -> Value {
    json!({
        "maxDivergence": r.max_divergence(),
        "maxHamiltonian": r.max_hamiltonian(),
        "maxRiccati": r.max_riccati(),
    })
}

pub fn fg_expand(cfg: &RunConfig) -> Result<Outcome> {
    let b = cfg.boundary()?;
    let n = b.gamma.dim();
    let opts = ExpandOptions {
        resolve_log: cfg.resolve_log,
        ..Default::default()
    };
    let s = series::expand_with(&b.gamma, &b.g_n, cfg.order_for(n)?, opts)?;
    let ts = log_grid(0.04 * s.t_max(), 0.3 * s.t_max(), 8);
    let residuals = ts.iter().map(|&t| s.residual(t)).collect::<Result<Vec<_>>>()?;
    let fit = diagnostics::decay_fit_with_floor(&ts, &residuals, (ts[0], ts[ts.len() - 1]), RESIDUAL_FLOOR)?;
    Ok(Outcome::ok(json!({
        "series": s.to_document(),
        "residualSlope": {
            "t": ts,
            "residual": residuals,
            "fit": fit,
            "expectedAtLeast": s.order() as f64 - 1.0,
        },
    })))
}

pub fn evolve(cfg: &RunConfig) -> Result<Outcome> {
    let b = cfg.boundary()?;
    let n = b.gamma.dim();
    let s = series::expand(&b.gamma, &b.g_n, cfg.order_for(n)?)?;
    let w = &cfg.window;
    let curve = evolution::evolve_on_grid(&s, &log_grid(w.t0, w.t1, w.points), cfg.tolerances.ode)?;
    let report = constraint_residuals(&curve)?;
    let mut result = json!({
        "gaugeTag": curve.gauge_tag(),
        "points": curve.len(),
        "t0": w.t0,
        "t1": w.t1,
        "constraints": constraint_summary(&report),
        "constraintsWithinBound": report.max_divergence().max(report.max_riccati()) <= 1e3 * cfg.tolerances.ode,
    });
    if let BoundaryModel::RoundSphere { radius, .. } = b.gamma.model() {
        if *radius == 1.0 && w.t1 < 2.0 {
            let reference = exact::poincare_curve(n, curve.t_grid())?;
            let err = curve
                .values()
                .iter()
                .zip(reference.values())
                .map(|(a, r)| {
                    let (a, r) = (a.blocks().unwrap_or(&[0.0])[0], r.blocks().unwrap_or(&[1.0])[0]);
                    (a - r).abs() / r.abs()
                })
                .fold(0.0, f64::max);
            result["poincareMaxRelativeError"] = json!(err);
        }
    }
    Ok(Outcome {
        result,
        files: vec![("evolve.csv".into(), curve.to_csv(Some(&report))?)],
        success: true,
    })
}

pub fn constraints(cfg: &RunConfig) -> Result<Outcome> {
    let b = cfg.boundary()?;
    let tol = constraints::DIVERGENCE_TOLERANCE * b.g_n.max_abs().max(1.0);
    let pair = ConstraintPair::new(b.gamma.clone(), b.g_n.clone())?;
    let m = constraints::check_membership(&pair)?;
    let extension = match constraints::killing_basis(b.gamma.model()) {
        Ok(basis) => {
            let rows = basis
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let c = constraints::killing_extension_criterion(&b.gamma, x, &b.g_n)?;
                    Ok(json!({ "index": i, "criterion": c, "extends": c <= constraints::KILLING_TOLERANCE }))
                })
                .collect::<Result<Vec<_>>>()?;
            Value::Array(rows)
        }
        Err(_) => Value::Null,
    };
    Ok(Outcome::ok(json!({
        "membership": {
            "divergence": m.divergence,
            "trace": m.trace,
            "advisory": m.advisory,
            "isMember": m.is_member(tol),
            "tolerance": tol,
        },
        "killingExtension": extension,
    })))
}

pub fn schwarzschild(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.n.unwrap_or(3);
    let m = cfg.m.unwrap_or(1.0);
    let p = SchwarzschildParams::new(n, m)?;
    let beta_max = exact::schwarzschild_beta_max(n)?;
    let w = &cfg.window;
    let t1 = w.t1.min(0.95 * p.t_horizon());
    let curve = exact::schwarzschild_fg_curve(&p, &log_grid(w.t0, t1, w.points))?;
    let report = constraint_residuals(&curve)?;
    let model = p.boundary()?;
    let s = series::expand(&metric_of(&model), &SymTensorField::zeros(&model), n + 5)?;
    let fit = exact::extract_coefficient_with(
        &curve,
        &s,
        n,
        FitOptions {
            window: cfg.fit_window.map(|[a, b]| (a, b)),
            tolerance: cfg.tolerances.fit,
            ..Default::default()
        },
    )?;
    Ok(Outcome {
        result: json!({
            "n": n,
            "m": m,
            "rPlus": p.r_plus,
            "beta": p.beta,
            "tHorizon": p.t_horizon(),
            "betaMax": beta_max,
            "gN": fit.coefficient.blocks(),
            "fitWindow": fit.window,
            "fitSensitivity": fit.sensitivity,
            "constraints": constraint_summary(&report),
        }),
        files: vec![("schwarzschild.csv".into(), curve.to_csv(Some(&report))?)],
        success: true,
    })
}

pub fn torus_example(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.n.unwrap_or(3);
    let res = cfg.resolution.unwrap_or(if n == 3 { 32 } else { 8 });
    let profile = cfg.profile.unwrap_or(Profile::Sin);
    let model = BoundaryModel::standard_torus(n, res)?;
    let g = metric_of(&model);
    let tau = example53(&model, |x| profile.eval(x))?;
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let x = VectorField::constant(&model, &e1)?;
    let h = tensor::lie_derivative(&x, &tau)?;
    let report = constraints::verify_identity(&g, &x, &tau, &h)?;
    let projection = constraints::obstruction_projection(&g, &tau, &h)?;
    let extension = (0..n)
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            let c = constraints::killing_extension_criterion(&g, &VectorField::constant(&model, &v)?, &tau)?;
            Ok(json!({ "axis": i + 1, "criterion": c, "extends": c <= constraints::KILLING_TOLERANCE }))
        })
        .collect::<Result<Vec<_>>>()?;
    let nf = n as f64;
    let analytic = 0.5 * (nf - 1.0) * (nf - 2.0) * (2.0 * PI).powi(n as i32);
    let passed = report.relative_error() <= cfg.tolerances.identity;
    Ok(Outcome {
        result: json!({
            "n": n,
            "resolution": res,
            "profile": profile,
            "identity": IdentityDocument::new(&report, &g, &x, &tau, &h),
            "analyticLhs": analytic,
            "lhsRelativeError": (report.lhs - analytic).abs() / analytic,
            "obstructionProjection": projection,
            "killingExtension": extension,
            "passed": passed,
        }),
        files: Vec::new(),
        success: passed,
    })
}

pub fn decay(cfg: &RunConfig) -> Result<Outcome> {
    let b = cfg.boundary()?;
    let n = b.gamma.dim();
    let opts = ExperimentOptions {
        order: Some(cfg.order_for(n)?),
        t0: cfg.window.t0,
        t1: cfg.window.t1,
        tol: cfg.tolerances.ode,
        window: cfg.fit_window.map_or(diagnostics::DEFAULT_WINDOW, |[a, b]| (a, b)),
        floor: cfg.tolerances.floor.unwrap_or(diagnostics::NUMERICAL_FLOOR),
    };
    let tol_b = cfg.tolerances.ode_b.unwrap_or(opts.tol);
    let r = diagnostics::unique_continuation_with(&b.gamma, (&b.g_n, opts.tol), (&b.g_n_b, tol_b), &opts)?;
    let mut csv = String::from("t,trace_norm,trace_free_norm\n");
    for d in &r.differences {
        csv.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", d.t, d.trace_norm, d.trace_free_norm));
    }
    Ok(Outcome {
        result: json!({
            "traceFreeExponent": r.trace_free_exponent,
            "traceExponent": r.trace_exponent,
            "floorHit": r.trace_free_exponent.floor_hit && r.trace_exponent.floor_hit,
            "options": opts,
        }),
        files: vec![("decay.csv".into(), csv)],
        success: true,
    })
}

pub fn verify_suite() -> Result<Outcome> {
    let report = verify::run_all();
    for c in &report.criteria {
        eprintln!("{c}");
    }
    let criteria: Vec<Value> = report
        .criteria
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "title": c.title,
                "passed": c.passed,
                "timeLimit": c.time_limit,
                "measurements": c.measurements,
                "error": c.error,
            })
        })
        .collect();
    Ok(Outcome {
        result: json!({
            "criteria": criteria,
            "suiteTimeLimit": report.time_limit,
            "passed": report.passed,
        }),
        files: Vec::new(),
        success: report.passed,
    })
}
