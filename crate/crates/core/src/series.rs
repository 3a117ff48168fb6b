//! Fefferman–Graham expansions.
//!
//! The compactified metric `g_t = Σ t^k g_(k)` of a conformally compact
//! Einstein metric in geodesic gauge solves the radial operator implemented
//! in [`pointwise::radial_operator`]. Inserting the truncated series and
//! matching the coefficient of `t^{k-1}` gives, with `S_k` the contribution
//! of the lower coefficients,
//!
//! ```text
//! k(k − n) g_(k) − k tr_γ(g_(k)) γ + S_k = 0,
//! ```
//!
//! so the trace-free part is fixed unless `k = n` and the trace unless
//! `k = 2n`. At `k = n` the prescribed `g_(n)` is installed (and for even `n`
//! the trace-free part of `S_n` is the log obstruction); at `k = 2n` the trace
//! comes from the Riccati identity `t Ḣ − H + t|A|² = 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{SymTensorField, Values};
use crate::model::BoundaryModel;
use crate::pointwise::{self, inverse};
use crate::scalar::{Scalar, Tps, TPS_CAP};
use crate::spectral::Spectral;
use crate::tensor;

pub const SCHEMA_VERSION: u32 = 1;

/// Leading coefficient of the `t^n log t` term.
#[derive(Debug, Clone)]
pub struct LogObstruction {
    pub tensor: SymTensorField,
    /// Root-mean-square `γ`-norm over the boundary.
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ExpandOptions {
    /// Continue past a nonzero log obstruction (recording it) instead of failing.
    pub resolve_log: bool,
    /// Allowed `|δ g_(n)|`, `|tr g_(n)|` (relative to `max(1, |g_(n)|)`) for odd `n`.
    pub tt_tolerance: f64,
    /// Obstruction magnitudes at or below this count as zero.
    pub resonance_tolerance: f64,
    /// Radius of reliability; defaults per model.
    pub t_max: Option<f64>,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        Self {
            resolve_log: false,
            tt_tolerance: 1e-8,
            resonance_tolerance: 1e-9,
            t_max: None,
        }
    }
}

/// Self-consistency measurements made while expanding.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SeriesDiagnostics {
    /// `|n² tr g_(n) − tr S_n|` at order `n`.
    pub trace_equation_at_n: Option<f64>,
    /// Riccati-trace matching residual at order `n`.
    pub riccati_at_n: Option<f64>,
    /// `|tr S_2n|`, which the radial equation leaves unconstrained.
    pub trace_equation_at_2n: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FGSeries {
    n: usize,
    gamma: SymTensorField,
    coeffs: Vec<SymTensorField>,
    log_obstruction: Option<LogObstruction>,
    t_max: f64,
    diagnostics: SeriesDiagnostics,
}

/// Model operator `t f″ − c f′` with roots `{0, c + 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOperatorSpec {
    pub drop_coefficient: f64,
}

impl RadialOperatorSpec {
    /// Trace operator `t (tr k)″ − (tr k)′`.
    pub fn trace() -> Self {
        Self {
            drop_coefficient: 1.0,
        }
    }

    /// Trace-free operator `t k₀″ − (n−1) k₀′`.
    pub fn trace_free(n: usize) -> Self {
        Self {
            drop_coefficient: (n - 1) as f64,
        }
    }
}

pub fn indicial_roots(spec: RadialOperatorSpec) -> Result<(f64, f64)> {
    let c = spec.drop_coefficient;
    if !(c > -1.0) {
        return Err(Error::InvalidArgument(format!(
            "drop coefficient {c} must exceed -1"
        )));
    }
    // t (t^s)″ − c (t^s)′ = s(s − 1 − c) t^{s−1}
    Ok((0.0, c + 1.0))
}

struct Recursion {
    model: BoundaryModel,
    n: usize,
    gamma: Vec<f64>,
    gamma_inv: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
    derivs: Vec<Option<(Vec<f64>, Vec<f64>)>>,
    spec: Option<Spectral>,
    ric_ref: Vec<f64>,
}

/// Pointwise sources at one order.
struct Sources {
    radial: Vec<f64>,
    riccati: Vec<f64>,
}

impl Recursion {
    fn new(gamma: &SymTensorField) -> Self {
        let model = gamma.model().clone();
        let n = model.dim();
        let n2 = n * n;
        let pts = gamma.to_points();
        let gamma_inv = pts.chunks(n2).flat_map(|c| inverse(c, n)).collect();
        let ric_ref = if model.is_homogeneous() {
            SymTensorField::from_blocks(&model, model.reference_ricci())
                .expect("blocks")
                .to_points()
        } else {
            Vec::new()
        };
        let mut rec = Self {
            spec: Spectral::for_model(&model),
            model,
            n,
            gamma: pts.clone(),
            gamma_inv,
            coeffs: Vec::new(),
            derivs: Vec::new(),
            ric_ref,
        };
        rec.push(pts);
        rec
    }

    fn npts(&self) -> usize {
        self.gamma.len() / (self.n * self.n)
    }

    fn push(&mut self, c: Vec<f64>) {
        let d = match &self.spec {
            Some(spec) if c.iter().any(|v| *v != 0.0) => {
                Some(tensor::metric_derivatives(spec, &c, self.n))
            }
            _ => None,
        };
        self.coeffs.push(c);
        self.derivs.push(d);
    }

    /// Coefficient of `t^{k−1}` of the radial operator and Riccati trace with
    /// the current coefficients `0..k` and `g_(k) = 0`.
    fn sources(&self, k: usize) -> Sources {
        let n = self.n;
        let n2 = n * n;
        let n3 = n2 * n;
        let n4 = n3 * n;
        let len = k + 1;
        assert!(len <= TPS_CAP, "series order {k} exceeds supported maximum");
        let series_of = |arrays: &dyn Fn(usize) -> Option<f64>| -> Tps {
            let mut c = [0.0; TPS_CAP];
            for (j, slot) in c.iter_mut().enumerate().take(self.coeffs.len().min(len)) {
                if let Some(v) = arrays(j) {
                    *slot = v;
                }
            }
            Tps::from_coeffs(&c[..len], len)
        };
        let t = Tps::from_coeffs(&[0.0, 1.0], len);
        let per_point: Vec<(Vec<f64>, f64)> = (0..self.npts())
            .into_par_iter()
            .map(|p| {
                let g: Vec<Tps> = (0..n2)
                    .map(|ij| series_of(&|j| Some(self.coeffs[j][p * n2 + ij])))
                    .collect();
                let gd: Vec<Tps> = g.iter().map(Tps::derivative).collect();
                let gdd: Vec<Tps> = gd.iter().map(Tps::derivative).collect();
                let ric: Vec<Tps> = if self.model.is_homogeneous() {
                    self.ric_ref.iter().map(|&r| Tps::from_f64(r)).collect()
                } else {
                    let dg: Vec<Tps> = (0..n3)
                        .map(|q| {
                            series_of(&|j| self.derivs[j].as_ref().map(|d| d.0[p * n3 + q]))
                        })
                        .collect();
                    let ddg: Vec<Tps> = (0..n4)
                        .map(|q| {
                            series_of(&|j| self.derivs[j].as_ref().map(|d| d.1[p * n4 + q]))
                        })
                        .collect();
                    pointwise::ricci(&g, &dg, &ddg, n)
                };
                let e = pointwise::radial_operator(t, &g, &gd, &gdd, &ric, n);
                let r = pointwise::riccati_trace(t, &g, &gd, &gdd, n);
                (e.iter().map(|s| s.coeff(k - 1)).collect(), r.coeff(k - 1))
            })
            .collect();
        let mut radial = Vec::with_capacity(self.npts() * n2);
        let mut riccati = Vec::with_capacity(self.npts());
        for (e, r) in per_point {
            radial.extend(e);
            riccati.push(r);
        }
        Sources { radial, riccati }
    }

    /// Pointwise `γ`-trace of a points-form tensor.
    fn traces(&self, a: &[f64]) -> Vec<f64> {
        let n2 = self.n * self.n;
        (0..self.npts())
            .map(|p| {
                pointwise::trace_of_product(
                    &self.gamma_inv[p * n2..(p + 1) * n2],
                    &a[p * n2..(p + 1) * n2],
                    self.n,
                )
            })
            .collect()
    }

    /// `a_0 scale + (trace/n) γ` at each point, where `a_0` is the trace-free part.
    fn compose(&self, a: &[f64], scale: f64, traces: &[f64]) -> Vec<f64> {
        let n = self.n;
        let n2 = n * n;
        let tr_a = self.traces(a);
        let mut out = vec![0.0; a.len()];
        for p in 0..self.npts() {
            for ij in 0..n2 {
                let g = self.gamma[p * n2 + ij];
                let free = a[p * n2 + ij] - tr_a[p] / n as f64 * g;
                out[p * n2 + ij] = scale * free + traces[p] / n as f64 * g;
            }
        }
        out
    }

    /// Solve the order-`k` matching for `k ∉ {n}`.
    fn solve_order(&self, k: usize, src: &Sources) -> (Vec<f64>, Option<f64>) {
        let n = self.n;
        let kf = k as f64;
        let tr_s = self.traces(&src.radial);
        let (traces, consistency) = if k == 2 * n {
            let t: Vec<f64> = src
                .riccati
                .iter()
                .map(|r| -2.0 * r / ((kf - 2.0) * kf))
                .collect();
            (t, Some(tr_s.iter().fold(0.0, |m: f64, v| m.max(v.abs()))))
        } else {
            let denom = kf * (kf - 2.0 * n as f64);
            (tr_s.iter().map(|s| -s / denom).collect(), None)
        };
        let scale = -1.0 / (kf * (kf - n as f64));
        (self.compose(&src.radial, scale, &traces), consistency)
    }

    fn rms_norm(&self, a: &[f64]) -> f64 {
        let n = self.n;
        let n2 = n * n;
        let sum: f64 = (0..self.npts())
            .map(|p| {
                pointwise::inner(
                    &self.gamma_inv[p * n2..(p + 1) * n2],
                    &a[p * n2..(p + 1) * n2],
                    &a[p * n2..(p + 1) * n2],
                    n,
                )
            })
            .sum();
        (sum / self.npts() as f64).max(0.0).sqrt()
    }

    /// Trace-free part of `S_n` scaled to the log coefficient, `𝓗 = −(S_n)₀ / n`.
    fn obstruction(&self, src: &Sources) -> Vec<f64> {
        let zero = vec![0.0; self.npts()];
        self.compose(&src.radial, -1.0 / self.n as f64, &zero)
    }
}

fn check_transverse_traceless(
    gamma: &SymTensorField,
    g_n: &SymTensorField,
    tol: f64,
) -> Result<()> {
    let scale = g_n.max_abs().max(1.0);
    let div = tensor::oneform_sup_norm(gamma, &tensor::divergence(gamma, g_n)?)?;
    let tr = tensor::trace(gamma, g_n)?.max_abs();
    if div > tol * scale || tr > tol * scale {
        return Err(Error::NotTransverseTraceless {
            divergence: div,
            trace: tr,
        });
    }
    Ok(())
}

/// Fefferman–Graham expansion to order `order` with default options.
pub fn expand(gamma: &SymTensorField, g_n: &SymTensorField, order: usize) -> Result<FGSeries> {
    expand_with(gamma, g_n, order, ExpandOptions::default())
}

pub fn expand_with(
    gamma: &SymTensorField,
    g_n: &SymTensorField,
    order: usize,
    opts: ExpandOptions,
) -> Result<FGSeries> {
    gamma.check_compatible(g_n)?;
    let model = gamma.model();
    let n = model.dim();
    if order + 1 > TPS_CAP {
        return Err(Error::InvalidArgument(format!(
            "series order {order} exceeds {}",
            TPS_CAP - 1
        )));
    }
    if n % 2 == 1 {
        check_transverse_traceless(gamma, g_n, opts.tt_tolerance)?;
    }
    let mut rec = Recursion::new(gamma);
    let npts = rec.npts();
    let n2 = n * n;
    let mut diagnostics = SeriesDiagnostics::default();
    let mut log_obstruction = None;
    let mut truncation = order;

    for k in 1..=order {
        let src = rec.sources(k);
        if k == n {
            let g_pts = g_n.to_points();
            let tr_s = rec.traces(&src.radial);
            let installed = if n % 2 == 1 {
                g_pts
            } else {
                let magnitude = rec.rms_norm(&rec.obstruction(&src));
                if magnitude > opts.resonance_tolerance {
                    if !opts.resolve_log {
                        return Err(Error::LogResonance {
                            order: n,
                            magnitude,
                        });
                    }
                    log_obstruction = Some(LogObstruction {
                        tensor: SymTensorField::from_points(model, rec.obstruction(&src))?,
                        magnitude,
                    });
                    truncation = n - 1;
                    break;
                }
                let traces: Vec<f64> = tr_s.iter().map(|s| s / (n * n) as f64).collect();
                rec.compose(&g_pts, 1.0, &traces)
            };
            let tr_g = rec.traces(&installed);
            let nf = n as f64;
            let mut trace_eq: f64 = 0.0;
            let mut ric_eq: f64 = 0.0;
            for p in 0..npts {
                trace_eq = trace_eq.max((nf * nf * tr_g[p] - tr_s[p]).abs());
                ric_eq = ric_eq.max(((nf - 2.0) * nf / 2.0 * tr_g[p] + src.riccati[p]).abs());
            }
            diagnostics.trace_equation_at_n = Some(trace_eq);
            diagnostics.riccati_at_n = Some(ric_eq);
            rec.push(installed);
        } else {
            let (c, consistency) = rec.solve_order(k, &src);
            if consistency.is_some() {
                diagnostics.trace_equation_at_2n = consistency;
            }
            debug_assert_eq!(c.len(), npts * n2);
            rec.push(c);
        }
    }

    let coeffs = rec
        .coeffs
        .into_iter()
        .map(|c| SymTensorField::from_points(model, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(FGSeries {
        n,
        gamma: gamma.clone(),
        coeffs,
        log_obstruction,
        t_max: opts.t_max.unwrap_or_else(|| model.default_t_max()),
        diagnostics,
    }
    .truncated(truncation))
}

/// Magnitude of the `t^n log t` obstruction for even `n`.
pub fn resonance_check(gamma: &SymTensorField, n: usize) -> Result<f64> {
    if n != gamma.dim() {
        return Err(Error::InvalidArgument(format!(
            "n = {n} differs from boundary dimension {}",
            gamma.dim()
        )));
    }
    if n % 2 == 1 {
        return Err(Error::InvalidArgument(
            "resonance check applies to even n".into(),
        ));
    }
    let mut rec = Recursion::new(gamma);
    for k in 1..n {
        let src = rec.sources(k);
        let (c, _) = rec.solve_order(k, &src);
        rec.push(c);
    }
    let src = rec.sources(n);
    Ok(rec.rms_norm(&rec.obstruction(&src)))
}

impl FGSeries {
    fn truncated(mut self, order: usize) -> Self {
        self.coeffs.truncate(order + 1);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &SymTensorField {
        &self.gamma
    }

    pub fn model(&self) -> &BoundaryModel {
        self.gamma.model()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[SymTensorField] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&SymTensorField> {
        self.coeffs.get(k)
    }

    pub fn log_obstruction(&self) -> Option<&LogObstruction> {
        self.log_obstruction.as_ref()
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn diagnostics(&self) -> &SeriesDiagnostics {
        &self.diagnostics
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_max).contains(&t) {
            return Err(Error::OutOfRange(format!(
                "t = {t} outside [0, {}]",
                self.t_max
            )));
        }
        Ok(())
    }

    fn combine(&self, weight: impl Fn(usize) -> f64) -> SymTensorField {
        let mut raw = vec![0.0; self.gamma.raw().len()];
        for (k, c) in self.coeffs.iter().enumerate() {
            let w = weight(k);
            if w == 0.0 {
                continue;
            }
            for (r, v) in raw.iter_mut().zip(c.raw()) {
                *r += w * v;
            }
        }
        self.gamma.with_raw(raw)
    }

    /// `(g_t, ġ_t)`.
    pub fn eval(&self, t: f64) -> Result<(SymTensorField, SymTensorField)> {
        self.check_t(t)?;
        Ok((self.eval_value(t), self.eval_derivative(t, 1)))
    }

    /// `(g_t, ġ_t, g̈_t)`.
    pub fn eval_full(&self, t: f64) -> Result<(SymTensorField, SymTensorField, SymTensorField)> {
        self.check_t(t)?;
        Ok((
            self.eval_value(t),
            self.eval_derivative(t, 1),
            self.eval_derivative(t, 2),
        ))
    }

    fn eval_value(&self, t: f64) -> SymTensorField {
        self.combine(|k| t.powi(k as i32))
    }

    fn eval_derivative(&self, t: f64, order: usize) -> SymTensorField {
        self.combine(|k| {
            if k < order {
                0.0
            } else {
                let falling: f64 = (0..order).map(|j| (k - j) as f64).product();
                falling * t.powi((k - order) as i32)
            }
        })
    }

    /// Largest entry of the radial operator applied to the truncated series at `t > 0`.
    pub fn residual(&self, t: f64) -> Result<f64> {
        let (g, gd, gdd) = self.eval_full(t)?;
        radial_residual(t, &g, &gd, &gdd)
    }

    /// Size of the last retained term at `t`, relative to `|γ|`.
    pub fn truncation_estimate(&self, t: f64) -> f64 {
        let k = self.order();
        self.coeffs[k].max_abs() * t.powi(k as i32) / self.gamma.max_abs()
    }

    pub fn to_document(&self) -> SeriesDocument {
        SeriesDocument {
            schema_version: SCHEMA_VERSION,
            n: self.n,
            model: self.model().clone(),
            order: self.order(),
            t_max: self.t_max,
            coefficients: self.coeffs.iter().map(nested_components).collect(),
            log_obstruction: self.log_obstruction.as_ref().map(|o| LogDocument {
                magnitude: o.magnitude,
                tensor: nested_components(&o.tensor),
            }),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Radial operator residual of an arbitrary `(g, ġ, g̈)` at one `t`.
pub fn radial_residual(
    t: f64,
    g: &SymTensorField,
    gd: &SymTensorField,
    gdd: &SymTensorField,
) -> Result<f64> {
    let n = g.dim();
    let n2 = n * n;
    let ric = tensor::ricci(g)?.to_points();
    let (gp, gdp, gddp) = (g.to_points(), gd.to_points(), gdd.to_points());
    let mut worst: f64 = 0.0;
    for p in 0..gp.len() / n2 {
        let r = p * n2..(p + 1) * n2;
        let e = pointwise::radial_operator(
            t,
            &gp[r.clone()],
            &gdp[r.clone()],
            &gddp[r.clone()],
            &ric[r],
            n,
        );
        worst = e.iter().fold(worst, |m, v| m.max(v.abs()));
    }
    Ok(worst)
}

/// Nested JSON arrays: `[blocks]` or `[points][n][n]`.
pub fn nested_components(f: &SymTensorField) -> serde_json::Value {
    match f.values() {
        Values::Blocks(b) => serde_json::json!(b),
        Values::Grid(v) => {
            let n = f.dim();
            serde_json::Value::Array(
                v.chunks(n * n)
                    .map(|m| serde_json::json!(m.chunks(n).collect::<Vec<_>>()))
                    .collect(),
            )
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LogDocument {
    pub magnitude: f64,
    pub tensor: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesDocument {
    pub schema_version: u32,
    pub n: usize,
    pub model: BoundaryModel,
    pub order: usize,
    pub t_max: f64,
    pub coefficients: Vec<serde_json::Value>,
    pub log_obstruction: Option<LogDocument>,
    pub diagnostics: SeriesDiagnostics,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::metric_of;
    use std::f64::consts::PI;

    fn blocks(model: &BoundaryModel, b: &[f64]) -> SymTensorField {
        SymTensorField::from_blocks(model, b.to_vec()).unwrap()
    }

    #[test]
    fn indicial_roots_of_model_operators() {
        assert_eq!(indicial_roots(RadialOperatorSpec::trace()).unwrap(), (0.0, 2.0));
        assert_eq!(indicial_roots(RadialOperatorSpec::trace_free(3)).unwrap(), (0.0, 3.0));
        let c0 = RadialOperatorSpec { drop_coefficient: 0.0 };
        assert_eq!(indicial_roots(c0).unwrap(), (0.0, 1.0));
        assert!(indicial_roots(RadialOperatorSpec { drop_coefficient: -1.5 }).is_err());
    }

    #[test]
    fn flat_torus_cusp_series_is_trivial() {
        let m = BoundaryModel::standard_torus(3, 8).unwrap();
        let g = metric_of(&m);
        let s = expand(&g, &SymTensorField::zeros(&m), 8).unwrap();
        assert_eq!(s.order(), 8);
        for k in 1..=8 {
            assert_eq!(s.coeff(k).unwrap().max_abs(), 0.0, "order {k}");
        }
        let (gt, gd) = s.eval(0.4).unwrap();
        assert_eq!(gt, g);
        assert_eq!(gd.max_abs(), 0.0);
    }

    #[test]
    fn poincare_series_on_round_three_sphere() {
        // oracle: expansion of (1 − t²/4)² = 1 − t²/2 + t⁴/16
        let m = BoundaryModel::round_sphere(3, 1.0).unwrap();
        let g = metric_of(&m);
        let s = expand(&g, &SymTensorField::zeros(&m), 10).unwrap();
        let expect = [1.0, 0.0, -0.5, 0.0, 1.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (k, e) in expect.iter().enumerate() {
            let c = s.coeff(k).unwrap().blocks().unwrap()[0];
            assert!((c - e).abs() < 1e-13, "order {k}: {c}");
        }
        let (gt, gd) = s.eval(1.0).unwrap();
        assert!((gt.blocks().unwrap()[0] - 0.5625).abs() < 1e-13);
        assert!((gd.blocks().unwrap()[0] + 0.75).abs() < 1e-13);
        let d = s.diagnostics();
        assert!(d.trace_equation_at_n.unwrap() < 1e-13);
        assert!(d.riccati_at_n.unwrap() < 1e-13);
        assert!(d.trace_equation_at_2n.unwrap() < 1e-12);
    }

    #[test]
    fn circle_sphere_series_matches_undetermined_coefficients() {
        // frozen from an independent symbolic solve of the block equations
        let m = BoundaryModel::circle_sphere(3, PI, 1.0).unwrap();
        let g = metric_of(&m);
        let e = 0.1;
        let s = expand(&g, &blocks(&m, &[2.0 * e, -e]), 7).unwrap();
        let circle = [1.0, 0.0, 0.5, 2.0 * e, 1.0 / 16.0, 0.9 * e, 13.0 * e * e / 8.0, 11.0 * e / 56.0];
        let sphere = [1.0, 0.0, -0.5, -e, 1.0 / 16.0, 0.15 * e, e * e / 8.0, e / 112.0];
        for k in 0..=7 {
            let b = s.coeff(k).unwrap().blocks().unwrap();
            assert!((b[0] - circle[k]).abs() < 1e-13, "circle {k}: {}", b[0]);
            assert!((b[1] - sphere[k]).abs() < 1e-13, "sphere {k}: {}", b[1]);
        }
    }

    #[test]
    fn schwarzschild_boundary_data_reproduces_higher_coefficients() {
        // frozen from the exact rational expansion of the n = 3, m = 1 metric
        let m = BoundaryModel::circle_sphere(3, 2.0, 1.0).unwrap();
        let s = expand(&metric_of(&m), &blocks(&m, &[-4.0 / 3.0, 2.0 / 3.0]), 6).unwrap();
        let circle = [1.0, 0.0, 0.5, -4.0 / 3.0, 1.0 / 16.0, -0.6, 13.0 / 18.0];
        let sphere = [1.0, 0.0, -0.5, 2.0 / 3.0, 1.0 / 16.0, -0.1, 1.0 / 18.0];
        for k in 0..=6 {
            let b = s.coeff(k).unwrap().blocks().unwrap();
            assert!((b[0] - circle[k]).abs() < 1e-13, "circle {k}: {}", b[0]);
            assert!((b[1] - sphere[k]).abs() < 1e-13, "sphere {k}: {}", b[1]);
        }
    }

    #[test]
    fn warped_four_torus_is_obstructed() {
        let t4 = BoundaryModel::standard_torus(4, 8).unwrap();
        let g = SymTensorField::from_fn(&t4, |x| {
            let e = (0.3 * x[0].sin()).exp();
            let mut m = vec![0.0; 16];
            m[0] = 1.0;
            m[5] = e * e;
            m[10] = 1.0 / (e * e);
            m[15] = 1.0;
            m
        })
        .unwrap();
        let mag = resonance_check(&g, 4).unwrap();
        assert!(mag > 1e-4, "obstruction {mag}");
        let zero = SymTensorField::zeros(&t4);
        let err = expand(&g, &zero, 6).unwrap_err();
        assert!(matches!(err, Error::LogResonance { order: 4, .. }));
        let opts = ExpandOptions {
            resolve_log: true,
            ..Default::default()
        };
        let s = expand_with(&g, &zero, 6, opts).unwrap();
        assert_eq!(s.order(), 3);
        let o = s.log_obstruction().unwrap();
        assert!((o.magnitude - mag).abs() < 1e-12);
        assert!(tensor::trace(&g, &o.tensor).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn rejects_non_tt_data_for_odd_n() {
        let m = BoundaryModel::circle_sphere(3, PI, 1.0).unwrap();
        let err = expand(&metric_of(&m), &blocks(&m, &[1.0, 1.0]), 5).unwrap_err();
        assert!(matches!(err, Error::NotTransverseTraceless { .. }));

        let t = BoundaryModel::standard_torus(3, 8).unwrap();
        let bad = SymTensorField::from_fn(&t, |x| {
            vec![x[0].sin(), 0.0, 0.0, 0.0, -x[0].sin(), 0.0, 0.0, 0.0, 0.0]
        })
        .unwrap();
        assert!(expand(&metric_of(&t), &bad, 4).is_err());
    }

    #[test]
    fn even_n_conformally_flat_boundaries_have_no_obstruction() {
        let s4 = BoundaryModel::round_sphere(4, 1.0).unwrap();
        assert!(resonance_check(&metric_of(&s4), 4).unwrap() < 1e-13);
        let cs = BoundaryModel::circle_sphere(4, 2.0, 1.0).unwrap();
        assert!(resonance_check(&metric_of(&cs), 4).unwrap() < 1e-13);
        let t4 = BoundaryModel::standard_torus(4, 8).unwrap();
        assert_eq!(resonance_check(&metric_of(&t4), 4).unwrap(), 0.0);
    }

    #[test]
    fn residual_slope_of_truncated_series() {
        let m = BoundaryModel::circle_sphere(3, PI, 1.0).unwrap();
        let s = expand(&metric_of(&m), &blocks(&m, &[0.4, -0.2]), 6).unwrap();
        let r1 = s.residual(0.05).unwrap();
        let r2 = s.residual(0.1).unwrap();
        let slope = (r2 / r1).ln() / 2f64.ln();
        assert!(slope >= 5.0, "slope {slope}");
    }

    #[test]
    fn eval_rejects_out_of_range() {
        let m = BoundaryModel::round_sphere(3, 1.0).unwrap();
        let s = expand(&metric_of(&m), &SymTensorField::zeros(&m), 4).unwrap();
        assert!(s.eval(-0.1).is_err());
        assert!(s.eval(1.5).is_err());
        let (g0, gd0) = s.eval(0.0).unwrap();
        assert_eq!(g0, metric_of(&m));
        assert_eq!(gd0.max_abs(), 0.0);
    }
}
