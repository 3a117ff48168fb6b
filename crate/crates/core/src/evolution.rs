//! Radial evolution of the compactified metric `g_t` away from conformal
//! infinity, seeded by a truncated Fefferman–Graham series.
//!
//! Cohomogeneity-one data reduce the radial equation to finitely many scalar
//! ODEs: the block coefficients on homogeneous models, or the constant matrix
//! entries of spatially constant data on a flat torus.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{SymTensorField, Values};
use crate::model::BoundaryModel;
use crate::ode::{self, OdeOptions};
use crate::pointwise;
use crate::series::FGSeries;
use crate::tensor;

pub const GAUGE_TAG: &str = "geodesic-compactified";
pub const DEFAULT_SEED_T: f64 = 1e-2;
pub const DEFAULT_GRID_POINTS: usize = 121;

/// Samples of `g_t` and its `t`-derivatives.
#[derive(Debug, Clone)]
pub struct MetricCurve {
    gamma: SymTensorField,
    t: Vec<f64>,
    values: Vec<SymTensorField>,
    derivs: Vec<SymTensorField>,
    second_derivs: Option<Vec<SymTensorField>>,
}

impl MetricCurve {
    pub fn new(
        gamma: SymTensorField,
        t: Vec<f64>,
        values: Vec<SymTensorField>,
        derivs: Vec<SymTensorField>,
        second_derivs: Option<Vec<SymTensorField>>,
    ) -> Result<Self> {
        if t.is_empty() || t.len() != values.len() || t.len() != derivs.len() {
            return Err(Error::InvalidArgument(
                "curve needs one value and derivative per sample".into(),
            ));
        }
        if let Some(s) = &second_derivs {
            if s.len() != t.len() {
                return Err(Error::InvalidArgument(
                    "second derivatives must match the sample count".into(),
                ));
            }
        }
        if t[0] <= 0.0 || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "t samples must be positive and strictly increasing".into(),
            ));
        }
        for f in values
            .iter()
            .chain(&derivs)
            .chain(second_derivs.iter().flatten())
        {
            gamma.check_compatible(f)?;
        }
        for (ti, g) in t.iter().zip(&values) {
            if !is_positive(g) {
                return Err(Error::PositivityLost { t: *ti });
            }
        }
        Ok(Self {
            gamma,
            t,
            values,
            derivs,
            second_derivs,
        })
    }

    pub fn model(&self) -> &BoundaryModel {
        self.gamma.model()
    }

    pub fn gamma(&self) -> &SymTensorField {
        &self.gamma
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[SymTensorField] {
        &self.values
    }

    pub fn derivs(&self) -> &[SymTensorField] {
        &self.derivs
    }

    pub fn second_derivs(&self) -> Option<&[SymTensorField]> {
        self.second_derivs.as_deref()
    }

    pub fn gauge_tag(&self) -> &'static str {
        GAUGE_TAG
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `g̈` at sample `i`: stored values, else divided differences of `ġ`.
    pub fn second_derivative(&self, i: usize) -> Result<SymTensorField> {
        if let Some(s) = &self.second_derivs {
            return Ok(s[i].clone());
        }
        self.differenced_second_derivative(i)
    }

    fn differenced_second_derivative(&self, i: usize) -> Result<SymTensorField> {
        let m = self.t.len();
        if m < 3 {
            return Err(Error::InvalidArgument(
                "need at least 3 samples to difference".into(),
            ));
        }
        let width = m.min(5);
        let lo = i.saturating_sub(width / 2).min(m - width);
        let nodes = &self.t[lo..lo + width];
        let x = self.t[i];
        // derivative of the Lagrange interpolant through the stencil
        let weights: Vec<f64> = (0..width)
            .map(|j| {
                (0..width)
                    .filter(|&k| k != j)
                    .map(|k| {
                        let mut w = 1.0 / (nodes[j] - nodes[k]);
                        for l in (0..width).filter(|&l| l != j && l != k) {
                            w *= (x - nodes[l]) / (nodes[j] - nodes[l]);
                        }
                        w
                    })
                    .sum()
            })
            .collect();
        let raw: Vec<f64> = (0..self.derivs[0].raw().len())
            .map(|k| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * self.derivs[lo + j].raw()[k])
                    .sum()
            })
            .collect();
        Ok(self.derivs[i].with_raw(raw))
    }

    /// Restriction to the samples with `t` in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> Result<Self> {
        let idx: Vec<usize> = (0..self.t.len())
            .filter(|&i| self.t[i] >= lo && self.t[i] <= hi)
            .collect();
        let pick = |v: &[SymTensorField]| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        Self::new(
            self.gamma.clone(),
            idx.iter().map(|&i| self.t[i]).collect(),
            pick(&self.values),
            pick(&self.derivs),
            self.second_derivs.as_deref().map(pick),
        )
    }

    /// CSV with columns `t`, the components of `g_t`, then constraint
    /// residuals when a report is supplied.
    pub fn to_csv(&self, report: Option<&ConstraintReport>) -> Result<String> {
        if let Some(r) = report {
            if r.records.len() != self.t.len() {
                return Err(Error::GridMismatch);
            }
        }
        let ncomp = self.values[0].raw().len();
        let label = if self.gamma.is_grid() { "g" } else { "block" };
        let mut out = String::from("t");
        for k in 0..ncomp {
            write!(out, ",{label}{k}").expect("string write");
        }
        if report.is_some() {
            out.push_str(",divergence,hamiltonian,riccati");
        }
        out.push('\n');
        for (i, t) in self.t.iter().enumerate() {
            write!(out, "{t:.16e}").expect("string write");
            for v in self.values[i].raw() {
                write!(out, ",{v:.16e}").expect("string write");
            }
            if let Some(r) = report {
                let rec = &r.records[i];
                write!(
                    out,
                    ",{:.16e},{:.16e},{:.16e}",
                    rec.divergence, rec.hamiltonian, rec.riccati
                )
                .expect("string write");
            }
            out.push('\n');
        }
        Ok(out)
    }
}

fn is_positive(g: &SymTensorField) -> bool {
    let n = g.dim();
    let pts = g.to_points();
    pts.chunks(n * n)
        .all(|m| pointwise::is_positive_definite(m, n))
}

/// Log-spaced samples from `t0` to `t1`, endpoints included.
pub fn log_grid(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let (a, b) = (t0.ln(), t1.ln());
    let mut g: Vec<f64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect();
    g[0] = t0;
    g[count - 1] = t1;
    g
}

/// Integrates the radial equation from `t0` to `t1` on the default log grid.
pub fn evolve(series: &FGSeries, t0: f64, t1: f64, tol: f64) -> Result<MetricCurve> {
    if !(t0 > 0.0 && t1 > t0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < t0 < t1, got t0 = {t0}, t1 = {t1}"
        )));
    }
    evolve_on_grid(series, &log_grid(t0, t1, DEFAULT_GRID_POINTS), tol)
}

/// Reduced state: one representative `n×n` matrix and its curvature.
struct Reduction {
    n: usize,
    ricci: Vec<f64>,
    to_field: Box<dyn Fn(&[f64]) -> Result<SymTensorField>>,
}

fn reduction(gamma: &SymTensorField) -> Result<Reduction> {
    let model = gamma.model().clone();
    let n = model.dim();
    if model.is_homogeneous() {
        let ricci = SymTensorField::from_blocks(&model, model.reference_ricci())?.to_points();
        let m = model.clone();
        Ok(Reduction {
            n,
            ricci,
            to_field: Box::new(move |p| SymTensorField::from_points(&m, p.to_vec())),
        })
    } else {
        let m = model.clone();
        Ok(Reduction {
            n,
            ricci: vec![0.0; n * n],
            to_field: Box::new(move |p| SymTensorField::constant(&m, p)),
        })
    }
}

fn representative(f: &SymTensorField) -> Vec<f64> {
    match f.values() {
        Values::Blocks(_) => f.to_points(),
        Values::Grid(_) => f.matrix_at(0).to_vec(),
    }
}

pub fn evolve_on_grid(series: &FGSeries, grid: &[f64], tol: f64) -> Result<MetricCurve> {
    let n = series.n();
    if series.order() < n + 2 {
        return Err(Error::InvalidArgument(format!(
            "series order {} below n + 2 = {}",
            series.order(),
            n + 2
        )));
    }
    if grid.len() < 2 || grid[0] <= 0.0 {
        return Err(Error::InvalidArgument(
            "grid needs at least two positive samples".into(),
        ));
    }
    let t0 = grid[0];
    let gamma = series.gamma();
    if gamma.is_grid() {
        let flat = gamma.is_spatially_constant(1e-12)
            && series.coeffs().iter().all(|c| c.is_spatially_constant(1e-12));
        if !flat {
            return Err(Error::Inhomogeneous);
        }
    }
    let (g0, gd0) = series.eval(t0)?;
    evolve_from_state(gamma, &g0, &gd0, grid, tol)
}

/// Integrates from the state `(g, ġ)` at `grid[0]` through the grid.
pub fn evolve_from_state(
    gamma: &SymTensorField,
    g0: &SymTensorField,
    gd0: &SymTensorField,
    grid: &[f64],
    tol: f64,
) -> Result<MetricCurve> {
    gamma.check_compatible(g0)?;
    gamma.check_compatible(gd0)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if grid.len() < 2 || grid[0] <= 0.0 {
        return Err(Error::InvalidArgument(
            "grid needs at least two positive samples".into(),
        ));
    }
    if gamma.is_grid() && !(g0.is_spatially_constant(1e-12) && gd0.is_spatially_constant(1e-12)) {
        return Err(Error::Inhomogeneous);
    }
    let red = reduction(gamma)?;
    let nn = red.n * red.n;
    let mut y0 = representative(g0);
    y0.extend(representative(gd0));

    let rhs = |t: f64, y: &[f64]| -> Vec<f64> {
        let gd = constrained_velocity(t, &y[..nn], &y[nn..], &red.ricci, red.n);
        let acc = pointwise::radial_acceleration(t, &y[..nn], &gd, &red.ricci, red.n);
        let mut d = gd;
        d.extend(acc);
        d
    };
    let (states, _) = ode::integrate(rhs, &y0, grid, OdeOptions::with_tolerance(tol), |t, y| {
        if pointwise::is_positive_definite(&y[..nn], red.n) {
            Ok(())
        } else {
            Err(Error::PositivityLost { t })
        }
    })?;

    let mut values = Vec::with_capacity(grid.len());
    let mut derivs = Vec::with_capacity(grid.len());
    let mut second = Vec::with_capacity(grid.len());
    for (t, y) in grid.iter().zip(&states) {
        let gd = constrained_velocity(*t, &y[..nn], &y[nn..], &red.ricci, red.n);
        let acc = pointwise::radial_acceleration(*t, &y[..nn], &gd, &red.ricci, red.n);
        values.push((red.to_field)(&y[..nn])?);
        derivs.push((red.to_field)(&gd)?);
        second.push((red.to_field)(&acc)?);
    }
    MetricCurve::new(gamma.clone(), grid.to_vec(), values, derivs, Some(second))
}

/// `ġ` with its `g`-trace replaced by the root of the Hamiltonian constraint
/// `2(n−1)H + t(|A|² − H² + R) = 0` that vanishes at `t = 0`.
fn constrained_velocity(t: f64, g: &[f64], gd: &[f64], ric: &[f64], n: usize) -> Vec<f64> {
    let ginv = pointwise::inverse(g, n);
    let mixed = pointwise::matmul(&ginv, gd, n);
    let nf = n as f64;
    let tr = pointwise::trace(&mixed, n);
    let mut free = mixed.clone();
    for i in 0..n {
        free[i * n + i] -= tr / nf;
    }
    let a0 = 0.25 * pointwise::trace_of_product(&free, &free, n);
    let scal = pointwise::trace_of_product(&ginv, ric, n);
    let alpha = t * (nf - 1.0) / nf;
    let beta = 2.0 * (nf - 1.0);
    let c = t * (a0 + scal);
    let h = -2.0 * c / (beta + (beta * beta + 4.0 * alpha * c).max(0.0).sqrt());
    (0..n * n)
        .map(|k| gd[k] + (2.0 * h - tr) / nf * g[k])
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstraintRecord {
    pub t: f64,
    /// `|δ_{g_t}(A − H g_t)|_γ`.
    pub divergence: f64,
    /// `|2(n−1)H + t(|A|² − H² + R)|`.
    pub hamiltonian: f64,
    /// `|t Ḣ − H + t|A|²|`.
    pub riccati: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintReport {
    pub records: Vec<ConstraintRecord>,
}

impl ConstraintReport {
    pub fn max_divergence(&self) -> f64 {
        self.records.iter().map(|r| r.divergence.abs()).fold(0.0, f64::max)
    }

    pub fn max_hamiltonian(&self) -> f64 {
        self.records.iter().map(|r| r.hamiltonian.abs()).fold(0.0, f64::max)
    }

    pub fn max_riccati(&self) -> f64 {
        self.records.iter().map(|r| r.riccati.abs()).fold(0.0, f64::max)
    }

    pub fn max_all(&self) -> f64 {
        self.max_divergence()
            .max(self.max_hamiltonian())
            .max(self.max_riccati())
    }
}

pub fn constraint_residuals(curve: &MetricCurve) -> Result<ConstraintReport> {
    if curve.len() < 3 {
        return Err(Error::InvalidArgument(
            "constraint residuals need at least 3 samples".into(),
        ));
    }
    let n = curve.gamma.dim();
    let nn = n * n;
    let mut records = Vec::with_capacity(curve.len());
    for (i, &t) in curve.t.iter().enumerate() {
        let g = &curve.values[i];
        let gd = &curve.derivs[i];
        let gdd = curve.second_derivative(i)?;
        let scal = tensor::scalar_curvature(g)?.raw().to_vec();
        let (gp, gdp, gddp) = (g.to_points(), gd.to_points(), gdd.to_points());
        let mut shape = vec![0.0; gp.len()];
        let mut hamiltonian: f64 = 0.0;
        let mut riccati: f64 = 0.0;
        for p in 0..gp.len() / nn {
            let r = p * nn..(p + 1) * nn;
            let (h, _) = pointwise::mean_curvature(&gp[r.clone()], &gdp[r.clone()], n);
            for k in r.clone() {
                shape[k] = 0.5 * gdp[k] - h * gp[k];
            }
            let ham = pointwise::hamiltonian(t, &gp[r.clone()], &gdp[r.clone()], scal[p], n);
            let ric = pointwise::riccati_trace(t, &gp[r.clone()], &gdp[r.clone()], &gddp[r], n);
            hamiltonian = hamiltonian.max(ham.abs());
            riccati = riccati.max(ric.abs());
        }
        let shape = SymTensorField::from_points(curve.model(), shape)?;
        let divergence =
            tensor::oneform_sup_norm(&curve.gamma, &tensor::divergence(g, &shape)?)?;
        records.push(ConstraintRecord {
            t,
            divergence,
            hamiltonian,
            riccati,
        });
    }
    Ok(ConstraintReport { records })
}

/// Largest entry of the radial equation at sample `i`, with `g̈` taken from
/// divided differences of `ġ` rather than from stored values.
pub fn einstein_residual(curve: &MetricCurve, i: usize) -> Result<f64> {
    if i >= curve.len() {
        return Err(Error::OutOfRange(format!("sample {i} of {}", curve.len())));
    }
    let gdd = curve.differenced_second_derivative(i)?;
    crate::series::radial_residual(curve.t[i], &curve.values[i], &curve.derivs[i], &gdd)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DifferenceRecord {
    pub t: f64,
    pub trace_norm: f64,
    pub trace_free_norm: f64,
}

/// Split of `b − a` into `γ`-trace and trace-free parts, as sup `γ`-norms.
pub fn difference(a: &MetricCurve, b: &MetricCurve) -> Result<Vec<DifferenceRecord>> {
    if a.model() != b.model() {
        return Err(Error::ModelMismatch);
    }
    if a.t.len() != b.t.len()
        || a.t
            .iter()
            .zip(&b.t)
            .any(|(x, y)| (x - y).abs() > 1e-14 * x.abs().max(1.0))
    {
        return Err(Error::GridMismatch);
    }
    let gamma = &a.gamma;
    a.values
        .iter()
        .zip(&b.values)
        .zip(&a.t)
        .map(|((ga, gb), &t)| {
            let k = gb.sub(ga)?;
            let free = tensor::trace_free_part(gamma, &k)?;
            let trace_part = k.sub(&free)?;
            Ok(DifferenceRecord {
                t,
                trace_norm: tensor::sup_norm(gamma, &trace_part)?,
                trace_free_norm: tensor::sup_norm(gamma, &free)?,
            })
        })
        .collect()
}
