//! Closed-form Einstein metrics in compactified geodesic gauge: the
//! Poincaré ball, the hyperbolic cone over any boundary, and the
//! AdS-Schwarzschild family `V⁻¹dr² + V dθ² + r² g_{S^{n−1}}` with
//! `V = 1 + r² − 2m / r^{n−2}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::MetricCurve;
use crate::field::SymTensorField;
use crate::model::BoundaryModel;
use crate::numerics;
use crate::series::FGSeries;
use crate::tensor::metric_of;

/// `(1 − t²/4)² γ_{Sⁿ(1)}` for `t` in `(0, 2)`.
pub fn poincare_curve(n: usize, t_grid: &[f64]) -> Result<MetricCurve> {
    let model = BoundaryModel::round_sphere(n, 1.0)?;
    if let Some(t) = t_grid.iter().find(|t| **t >= 2.0) {
        return Err(Error::OutOfRange(format!("t = {t} must be below 2")));
    }
    let field = |v: f64| SymTensorField::from_blocks(&model, vec![v]);
    let mut values = Vec::with_capacity(t_grid.len());
    let mut derivs = Vec::with_capacity(t_grid.len());
    let mut second = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let a = 1.0 - t * t / 4.0;
        values.push(field(a * a)?);
        derivs.push(field(-t * a)?);
        second.push(field(-1.0 + 0.75 * t * t)?);
    }
    MetricCurve::new(metric_of(&model), t_grid.to_vec(), values, derivs, Some(second))
}

/// The constant curve `g_t ≡ γ`.
pub fn cone_metric_curve(gamma: &SymTensorField, t_grid: &[f64]) -> Result<MetricCurve> {
    let zero = gamma.zeros_like();
    MetricCurve::new(
        gamma.clone(),
        t_grid.to_vec(),
        vec![gamma.clone(); t_grid.len()],
        vec![zero.clone(); t_grid.len()],
        Some(vec![zero; t_grid.len()]),
    )
}

pub fn schwarzschild_v(n: usize, m: f64, r: f64) -> f64 {
    1.0 + r * r - 2.0 * m / r.powi(n as i32 - 2)
}

fn v_prime(n: usize, m: f64, r: f64) -> f64 {
    2.0 * r + 2.0 * m * (n as f64 - 2.0) / r.powi(n as i32 - 1)
}

fn v_second(n: usize, m: f64, r: f64) -> f64 {
    let k = n as f64 - 2.0;
    2.0 - 2.0 * m * k * (k + 1.0) / r.powi(n as i32)
}

fn check_dim(n: usize) -> Result<()> {
    if !(3..=7).contains(&n) {
        return Err(Error::InvalidArgument(format!("n = {n} outside 3..=7")));
    }
    Ok(())
}

/// Largest root of `V`.
pub fn schwarzschild_rplus(n: usize, m: f64) -> Result<f64> {
    check_dim(n)?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidArgument(format!("mass {m} must be positive")));
    }
    let v = |r: f64| schwarzschild_v(n, m, r);
    let mut hi = 1.0;
    while v(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while v(lo) > 0.0 {
        lo /= 2.0;
    }
    numerics::bracketed_root(v, lo, hi, 4.0 * f64::EPSILON)
}

/// Circle period making the Euclidean metric smooth at the horizon.
pub fn schwarzschild_beta(n: usize, r_plus: f64) -> Result<f64> {
    check_dim(n)?;
    if !(r_plus > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon radius {r_plus} must be positive"
        )));
    }
    let nf = n as f64;
    Ok(4.0 * PI * r_plus / (nf * r_plus * r_plus + nf - 2.0))
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct BetaMax {
    pub n: usize,
    /// Numerical maximizer of `β(r₊)`.
    pub r_plus: f64,
    /// Numerical maximum of `β(r₊)`.
    pub beta_max: f64,
    /// Stationary point `√((n−2)/n)`.
    pub r_plus_stationary: f64,
    /// `β` at the stationary point, `2π/√(n(n−2))`.
    pub beta_stationary: f64,
    /// The closed form `2π √((n−2)/n)`.
    pub beta_printed_formula: f64,
    /// `beta_printed_formula − beta_max`.
    pub printed_formula_discrepancy: f64,
}

/// Maximal circle period over the Schwarzschild family, by a log-grid scan
/// followed by golden-section refinement.
pub fn schwarzschild_beta_max(n: usize) -> Result<BetaMax> {
    check_dim(n)?;
    let beta = |r: f64| schwarzschild_beta(n, r).expect("positive radius");
    let grid: Vec<f64> = (0..=600).map(|i| 10f64.powf(-3.0 + i as f64 / 100.0)).collect();
    let best = (0..grid.len())
        .max_by(|&a, &b| beta(grid[a]).total_cmp(&beta(grid[b])))
        .expect("nonempty grid");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (r_plus, beta_max) = numerics::golden_max(beta, lo, hi, 1e-12);
    let nf = n as f64;
    let r_plus_stationary = ((nf - 2.0) / nf).sqrt();
    let beta_printed_formula = 2.0 * PI * ((nf - 2.0) / nf).sqrt();
    Ok(BetaMax {
        n,
        r_plus,
        beta_max,
        r_plus_stationary,
        beta_stationary: 2.0 * PI / (nf * (nf - 2.0)).sqrt(),
        beta_printed_formula,
        printed_formula_discrepancy: beta_printed_formula - beta_max,
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SchwarzschildParams {
    pub n: usize,
    pub m: f64,
    pub r_plus: f64,
    pub beta: f64,
}

impl SchwarzschildParams {
    pub fn new(n: usize, m: f64) -> Result<Self> {
        let r_plus = schwarzschild_rplus(n, m)?;
        Ok(Self {
            n,
            m,
            r_plus,
            beta: schwarzschild_beta(n, r_plus)?,
        })
    }

    pub fn v(&self, r: f64) -> f64 {
        schwarzschild_v(self.n, self.m, r)
    }

    /// Boundary `S¹(β) × S^{n−1}(1)`.
    pub fn boundary(&self) -> Result<BoundaryModel> {
        BoundaryModel::circle_sphere(self.n, self.beta, 1.0)
    }

    /// `ln(t r)` as a function of `r > r₊`, normalized so that it vanishes
    /// as `r → ∞`.
    fn log_tr(&self, r: f64) -> f64 {
        let far_start = 2.0 * self.r_plus + 1.0;
        if r >= far_start {
            self.far_integral(r)
        } else {
            self.far_integral(far_start) + self.near_integral(r, far_start)
        }
    }

    /// `∫_r^∞ (1/√V − 1/s) ds` through `w = 1/s`.
    fn far_integral(&self, r: f64) -> f64 {
        let (n, m) = (self.n, self.m);
        let f = |w: f64| {
            if w == 0.0 {
                return 0.0;
            }
            let s = 1.0 / w;
            let sv = schwarzschild_v(n, m, s).sqrt();
            let num = -1.0 + 2.0 * m / s.powi(n as i32 - 2);
            num / (s * sv * (s + sv)) / (w * w)
        };
        numerics::integrate(f, 0.0, 1.0 / r, 1e-13, 1e-17).0
    }

    /// `∫_r^b (1/√V − 1/s) ds` through `s = r₊ + u²`.
    fn near_integral(&self, r: f64, b: f64) -> f64 {
        let rp = self.r_plus;
        let (n, m) = (self.n, self.m);
        let q = |s: f64| {
            let k = n - 2;
            let geometric: f64 = (0..k)
                .map(|j| s.powi(j as i32) * rp.powi((k - 1 - j) as i32))
                .sum();
            (s + rp) + 2.0 * m * geometric / (s.powi(k as i32) * rp.powi(k as i32))
        };
        let f = |u: f64| {
            let s = rp + u * u;
            2.0 / q(s).sqrt() - 2.0 * u / s
        };
        let ua = (r - rp).max(0.0).sqrt();
        let ub = (b - rp).sqrt();
        numerics::integrate(f, ua, ub, 1e-13, 1e-17).0
    }

    /// `t` at the horizon, the end of the geodesic-gauge range.
    pub fn t_horizon(&self) -> f64 {
        self.log_tr(self.r_plus).exp() / self.r_plus
    }

    /// Areal radius at geodesic time `t`.
    pub fn radius_at(&self, t: f64) -> Result<f64> {
        let t_h = self.t_horizon();
        if !(t > 0.0 && t < t_h) {
            return Err(Error::OutOfRange(format!(
                "t = {t} outside (0, {t_h}) for this black hole"
            )));
        }
        let target = t.ln();
        let phi = |r: f64| self.log_tr(r) - r.ln() - target;
        let mut hi = (2.0 / t).max(2.0 * self.r_plus);
        while phi(hi) > 0.0 {
            hi *= 2.0;
        }
        numerics::bracketed_root(phi, self.r_plus, hi, 4.0 * f64::EPSILON)
    }
}

/// The Schwarzschild metric as a compactified curve on `S¹(β) × S^{n−1}`:
/// blocks `(t² V, t² r²)` against `(dθ², g_{S^{n−1}(1)})`.
pub fn schwarzschild_fg_curve(params: &SchwarzschildParams, t_grid: &[f64]) -> Result<MetricCurve> {
    let model = params.boundary()?;
    let (n, m) = (params.n, params.m);
    let mut values = Vec::with_capacity(t_grid.len());
    let mut derivs = Vec::with_capacity(t_grid.len());
    let mut second = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let r = params.radius_at(t)?;
        let v = schwarzschild_v(n, m, r);
        let sv = v.sqrt();
        let (v1, v2) = (v_prime(n, m, r), v_second(n, m, r));
        let tr = params.log_tr(r).exp();
        let circle = tr * tr * v / (r * r);
        let sphere = tr * tr;
        values.push(SymTensorField::from_blocks(&model, vec![circle, sphere])?);
        derivs.push(SymTensorField::from_blocks(
            &model,
            vec![2.0 * t * v - t * v1 * sv, 2.0 * t * r * r - 2.0 * t * r * sv],
        )?);
        second.push(SymTensorField::from_blocks(
            &model,
            vec![
                2.0 * v - 3.0 * v1 * sv + v2 * v + 0.5 * v1 * v1,
                2.0 * r * r - 6.0 * r * sv + 2.0 * v + r * v1,
            ],
        )?);
    }
    MetricCurve::new(metric_of(&model), t_grid.to_vec(), values, derivs, Some(second))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitOptions {
    pub window: Option<(f64, f64)>,
    /// Degree of the polynomial fitted to the remainder.
    pub degree: usize,
    /// Allowed change of the coefficient when the window is halved.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            window: None,
            degree: 6,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoefficientFit {
    pub coefficient: SymTensorField,
    pub window: (f64, f64),
    /// Largest change against the half-window refit.
    pub sensitivity: f64,
}

pub fn extract_coefficient(curve: &MetricCurve, series: &FGSeries, k: usize) -> Result<SymTensorField> {
    Ok(extract_coefficient_with(curve, series, k, FitOptions::default())?.coefficient)
}

/// Least-squares fit of `g_t − Σ_{j<k} t^j g_(j)` by `t^k` times a
/// polynomial in `t`, reporting the constant term of the polynomial.
pub fn extract_coefficient_with(
    curve: &MetricCurve,
    series: &FGSeries,
    k: usize,
    opts: FitOptions,
) -> Result<CoefficientFit> {
    if curve.model() != series.model() {
        return Err(Error::ModelMismatch);
    }
    if series.order() + 1 < k {
        return Err(Error::InvalidArgument(format!(
            "series of order {} lacks coefficients below {k}",
            series.order()
        )));
    }
    let t = curve.t_grid();
    let window = opts
        .window
        .unwrap_or((t[0], t[t.len() - 1].min(0.2)));
    let fit = |lo: f64, hi: f64| -> Result<Vec<f64>> {
        let idx: Vec<usize> = (0..t.len()).filter(|&i| t[i] >= lo && t[i] <= hi).collect();
        if idx.len() < opts.degree + 3 {
            return Err(Error::EmptyWindow(idx.len()));
        }
        let ncomp = curve.values()[0].raw().len();
        let cols = opts.degree + 1;
        let mut a = Vec::with_capacity(idx.len() * cols);
        let mut b = Vec::with_capacity(idx.len() * ncomp);
        for &i in &idx {
            let ti = t[i];
            let x = ti / hi;
            let w = x.powi(k as i32);
            a.extend((0..cols).map(|d| w * x.powi(d as i32)));
            let tk = hi.powi(k as i32);
            for c in 0..ncomp {
                let lower: f64 = (0..k)
                    .map(|j| ti.powi(j as i32) * series.coeffs()[j].raw()[c])
                    .sum();
                b.push((curve.values()[i].raw()[c] - lower) / tk);
            }
        }
        let x = numerics::least_squares(&a, cols, &b, ncomp)?;
        Ok(x[..ncomp].to_vec())
    };
    let full = fit(window.0, window.1)?;
    let half = fit(window.0, 0.5 * (window.0 + window.1))?;
    let sensitivity = full
        .iter()
        .zip(&half)
        .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    if sensitivity > opts.tolerance {
        return Err(Error::UnstableFit {
            sensitivity,
            tolerance: opts.tolerance,
        });
    }
    Ok(CoefficientFit {
        coefficient: curve.values()[0].with_raw(full),
        window,
        sensitivity,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct GoldenTolerances {
    pub r_plus: f64,
    pub beta: f64,
    pub g3: f64,
}

/// Regression record for a Schwarzschild black hole.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct GoldenRecord {
    pub n: usize,
    pub m: f64,
    pub r_plus: f64,
    pub beta: f64,
    pub g3: Vec<f64>,
    pub tolerances: GoldenTolerances,
}
