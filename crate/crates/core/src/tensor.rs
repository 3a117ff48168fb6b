//! Tensor calculus on boundary models.
//!
//! Sign conventions: `δ*X = ½(∇X♭ + (∇X♭)ᵀ) = ½ ℒ_X γ` and `δ` is its formal
//! L² adjoint, `(δτ)_k = −∇^j τ_jk`. Torus derivatives are Fourier-spectral
//! for arbitrary (not necessarily flat) grid metrics; homogeneous models use
//! closed-form block formulas.

use crate::error::{Error, Result};
use crate::field::{OneFormField, ScalarField, SymTensorField, Values, VectorField};
use crate::model::BoundaryModel;
use crate::pointwise::{self, determinant, inverse};
use crate::spectral::Spectral;

/// The boundary metric `γ` of a model.
pub fn metric_of(model: &BoundaryModel) -> SymTensorField {
    match model {
        BoundaryModel::FlatTorus { .. } => {
            let n = model.dim();
            let id: Vec<f64> = (0..n * n).map(|k| if k % (n + 1) == 0 { 1.0 } else { 0.0 }).collect();
            SymTensorField::constant(model, &id).expect("torus model")
        }
        BoundaryModel::RoundSphere { radius, .. } => {
            SymTensorField::from_blocks(model, vec![radius * radius]).expect("sphere blocks")
        }
        BoundaryModel::CircleSphere { sphere_radius, .. } => {
            SymTensorField::from_blocks(model, vec![1.0, sphere_radius * sphere_radius])
                .expect("product blocks")
        }
    }
}

fn same_model(a: &BoundaryModel, b: &BoundaryModel) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ModelMismatch)
    }
}

fn spectral(model: &BoundaryModel) -> Spectral {
    Spectral::for_model(model).expect("grid fields live on tori")
}

/// Derivative arrays of a point-major `n × n` field at every point:
/// returns `dg` laid out `p * n³ + a * n² + ij`.
fn first_derivatives(spec: &Spectral, raw: &[f64], n: usize) -> Vec<f64> {
    let n2 = n * n;
    let grads = spec.gradient(raw, n2);
    let npts = spec.num_points();
    let mut out = vec![0.0; npts * n * n2];
    for (a, ga) in grads.iter().enumerate() {
        for p in 0..npts {
            out[p * n * n2 + a * n2..p * n * n2 + (a + 1) * n2]
                .copy_from_slice(&ga[p * n2..(p + 1) * n2]);
        }
    }
    out
}

/// `(dg, ddg)` at every point, with `ddg` laid out `p * n⁴ + (a n + b) n² + ij`.
pub(crate) fn metric_derivatives(spec: &Spectral, raw: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let n2 = n * n;
    let n3 = n2 * n;
    let npts = spec.num_points();
    let grads = spec.gradient(raw, n2);
    let mut dg = vec![0.0; npts * n3];
    let mut ddg = vec![0.0; npts * n3 * n];
    for (a, ga) in grads.iter().enumerate() {
        for p in 0..npts {
            dg[p * n3 + a * n2..p * n3 + (a + 1) * n2].copy_from_slice(&ga[p * n2..(p + 1) * n2]);
        }
        for b in 0..n {
            let gab = spec.derivative(ga, n2, b);
            for p in 0..npts {
                ddg[p * n3 * n + (a * n + b) * n2..p * n3 * n + (a * n + b + 1) * n2]
                    .copy_from_slice(&gab[p * n2..(p + 1) * n2]);
            }
        }
    }
    (dg, ddg)
}

/// Pointwise `γ`-trace `γ^{ij} τ_ij`.
pub fn trace(gamma: &SymTensorField, tau: &SymTensorField) -> Result<ScalarField> {
    gamma.check_compatible(tau)?;
    let model = gamma.model();
    match (gamma.values(), tau.values()) {
        (Values::Blocks(g), Values::Blocks(t)) => {
            let tr = g
                .iter()
                .zip(t)
                .zip(model.block_multiplicities())
                .map(|((g, t), m)| m as f64 * t / g)
                .sum();
            Ok(ScalarField::new(model, Values::Blocks(vec![tr])))
        }
        _ => {
            let n = model.dim();
            let out = (0..model.num_points())
                .map(|p| {
                    let ginv = inverse(gamma.matrix_at(p), n);
                    pointwise::trace_of_product(&ginv, tau.matrix_at(p), n)
                })
                .collect();
            Ok(ScalarField::new(model, Values::Grid(out)))
        }
    }
}

/// Trace-free part `τ − (tr_γ τ / n) γ`.
pub fn trace_free_part(gamma: &SymTensorField, tau: &SymTensorField) -> Result<SymTensorField> {
    let tr = trace(gamma, tau)?;
    let n = gamma.dim() as f64;
    let trv = tr.raw();
    let m = gamma.dim() * gamma.dim();
    let raw: Vec<f64> = match tau.values() {
        Values::Blocks(t) => t
            .iter()
            .zip(gamma.raw())
            .map(|(t, g)| t - trv[0] / n * g)
            .collect(),
        Values::Grid(t) => t
            .iter()
            .zip(gamma.raw())
            .enumerate()
            .map(|(k, (t, g))| t - trv[k / m] / n * g)
            .collect(),
    };
    Ok(tau.with_raw(raw))
}

/// Divergence `(δτ)_k = −γ^{ij} ∇_i τ_jk`.
pub fn divergence(gamma: &SymTensorField, tau: &SymTensorField) -> Result<OneFormField> {
    gamma.check_compatible(tau)?;
    let model = gamma.model();
    if model.is_homogeneous() {
        // invariant symmetric tensors are divergence free on both homogeneous models
        return Ok(OneFormField::zeros(model));
    }
    let n = model.dim();
    let n2 = n * n;
    let n3 = n2 * n;
    let spec = spectral(model);
    let dg = first_derivatives(&spec, gamma.raw(), n);
    let dt = first_derivatives(&spec, tau.raw(), n);
    let mut out = vec![0.0; model.num_points() * n];
    for p in 0..model.num_points() {
        let ginv = inverse(gamma.matrix_at(p), n);
        let gam = pointwise::christoffel(&ginv, &dg[p * n3..(p + 1) * n3], n);
        let t = tau.matrix_at(p);
        let dtp = &dt[p * n3..(p + 1) * n3];
        for k in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let gij = ginv[i * n + j];
                    if gij == 0.0 {
                        continue;
                    }
                    let mut cov = dtp[i * n2 + j * n + k];
                    for l in 0..n {
                        cov -= gam[l * n2 + i * n + j] * t[l * n + k]
                            + gam[l * n2 + i * n + k] * t[j * n + l];
                    }
                    s += gij * cov;
                }
            }
            out[p * n + k] = -s;
        }
    }
    Ok(OneFormField::new(model, Values::Grid(out)))
}

/// `δ*X = ½ ℒ_X γ`.
pub fn killing_operator(gamma: &SymTensorField, x: &VectorField) -> Result<SymTensorField> {
    same_model(gamma.model(), x.model())?;
    let model = gamma.model();
    if model.is_homogeneous() {
        // homogeneous vector fields are combinations of the Killing basis
        return Ok(SymTensorField::zeros(model));
    }
    let n = model.dim();
    let n2 = n * n;
    let n3 = n2 * n;
    let spec = spectral(model);
    let dg = first_derivatives(&spec, gamma.raw(), n);
    let npts = model.num_points();
    let mut lowered = vec![0.0; npts * n];
    for p in 0..npts {
        let g = gamma.matrix_at(p);
        let v = x.vector_at(p);
        for j in 0..n {
            lowered[p * n + j] = (0..n).map(|k| g[j * n + k] * v[k]).sum();
        }
    }
    let dx = spec.gradient(&lowered, n);
    let mut out = vec![0.0; npts * n2];
    for p in 0..npts {
        let ginv = inverse(gamma.matrix_at(p), n);
        let gam = pointwise::christoffel(&ginv, &dg[p * n3..(p + 1) * n3], n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.5 * (dx[i][p * n + j] + dx[j][p * n + i]);
                for l in 0..n {
                    s -= gam[l * n2 + i * n + j] * lowered[p * n + l];
                }
                out[p * n2 + i * n + j] = s;
            }
        }
    }
    SymTensorField::from_grid(model, out)
}

/// Coordinate Lie derivative `ℒ_X τ`.
pub fn lie_derivative(x: &VectorField, tau: &SymTensorField) -> Result<SymTensorField> {
    same_model(x.model(), tau.model())?;
    let model = tau.model();
    if model.is_homogeneous() {
        return Ok(SymTensorField::zeros(model));
    }
    let n = model.dim();
    let n2 = n * n;
    let spec = spectral(model);
    let dt = spec.gradient(tau.raw(), n2);
    let dx = spec.gradient(x.raw(), n);
    let npts = model.num_points();
    let mut out = vec![0.0; npts * n2];
    for p in 0..npts {
        let v = x.vector_at(p);
        let t = tau.matrix_at(p);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += v[k] * dt[k][p * n2 + i * n + j]
                        + t[k * n + j] * dx[i][p * n + k]
                        + t[i * n + k] * dx[j][p * n + k];
                }
                out[p * n2 + i * n + j] = s;
            }
        }
    }
    SymTensorField::from_grid(model, out)
}

fn homogeneous_volume(gamma: &SymTensorField) -> f64 {
    let model = gamma.model();
    let b = gamma.blocks().expect("blocks");
    model.reference_volume()
        * b.iter()
            .zip(model.block_multiplicities())
            .map(|(g, m)| g.powf(m as f64 / 2.0))
            .product::<f64>()
}

/// Riemannian volume of `(∂M, γ)`.
pub fn volume(gamma: &SymTensorField) -> f64 {
    let model = gamma.model();
    if model.is_homogeneous() {
        return homogeneous_volume(gamma);
    }
    let n = model.dim();
    let npts = model.num_points();
    let mean = (0..npts)
        .map(|p| determinant(gamma.matrix_at(p), n).sqrt())
        .sum::<f64>()
        / npts as f64;
    mean * model.reference_volume()
}

/// `∫ ⟨τ, σ⟩_γ dV_γ`.
pub fn l2_pair(gamma: &SymTensorField, tau: &SymTensorField, sigma: &SymTensorField) -> Result<f64> {
    gamma.check_compatible(tau)?;
    gamma.check_compatible(sigma)?;
    let model = gamma.model();
    match (gamma.values(), tau.values(), sigma.values()) {
        (Values::Blocks(g), Values::Blocks(t), Values::Blocks(s)) => {
            let contraction: f64 = g
                .iter()
                .zip(t)
                .zip(s)
                .zip(model.block_multiplicities())
                .map(|(((g, t), s), m)| m as f64 * t * s / (g * g))
                .sum();
            Ok(contraction * homogeneous_volume(gamma))
        }
        _ => {
            let n = model.dim();
            let npts = model.num_points();
            let mean = (0..npts)
                .map(|p| {
                    let g = gamma.matrix_at(p);
                    let ginv = inverse(g, n);
                    pointwise::inner(&ginv, tau.matrix_at(p), sigma.matrix_at(p), n)
                        * determinant(g, n).sqrt()
                })
                .sum::<f64>()
                / npts as f64;
            Ok(mean * model.reference_volume())
        }
    }
}

pub fn l2_norm(gamma: &SymTensorField, tau: &SymTensorField) -> Result<f64> {
    Ok(l2_pair(gamma, tau, tau)?.max(0.0).sqrt())
}

/// Largest pointwise `γ`-norm `|τ|_γ`.
pub fn sup_norm(gamma: &SymTensorField, tau: &SymTensorField) -> Result<f64> {
    gamma.check_compatible(tau)?;
    let model = gamma.model();
    match (gamma.values(), tau.values()) {
        (Values::Blocks(g), Values::Blocks(t)) => Ok(g
            .iter()
            .zip(t)
            .zip(model.block_multiplicities())
            .map(|((g, t), m)| m as f64 * (t / g).powi(2))
            .sum::<f64>()
            .sqrt()),
        _ => {
            let n = model.dim();
            Ok((0..model.num_points())
                .map(|p| {
                    let ginv = inverse(gamma.matrix_at(p), n);
                    let t = tau.matrix_at(p);
                    pointwise::inner(&ginv, t, t, n).max(0.0).sqrt()
                })
                .fold(0.0, f64::max))
        }
    }
}

/// Largest pointwise `γ`-norm of a one-form.
pub fn oneform_sup_norm(gamma: &SymTensorField, omega: &OneFormField) -> Result<f64> {
    same_model(gamma.model(), omega.model())?;
    let model = gamma.model();
    match omega.values() {
        Values::Blocks(w) => {
            // only the circle coefficient exists: |w dθ|² = w² / γ_circle
            let g = gamma.blocks().unwrap_or(&[1.0]);
            Ok(w.iter().map(|w| w * w / g[0]).sum::<f64>().sqrt())
        }
        Values::Grid(w) => {
            let n = model.dim();
            Ok((0..model.num_points())
                .map(|p| {
                    let ginv = inverse(gamma.matrix_at(p), n);
                    let v = &w[p * n..(p + 1) * n];
                    let mut s = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            s += ginv[i * n + j] * v[i] * v[j];
                        }
                    }
                    s.max(0.0).sqrt()
                })
                .fold(0.0, f64::max))
        }
    }
}

/// `∫ ω(X) dV_γ`.
pub fn pair_vector_oneform(gamma: &SymTensorField, x: &VectorField, omega: &OneFormField) -> Result<f64> {
    same_model(gamma.model(), x.model())?;
    same_model(gamma.model(), omega.model())?;
    let model = gamma.model();
    match model {
        BoundaryModel::RoundSphere { .. } => Ok(0.0),
        BoundaryModel::CircleSphere { .. } => {
            Ok(x.raw()[0] * omega.raw()[0] * homogeneous_volume(gamma))
        }
        BoundaryModel::FlatTorus { .. } => {
            let n = model.dim();
            let npts = model.num_points();
            let w = omega.raw();
            let mean = (0..npts)
                .map(|p| {
                    let v = x.vector_at(p);
                    let c: f64 = (0..n).map(|k| v[k] * w[p * n + k]).sum();
                    c * determinant(gamma.matrix_at(p), n).sqrt()
                })
                .sum::<f64>()
                / npts as f64;
            Ok(mean * model.reference_volume())
        }
    }
}

/// `τ(X)_i = τ_ij X^j`.
pub fn contract(tau: &SymTensorField, x: &VectorField) -> Result<OneFormField> {
    same_model(tau.model(), x.model())?;
    let model = tau.model();
    if model.is_homogeneous() {
        return Ok(match model {
            BoundaryModel::CircleSphere { .. } => {
                let b = tau.blocks().expect("blocks");
                OneFormField::new(model, Values::Blocks(vec![b[0] * x.raw()[0]]))
            }
            _ => OneFormField::zeros(model),
        });
    }
    let n = model.dim();
    let mut out = vec![0.0; model.num_points() * n];
    for p in 0..model.num_points() {
        let t = tau.matrix_at(p);
        let v = x.vector_at(p);
        for i in 0..n {
            out[p * n + i] = (0..n).map(|j| t[i * n + j] * v[j]).sum();
        }
    }
    Ok(OneFormField::new(model, Values::Grid(out)))
}

/// Divergence of a one-form, `δω = −(1/√γ) ∂_i(√γ γ^{ij} ω_j)`.
pub fn divergence_oneform(gamma: &SymTensorField, omega: &OneFormField) -> Result<ScalarField> {
    same_model(gamma.model(), omega.model())?;
    let model = gamma.model();
    if model.is_homogeneous() {
        return Ok(ScalarField::new(model, Values::Blocks(vec![0.0])));
    }
    let n = model.dim();
    let npts = model.num_points();
    let spec = spectral(model);
    let w = omega.raw();
    let mut flux = vec![0.0; npts * n];
    let mut vol = vec![0.0; npts];
    for p in 0..npts {
        let g = gamma.matrix_at(p);
        let ginv = inverse(g, n);
        vol[p] = determinant(g, n).sqrt();
        for i in 0..n {
            flux[p * n + i] = vol[p] * (0..n).map(|j| ginv[i * n + j] * w[p * n + j]).sum::<f64>();
        }
    }
    let mut out = vec![0.0; npts];
    for i in 0..n {
        let d = spec.derivative(&flux, n, i);
        for p in 0..npts {
            out[p] -= d[p * n + i] / vol[p];
        }
    }
    Ok(ScalarField::new(model, Values::Grid(out)))
}

/// Ricci tensor of a boundary metric.
pub fn ricci(gamma: &SymTensorField) -> Result<SymTensorField> {
    let model = gamma.model();
    if model.is_homogeneous() {
        return SymTensorField::from_blocks(model, model.reference_ricci());
    }
    let n = model.dim();
    let n2 = n * n;
    let n3 = n2 * n;
    let spec = spectral(model);
    let (dg, ddg) = metric_derivatives(&spec, gamma.raw(), n);
    let mut out = Vec::with_capacity(model.num_points() * n2);
    for p in 0..model.num_points() {
        out.extend(pointwise::ricci(
            gamma.matrix_at(p),
            &dg[p * n3..(p + 1) * n3],
            &ddg[p * n3 * n..(p + 1) * n3 * n],
            n,
        ));
    }
    SymTensorField::from_grid(model, out)
}

pub fn scalar_curvature(gamma: &SymTensorField) -> Result<ScalarField> {
    trace(gamma, &ricci(gamma)?)
}

/// Result of the finite-difference linearization of the divergence.
#[derive(Debug, Clone)]
pub struct LinearizedDivergence {
    /// Richardson-extrapolated `δ′τ`.
    pub value: OneFormField,
    /// Largest difference between the central differences at steps `ε` and `ε/2`.
    pub discrepancy: f64,
    /// Step `ε` in the metric-path parameter.
    pub step: f64,
}

pub const LINEARIZATION_STEP: f64 = 1e-5;
pub const RICHARDSON_TOLERANCE: f64 = 1e-6;

/// `δ′τ = d/ds|₀ δ_{γ+sh} τ`.
pub fn divergence_linearized(
    gamma: &SymTensorField,
    h: &SymTensorField,
    tau: &SymTensorField,
) -> Result<OneFormField> {
    Ok(divergence_linearized_with(gamma, h, tau, LINEARIZATION_STEP, RICHARDSON_TOLERANCE)?.value)
}

/// Central differences at `±ε` and `±ε/2` (ε relative to the metric scale),
/// combined by Richardson extrapolation. Fails when the two central
/// differences disagree by more than `tolerance` relative to their size.
pub fn divergence_linearized_with(
    gamma: &SymTensorField,
    h: &SymTensorField,
    tau: &SymTensorField,
    relative_step: f64,
    tolerance: f64,
) -> Result<LinearizedDivergence> {
    gamma.check_compatible(h)?;
    gamma.check_compatible(tau)?;
    let hmax = h.max_abs();
    if hmax == 0.0 {
        return Ok(LinearizedDivergence {
            value: OneFormField::zeros(gamma.model()),
            discrepancy: 0.0,
            step: relative_step,
        });
    }
    let eps = relative_step * gamma.max_abs() / hmax;
    let div_at = |s: f64| -> Result<OneFormField> { divergence(&gamma.axpy(s, h)?, tau) };
    let central = |e: f64| -> Result<OneFormField> {
        let plus = div_at(e)?;
        let minus = div_at(-e)?;
        Ok(plus.sub(&minus)?.scale(0.5 / e))
    };
    let coarse = central(eps)?;
    let fine = central(0.5 * eps)?;
    let discrepancy = coarse.max_abs_diff(&fine)?;
    let scale = fine.max_abs().max(coarse.max_abs());
    if discrepancy > tolerance * scale.max(1e-300) && discrepancy > 1e-12 {
        return Err(Error::Richardson {
            discrepancy,
            tolerance: tolerance * scale,
        });
    }
    // D(ε/2) + (D(ε/2) − D(ε)) / 3
    let value = fine.scale(4.0 / 3.0).axpy(-1.0 / 3.0, &coarse)?;
    Ok(LinearizedDivergence {
        value,
        discrepancy,
        step: eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn torus(res: usize) -> BoundaryModel {
        BoundaryModel::standard_torus(3, res).unwrap()
    }

    fn example_tensor(m: &BoundaryModel, f: impl Fn(f64) -> f64) -> SymTensorField {
        SymTensorField::from_fn(m, |x| {
            let v = f(x[0]);
            vec![0.0, 0.0, 0.0, 0.0, -v, 0.0, 0.0, 0.0, v]
        })
        .unwrap()
    }

    #[test]
    fn metric_of_each_model() {
        let t = metric_of(&torus(8));
        assert_eq!(t.matrix_at(5), &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let s = metric_of(&BoundaryModel::round_sphere(3, 1.0).unwrap());
        assert_eq!(s.blocks().unwrap(), &[1.0]);
        let cs = metric_of(&BoundaryModel::circle_sphere(3, PI, 1.0).unwrap());
        assert_eq!(cs.blocks().unwrap(), &[1.0, 1.0]);
    }

    #[test]
    fn trace_examples() {
        let m = torus(8);
        let g = metric_of(&m);
        let tr = trace(&g, &g).unwrap();
        assert!(tr.raw().iter().all(|v| (v - 3.0).abs() < 1e-15));
        let e = example_tensor(&m, |x| x.sin() + 0.3);
        assert!(trace(&g, &e).unwrap().raw().iter().all(|v| v.abs() < 1e-15));

        let s = BoundaryModel::round_sphere(3, 1.0).unwrap();
        let c = SymTensorField::from_blocks(&s, vec![0.7]).unwrap();
        assert!((trace(&metric_of(&s), &c).unwrap().raw()[0] - 2.1).abs() < 1e-15);
    }

    #[test]
    fn divergence_examples() {
        let m = torus(16);
        let g = metric_of(&m);
        let c = SymTensorField::constant(&m, &[1.0, 0.2, 0.0, 0.2, 2.0, 0.1, 0.0, 0.1, 0.5]).unwrap();
        assert!(divergence(&g, &c).unwrap().max_abs() < 1e-13);
        let e = example_tensor(&m, |x| x.sin());
        assert!(divergence(&g, &e).unwrap().max_abs() < 1e-13);

        let s = SymTensorField::from_fn(&m, |x| {
            vec![x[0].sin(), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        })
        .unwrap();
        let d = divergence(&g, &s).unwrap();
        for p in 0..m.num_points() {
            let x = m.point_coords(p);
            assert!((d.raw()[3 * p] + x[0].cos()).abs() < 1e-12);
            assert!(d.raw()[3 * p + 1].abs() < 1e-12);
        }
    }

    #[test]
    fn killing_examples() {
        let m = torus(16);
        let g = metric_of(&m);
        let c = VectorField::constant(&m, &[0.3, -1.0, 2.0]).unwrap();
        assert_eq!(killing_operator(&g, &c).unwrap().max_abs(), 0.0);
        let x = VectorField::from_fn(&m, |x| vec![0.0, x[0].sin(), 0.0]).unwrap();
        let k = killing_operator(&g, &x).unwrap();
        for p in 0..m.num_points() {
            let th = m.point_coords(p)[0];
            let a = k.matrix_at(p);
            assert!((a[1] - 0.5 * th.cos()).abs() < 1e-12);
            assert!((a[3] - 0.5 * th.cos()).abs() < 1e-12);
            assert!(a[0].abs() < 1e-12 && a[4].abs() < 1e-12);
        }
        let cs = BoundaryModel::circle_sphere(3, 2.0, 1.0).unwrap();
        let rot = VectorField::killing_combination(&cs, vec![1.0]).unwrap();
        assert_eq!(killing_operator(&metric_of(&cs), &rot).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn lie_derivative_examples() {
        let m = torus(16);
        let x = VectorField::constant(&m, &[1.0, 0.0, 0.0]).unwrap();
        let tau = example_tensor(&m, f64::sin);
        let l = lie_derivative(&x, &tau).unwrap();
        let expected = example_tensor(&m, f64::cos);
        assert!(l.max_abs_diff(&expected).unwrap() < 1e-12);
        let c = SymTensorField::constant(&m, &[1.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(lie_derivative(&x, &c).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn l2_pair_examples() {
        let m = torus(8);
        let g = metric_of(&m);
        let v = l2_pair(&g, &g, &g).unwrap();
        assert!((v - 3.0 * (2.0 * PI).powi(3)).abs() < 1e-10);
        let e = example_tensor(&m, f64::cos);
        let v = l2_pair(&g, &e, &e).unwrap();
        assert!((v - (2.0 * PI).powi(3)).abs() < 1e-10);

        let s = BoundaryModel::round_sphere(3, 2.0).unwrap();
        let gs = metric_of(&s);
        let vol = volume(&gs);
        assert!((vol - 2.0 * PI * PI * 8.0).abs() < 1e-11);
        assert!((l2_pair(&gs, &gs, &gs).unwrap() - 3.0 * vol).abs() < 1e-10);
    }

    #[test]
    fn linearized_divergence_of_canonical_instance() {
        // oracle (symbolic differentiation): δ′τ = −sin²θ¹ dθ¹
        let m = torus(16);
        let g = metric_of(&m);
        let tau = example_tensor(&m, f64::sin);
        let h = example_tensor(&m, f64::cos);
        let d = divergence_linearized(&g, &h, &tau).unwrap();
        for p in 0..m.num_points() {
            let th = m.point_coords(p)[0];
            assert!((d.raw()[3 * p] + th.sin().powi(2)).abs() < 1e-9);
            assert!(d.raw()[3 * p + 1].abs() < 1e-9);
            assert!(d.raw()[3 * p + 2].abs() < 1e-9);
        }
    }

    #[test]
    fn linearized_divergence_trivial_cases() {
        let m = torus(8);
        let g = metric_of(&m);
        let tau = SymTensorField::constant(&m, &[1.0, 0.1, 0.0, 0.1, 2.0, 0.0, 0.0, 0.0, 3.0]).unwrap();
        let zero = SymTensorField::zeros(&m);
        assert_eq!(divergence_linearized(&g, &zero, &tau).unwrap().max_abs(), 0.0);
        let conformal = g.scale(0.4);
        assert!(divergence_linearized(&g, &conformal, &tau).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn ricci_of_flat_and_homogeneous_metrics() {
        let m = torus(8);
        assert!(ricci(&metric_of(&m)).unwrap().max_abs() < 1e-14);
        let cs = BoundaryModel::circle_sphere(4, 1.0, 2.0).unwrap();
        let r = scalar_curvature(&metric_of(&cs)).unwrap();
        // S³ of radius 2: R = 6 / 4
        assert!((r.raw()[0] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn ricci_of_conformally_flat_torus_metric() {
        // g = e^{2φ} δ with φ = a sin θ¹ on T³:
        // Ric = −(n−2)(∇²φ − dφ⊗dφ) − (Δφ + (n−2)|dφ|²) δ
        let a = 0.2;
        let m = torus(32);
        let g = SymTensorField::from_fn(&m, |x| {
            let c = (2.0 * a * x[0].sin()).exp();
            vec![c, 0.0, 0.0, 0.0, c, 0.0, 0.0, 0.0, c]
        })
        .unwrap();
        let r = ricci(&g).unwrap();
        for p in 0..m.num_points() {
            let th = m.point_coords(p)[0];
            let d1 = a * th.cos();
            let d11 = -a * th.sin();
            let r11 = -(d11 - d1 * d1) - (d11 + d1 * d1);
            let r22 = -(d11 + d1 * d1);
            let q = r.matrix_at(p);
            assert!((q[0] - r11).abs() < 1e-10, "{} vs {}", q[0], r11);
            assert!((q[4] - r22).abs() < 1e-10);
            assert!((q[8] - r22).abs() < 1e-10);
        }
    }
}
