//! Boundary constraints on `(γ, τ_(n))`, the integral identity for Killing
//! fields of `γ`, and the Killing-extension criterion.
//!
//! For a Killing field `X` of `γ`, a divergence-free `τ`, and any variation
//! `h`, differentiating `∫ δ_{γ+sh}(τ(X)) dV_{γ+sh} = 0` gives
//!
//! ```text
//! ∫ ⟨ℒ_X τ, h⟩ dV = −2 ∫ ⟨δ′τ, X⟩ dV,      δ′τ = d/ds|₀ δ_{γ+sh} τ,
//! ```
//!
//! so the linearized divergence can only be exact when the right-hand side
//! vanishes along every Killing field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymTensorField, Values, VectorField};
use crate::model::BoundaryModel;
use crate::pointwise::determinant;
use crate::series::FGSeries;
use crate::tensor::{self, metric_of};

/// Largest `|δ*X|_γ` accepted for a Killing field.
pub const KILLING_TOLERANCE: f64 = 1e-10;
/// Largest `|δτ|_γ` (relative to `max(1, |τ|)`) accepted as divergence free.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-8;
/// Relative residual accepted for the integral identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ConstraintPair {
    pub gamma: SymTensorField,
    pub tau_n: SymTensorField,
}

impl ConstraintPair {
    pub fn new(gamma: SymTensorField, tau_n: SymTensorField) -> Result<Self> {
        gamma.check_compatible(&tau_n)?;
        Ok(Self { gamma, tau_n })
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct MembershipReport {
    /// Sup `γ`-norm of `δτ_(n)`.
    pub divergence: f64,
    /// Sup of `|tr_γ τ_(n)|`.
    pub trace: f64,
    /// Set for even `n`, where only the divergence statement is meaningful.
    pub advisory: bool,
}

impl MembershipReport {
    pub fn is_member(&self, tol: f64) -> bool {
        self.divergence <= tol && (self.advisory || self.trace <= tol)
    }
}

pub fn check_membership(pair: &ConstraintPair) -> Result<MembershipReport> {
    let div = tensor::divergence(&pair.gamma, &pair.tau_n)?;
    Ok(MembershipReport {
        divergence: tensor::oneform_sup_norm(&pair.gamma, &div)?,
        trace: tensor::trace(&pair.gamma, &pair.tau_n)?.max_abs(),
        advisory: pair.gamma.dim().is_multiple_of(2),
    })
}

/// `f(θ¹) (−(n−2)(dθ²)² + (dθ³)² + ⋯ + (dθⁿ)²)` on a flat torus.
pub fn example53<F: Fn(f64) -> f64>(model: &BoundaryModel, f: F) -> Result<SymTensorField> {
    let n = model.dim();
    SymTensorField::from_fn(model, |x| {
        let v = f(x[0]);
        let mut m = vec![0.0; n * n];
        m[n + 1] = -(n as f64 - 2.0) * v;
        for k in 2..n {
            m[k * n + k] = v;
        }
        m
    })
}

fn require_killing(gamma: &SymTensorField, x: &VectorField) -> Result<()> {
    let k = tensor::sup_norm(gamma, &tensor::killing_operator(gamma, x)?)?;
    if k > KILLING_TOLERANCE {
        return Err(Error::NotKilling(k));
    }
    Ok(())
}

fn require_divergence_free(gamma: &SymTensorField, tau: &SymTensorField) -> Result<()> {
    let d = tensor::oneform_sup_norm(gamma, &tensor::divergence(gamma, tau)?)?;
    if d > DIVERGENCE_TOLERANCE * tau.max_abs().max(1.0) {
        return Err(Error::NotDivergenceFree(d));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct IdentityReport {
    /// `∫ ⟨ℒ_X τ, h⟩`.
    pub lhs: f64,
    /// `−2 ∫ ⟨δ′τ, X⟩`.
    pub rhs: f64,
    /// `|lhs − rhs| / (1 + |lhs|)`.
    pub residual: f64,
    /// `Vol · sup|X| · sup|τ| · sup|h|`, the natural size of either side.
    pub scale: f64,
}

impl IdentityReport {
    pub fn relative_error(&self) -> f64 {
        let d = (self.lhs - self.rhs).abs();
        if self.lhs == 0.0 {
            d
        } else {
            d / self.lhs.abs()
        }
    }

    /// `|lhs − rhs| / max(|lhs|, scale)`, meaningful when `lhs` vanishes.
    pub fn normalized_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(self.scale).max(f64::MIN_POSITIVE)
    }
}

/// Evaluates both sides of the identity independently.
pub fn verify_identity(
    gamma: &SymTensorField,
    x: &VectorField,
    tau: &SymTensorField,
    h: &SymTensorField,
) -> Result<IdentityReport> {
    require_killing(gamma, x)?;
    require_divergence_free(gamma, tau)?;
    let lhs = tensor::l2_pair(gamma, &tensor::lie_derivative(x, tau)?, h)?;
    let dprime = tensor::divergence_linearized(gamma, h, tau)?;
    let rhs = -2.0 * tensor::pair_vector_oneform(gamma, x, &dprime)?;
    Ok(IdentityReport {
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / (1.0 + lhs.abs()),
        scale: tensor::volume(gamma) * x.max_abs() * tau.max_abs() * h.max_abs(),
    })
}

/// The hard-coded Killing basis: coordinate translations on a flat torus and
/// the circle rotation on `S¹ × S^{n−1}`.
pub fn killing_basis(model: &BoundaryModel) -> Result<Vec<VectorField>> {
    match model {
        BoundaryModel::FlatTorus { .. } => {
            let n = model.dim();
            (0..n)
                .map(|a| {
                    let mut e = vec![0.0; n];
                    e[a] = 1.0;
                    VectorField::constant(model, &e)
                })
                .collect()
        }
        BoundaryModel::CircleSphere { .. } => {
            Ok(vec![VectorField::killing_combination(model, vec![1.0])?])
        }
        BoundaryModel::RoundSphere { .. } => Err(Error::NoKillingBasis),
    }
}

/// Components `∫ ⟨δ′τ, X_a⟩` of the linearized divergence along the Killing
/// basis; a nonzero component means `δ′τ` misses the image of `δ`.
pub fn obstruction_projection(
    gamma: &SymTensorField,
    tau: &SymTensorField,
    h: &SymTensorField,
) -> Result<Vec<f64>> {
    let basis = killing_basis(gamma.model())?;
    let dprime = tensor::divergence_linearized(gamma, h, tau)?;
    basis
        .iter()
        .map(|x| tensor::pair_vector_oneform(gamma, x, &dprime))
        .collect()
}

/// `‖ℒ_X g_(n)‖_{L²(γ)}`; zero certifies that `X` extends to a Killing field
/// of the bulk metric.
pub fn killing_extension_criterion(
    gamma: &SymTensorField,
    x: &VectorField,
    g_n: &SymTensorField,
) -> Result<f64> {
    require_killing(gamma, x)?;
    tensor::l2_norm(gamma, &tensor::lie_derivative(x, g_n)?)
}

/// `‖ℒ_X g_t‖_{L²(γ)}` along a series, with `X` extended constantly in `t`.
pub fn killing_extension_witness(
    series: &FGSeries,
    x: &VectorField,
    ts: &[f64],
) -> Result<Vec<f64>> {
    require_killing(series.gamma(), x)?;
    ts.iter()
        .map(|&t| {
            let (g, _) = series.eval(t)?;
            tensor::l2_norm(series.gamma(), &tensor::lie_derivative(x, &g)?)
        })
        .collect()
}

fn integral(gamma: &SymTensorField, f: &ScalarField) -> f64 {
    let model = gamma.model();
    if model.is_homogeneous() {
        return f.raw()[0] * tensor::volume(gamma);
    }
    let n = model.dim();
    let sum: f64 = f
        .raw()
        .iter()
        .enumerate()
        .map(|(p, v)| v * determinant(gamma.matrix_at(p), n).sqrt())
        .sum();
    sum / model.num_points() as f64 * model.reference_volume()
}

/// `∫ δ_{γ+sh}(τ(X)) dV_{γ+sh}` for each `s`; all vanish by the divergence
/// theorem.
pub fn stokes_check(
    gamma: &SymTensorField,
    tau: &SymTensorField,
    x: &VectorField,
    h: &SymTensorField,
    s_values: &[f64],
) -> Result<Vec<f64>> {
    let omega = tensor::contract(tau, x)?;
    s_values
        .iter()
        .map(|&s| {
            let g = gamma.axpy(s, h)?;
            Ok(integral(&g, &tensor::divergence_oneform(&g, &omega)?))
        })
        .collect()
}

/// SHA-256 of the little-endian bytes of a field's values.
pub fn field_hash(values: &Values) -> String {
    let mut hasher = Sha256::new();
    for v in values.as_slice() {
        hasher.update(v.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityTolerances {
    pub killing: f64,
    pub divergence: f64,
    pub identity: f64,
    pub linearization_step: f64,
    pub richardson: f64,
}

impl Default for IdentityTolerances {
    fn default() -> Self {
        Self {
            killing: KILLING_TOLERANCE,
            divergence: DIVERGENCE_TOLERANCE,
            identity: IDENTITY_TOLERANCE,
            linearization_step: tensor::LINEARIZATION_STEP,
            richardson: tensor::RICHARDSON_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputHashes {
    pub gamma: String,
    pub x: String,
    pub tau: String,
    pub h: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityDocument {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub relative_error: f64,
    pub tolerances: IdentityTolerances,
    pub inputs: InputHashes,
}

impl IdentityDocument {
    pub fn new(
        report: &IdentityReport,
        gamma: &SymTensorField,
        x: &VectorField,
        tau: &SymTensorField,
        h: &SymTensorField,
    ) -> Self {
        Self {
            lhs: report.lhs,
            rhs: report.rhs,
            residual: report.residual,
            relative_error: report.relative_error(),
            tolerances: IdentityTolerances::default(),
            inputs: InputHashes {
                gamma: field_hash(gamma.values()),
                x: field_hash(x.values()),
                tau: field_hash(tau.values()),
                h: field_hash(h.values()),
            },
        }
    }
}

/// A randomized input for the integral identity on a flat torus.
#[derive(Debug, Clone)]
pub struct IdentityInstance {
    pub gamma: SymTensorField,
    pub x: VectorField,
    pub tau: SymTensorField,
    pub h: SymTensorField,
}

/// Random translation `X`, random transverse-traceless `τ` built from
/// diagonal trace-free blocks modulated along one axis each, and a random
/// low-frequency symmetric `h`.
pub fn random_identity_instance(model: &BoundaryModel, seed: u64) -> Result<IdentityInstance> {
    if !model.is_torus() {
        return Err(Error::Representation(
            "randomized identity instances live on a flat torus".into(),
        ));
    }
    let n = model.dim();
    let periods = match model {
        BoundaryModel::FlatTorus { periods, .. } => periods.clone(),
        _ => unreachable!(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x = VectorField::constant(model, &xs)?;

    struct Mode {
        axis: usize,
        freq: f64,
        phase: f64,
        diag: Vec<f64>,
    }
    let modes: Vec<Mode> = (0..3)
        .map(|_| {
            let axis = rng.gen_range(0..n);
            let mut diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            diag[axis] = 0.0;
            let mean = diag.iter().sum::<f64>() / (n - 1) as f64;
            for (k, d) in diag.iter_mut().enumerate() {
                if k != axis {
                    *d -= mean;
                }
            }
            Mode {
                axis,
                freq: rng.gen_range(1..=2) as f64,
                phase: rng.gen_range(0.0..std::f64::consts::TAU),
                diag,
            }
        })
        .collect();
    let tau = SymTensorField::from_fn(model, |p| {
        let mut m = vec![0.0; n * n];
        for mode in &modes {
            let k = std::f64::consts::TAU / periods[mode.axis] * mode.freq;
            let f = (k * p[mode.axis] + mode.phase).sin();
            for i in 0..n {
                m[i * n + i] += f * mode.diag[i];
            }
        }
        m
    })?;

    let coeffs: Vec<(usize, f64, f64, f64)> = (0..n * n)
        .map(|_| {
            (
                rng.gen_range(0..n),
                rng.gen_range(0..=2) as f64,
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(-0.5..0.5),
            )
        })
        .collect();
    let h = SymTensorField::from_fn(model, |p| {
        coeffs
            .iter()
            .map(|&(axis, freq, phase, amp)| {
                let k = std::f64::consts::TAU / periods[axis] * freq;
                amp * (k * p[axis] + phase).cos()
            })
            .collect()
    })?;
    Ok(IdentityInstance {
        gamma: metric_of(model),
        x,
        tau,
        h,
    })
}
