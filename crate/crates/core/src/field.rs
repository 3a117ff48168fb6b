//! Field containers on boundary models.
//!
//! Grid fields store coordinate components point-major: the full `n × n`
//! matrix of a symmetric tensor at point `p` occupies
//! `values[p * n * n..(p + 1) * n * n]`. Homogeneous fields store block
//! coefficients (tensors), Killing-basis coefficients (vectors) or invariant
//! coefficients (one-forms, scalars).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BoundaryModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr", content = "values")]
pub enum Values {
    Grid(Vec<f64>),
    Blocks(Vec<f64>),
}

impl Values {
    pub fn as_slice(&self) -> &[f64] {
        match self {
            Values::Grid(v) | Values::Blocks(v) => v,
        }
    }

    fn as_mut_slice(&mut self) -> &mut [f64] {
        match self {
            Values::Grid(v) | Values::Blocks(v) => v,
        }
    }

    fn same_shape(&self, other: &Values) -> bool {
        match (self, other) {
            (Values::Grid(a), Values::Grid(b)) | (Values::Blocks(a), Values::Blocks(b)) => {
                a.len() == b.len()
            }
            _ => false,
        }
    }
}

macro_rules! linear_field {
    ($name:ident) => {
        impl $name {
            pub fn model(&self) -> &BoundaryModel {
                &self.model
            }

            pub fn values(&self) -> &Values {
                &self.values
            }

            pub fn raw(&self) -> &[f64] {
                self.values.as_slice()
            }

            pub fn dim(&self) -> usize {
                self.model.dim()
            }

            pub fn is_grid(&self) -> bool {
                matches!(self.values, Values::Grid(_))
            }

            pub fn zeros_like(&self) -> Self {
                let mut out = self.clone();
                out.values.as_mut_slice().iter_mut().for_each(|x| *x = 0.0);
                out
            }

            pub(crate) fn with_raw(&self, raw: Vec<f64>) -> Self {
                let values = match self.values {
                    Values::Grid(_) => Values::Grid(raw),
                    Values::Blocks(_) => Values::Blocks(raw),
                };
                Self {
                    model: self.model.clone(),
                    values,
                }
            }

            pub fn check_compatible(&self, other: &Self) -> Result<()> {
                if self.model != other.model || !self.values.same_shape(&other.values) {
                    return Err(Error::ModelMismatch);
                }
                Ok(())
            }

            pub fn scale(&self, c: f64) -> Self {
                self.with_raw(self.raw().iter().map(|x| c * x).collect())
            }

            /// `self + c * other`.
            pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
                self.check_compatible(other)?;
                Ok(self.with_raw(
                    self.raw()
                        .iter()
                        .zip(other.raw())
                        .map(|(a, b)| a + c * b)
                        .collect(),
                ))
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.axpy(1.0, other)
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.axpy(-1.0, other)
            }

            pub fn max_abs(&self) -> f64 {
                self.raw().iter().fold(0.0, |m, x| m.max(x.abs()))
            }

            pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
                self.check_compatible(other)?;
                Ok(self
                    .raw()
                    .iter()
                    .zip(other.raw())
                    .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
            }
        }
    };
}

/// Symmetric 2-tensor on a boundary model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTensorField {
    model: BoundaryModel,
    values: Values,
}

/// Vector field. On homogeneous models the coefficients refer to the
/// model's Killing basis (see [`BoundaryModel::killing_dim`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    model: BoundaryModel,
    values: Values,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneFormField {
    model: BoundaryModel,
    values: Values,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    model: BoundaryModel,
    values: Values,
}

linear_field!(SymTensorField);
linear_field!(VectorField);
linear_field!(OneFormField);
linear_field!(ScalarField);

impl SymTensorField {
    /// Grid tensor from a function of the coordinates returning a row-major `n × n` matrix.
    pub fn from_fn<F>(model: &BoundaryModel, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        require_torus(model)?;
        let n = model.dim();
        let mut raw = Vec::with_capacity(model.num_points() * n * n);
        for p in 0..model.num_points() {
            let m = f(&model.point_coords(p));
            if m.len() != n * n {
                return Err(Error::InvalidArgument(format!(
                    "expected {} matrix entries, got {}",
                    n * n,
                    m.len()
                )));
            }
            for i in 0..n {
                for j in 0..n {
                    raw.push(0.5 * (m[i * n + j] + m[j * n + i]));
                }
            }
        }
        Ok(Self {
            model: model.clone(),
            values: Values::Grid(raw),
        })
    }

    /// Spatially constant grid tensor.
    pub fn constant(model: &BoundaryModel, matrix: &[f64]) -> Result<Self> {
        let m = matrix.to_vec();
        Self::from_fn(model, |_| m.clone())
    }

    pub fn from_grid(model: &BoundaryModel, raw: Vec<f64>) -> Result<Self> {
        require_torus(model)?;
        let n = model.dim();
        if raw.len() != model.num_points() * n * n {
            return Err(Error::InvalidArgument("grid tensor has wrong length".into()));
        }
        Ok(Self {
            model: model.clone(),
            values: Values::Grid(raw),
        })
    }

    pub fn from_blocks(model: &BoundaryModel, blocks: Vec<f64>) -> Result<Self> {
        if model.is_torus() {
            return Err(Error::Representation(
                "block coefficients require a homogeneous model".into(),
            ));
        }
        if blocks.len() != model.num_blocks() {
            return Err(Error::InvalidArgument(format!(
                "expected {} block coefficients, got {}",
                model.num_blocks(),
                blocks.len()
            )));
        }
        Ok(Self {
            model: model.clone(),
            values: Values::Blocks(blocks),
        })
    }

    pub fn zeros(model: &BoundaryModel) -> Self {
        let values = if model.is_torus() {
            let n = model.dim();
            Values::Grid(vec![0.0; model.num_points() * n * n])
        } else {
            Values::Blocks(vec![0.0; model.num_blocks()])
        };
        Self {
            model: model.clone(),
            values,
        }
    }

    /// Block coefficients (homogeneous models only).
    pub fn blocks(&self) -> Option<&[f64]> {
        match &self.values {
            Values::Blocks(b) => Some(b),
            Values::Grid(_) => None,
        }
    }

    /// Components at grid point `p`.
    pub fn matrix_at(&self, p: usize) -> &[f64] {
        let n = self.dim();
        &self.raw()[p * n * n..(p + 1) * n * n]
    }

    /// Uniform pointwise view: grid data as-is, blocks expanded into
    /// diagonal matrices in an orthonormal frame of the reference forms.
    pub fn to_points(&self) -> Vec<f64> {
        match &self.values {
            Values::Grid(v) => v.clone(),
            Values::Blocks(b) => {
                let n = self.dim();
                let mut out = vec![0.0; n * n];
                let mut i = 0;
                for (coef, mult) in b.iter().zip(self.model.block_multiplicities()) {
                    for _ in 0..mult {
                        out[i * n + i] = *coef;
                        i += 1;
                    }
                }
                out
            }
        }
    }

    /// Inverse of [`to_points`](Self::to_points); blocks are read off the diagonal.
    pub fn from_points(model: &BoundaryModel, points: Vec<f64>) -> Result<Self> {
        if model.is_torus() {
            return Self::from_grid(model, points);
        }
        let n = model.dim();
        let mut blocks = Vec::with_capacity(model.num_blocks());
        let mut i = 0;
        for mult in model.block_multiplicities() {
            let avg = (i..i + mult).map(|k| points[k * n + k]).sum::<f64>() / mult as f64;
            blocks.push(avg);
            i += mult;
        }
        Self::from_blocks(model, blocks)
    }

    /// Largest `|τ_ij - τ_ji|` over the grid.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        match &self.values {
            Values::Blocks(_) => 0.0,
            Values::Grid(v) => v.chunks(n * n).fold(0.0, |m, a| {
                let mut w: f64 = m;
                for i in 0..n {
                    for j in 0..i {
                        w = w.max((a[i * n + j] - a[j * n + i]).abs());
                    }
                }
                w
            }),
        }
    }

    /// True when every grid point carries the same matrix (always true for blocks).
    pub fn is_spatially_constant(&self, tol: f64) -> bool {
        match &self.values {
            Values::Blocks(_) => true,
            Values::Grid(v) => {
                let n2 = self.dim() * self.dim();
                let first = &v[..n2];
                v.chunks(n2)
                    .all(|c| c.iter().zip(first).all(|(a, b)| (a - b).abs() <= tol))
            }
        }
    }
}

impl VectorField {
    pub fn from_fn<F>(model: &BoundaryModel, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        require_torus(model)?;
        let n = model.dim();
        let mut raw = Vec::with_capacity(model.num_points() * n);
        for p in 0..model.num_points() {
            let v = f(&model.point_coords(p));
            if v.len() != n {
                return Err(Error::InvalidArgument("vector has wrong length".into()));
            }
            raw.extend(v);
        }
        Ok(Self {
            model: model.clone(),
            values: Values::Grid(raw),
        })
    }

    pub fn constant(model: &BoundaryModel, components: &[f64]) -> Result<Self> {
        let c = components.to_vec();
        Self::from_fn(model, |_| c.clone())
    }

    /// Combination of the model's Killing basis (homogeneous models).
    pub fn killing_combination(model: &BoundaryModel, coefficients: Vec<f64>) -> Result<Self> {
        if model.is_torus() {
            return Err(Error::Representation(
                "use constant fields for torus translations".into(),
            ));
        }
        if coefficients.len() != model.killing_dim() {
            return Err(Error::InvalidArgument(format!(
                "expected {} Killing coefficients",
                model.killing_dim()
            )));
        }
        Ok(Self {
            model: model.clone(),
            values: Values::Blocks(coefficients),
        })
    }

    pub fn vector_at(&self, p: usize) -> &[f64] {
        let n = self.dim();
        &self.raw()[p * n..(p + 1) * n]
    }
}

impl OneFormField {
    pub(crate) fn new(model: &BoundaryModel, values: Values) -> Self {
        Self {
            model: model.clone(),
            values,
        }
    }

    pub fn from_fn<F>(model: &BoundaryModel, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        require_torus(model)?;
        let n = model.dim();
        let mut raw = Vec::with_capacity(model.num_points() * n);
        for p in 0..model.num_points() {
            raw.extend(f(&model.point_coords(p)).into_iter().take(n));
        }
        Ok(Self::new(model, Values::Grid(raw)))
    }

    pub fn zeros(model: &BoundaryModel) -> Self {
        let values = if model.is_torus() {
            Values::Grid(vec![0.0; model.num_points() * model.dim()])
        } else {
            Values::Blocks(vec![0.0; model.invariant_oneforms()])
        };
        Self::new(model, values)
    }
}

impl ScalarField {
    pub(crate) fn new(model: &BoundaryModel, values: Values) -> Self {
        Self {
            model: model.clone(),
            values,
        }
    }

    pub fn from_fn<F>(model: &BoundaryModel, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> f64,
    {
        require_torus(model)?;
        let raw = (0..model.num_points())
            .map(|p| f(&model.point_coords(p)))
            .collect();
        Ok(Self::new(model, Values::Grid(raw)))
    }

    /// Value of a homogeneous (constant) scalar, or the grid mean.
    pub fn mean(&self) -> f64 {
        let v = self.raw();
        v.iter().sum::<f64>() / v.len() as f64
    }
}

pub(crate) fn require_torus(model: &BoundaryModel) -> Result<()> {
    if model.is_torus() {
        Ok(())
    } else {
        Err(Error::Representation(
            "grid fields require a flat torus model".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_round_trip_through_points() {
        let m = BoundaryModel::circle_sphere(4, 2.0, 1.0).unwrap();
        let f = SymTensorField::from_blocks(&m, vec![0.3, -1.5]).unwrap();
        let pts = f.to_points();
        assert_eq!(pts.len(), 16);
        assert_eq!(pts[0], 0.3);
        assert_eq!(pts[5], -1.5);
        assert_eq!(pts[15], -1.5);
        let back = SymTensorField::from_points(&m, pts).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn grid_constructor_symmetrizes() {
        let m = BoundaryModel::flat_torus(3, 1.0, 8).unwrap();
        let f = SymTensorField::from_fn(&m, |_| vec![1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
            .unwrap();
        assert_eq!(f.matrix_at(3)[1], 1.0);
        assert_eq!(f.matrix_at(3)[3], 1.0);
        assert_eq!(f.max_asymmetry(), 0.0);
    }

    #[test]
    fn mixing_models_is_an_error() {
        let a = SymTensorField::zeros(&BoundaryModel::round_sphere(3, 1.0).unwrap());
        let b = SymTensorField::zeros(&BoundaryModel::circle_sphere(3, 1.0, 1.0).unwrap());
        assert!(matches!(a.add(&b), Err(Error::ModelMismatch)));
    }
}
