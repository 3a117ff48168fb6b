//! Boundary models `(∂M, γ)`.
//!
//! Two families are supported: flat tori discretized on uniform grids, and
//! homogeneous models (round sphere, circle × sphere) where every invariant
//! symmetric tensor is described by one coefficient per irreducible block.
//! Block coefficients are taken relative to reference forms: `g_{S^n(1)}` on
//! the round sphere, and `dθ²` (θ of period `circle_length`) plus
//! `g_{S^{n-1}(1)}` on the product.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 3;
pub const MAX_DIM: usize = 7;
pub const MIN_RESOLUTION: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BoundaryModel {
    FlatTorus {
        periods: Vec<f64>,
        resolution: Vec<usize>,
    },
    RoundSphere {
        dim: usize,
        radius: f64,
    },
    CircleSphere {
        dim: usize,
        circle_length: f64,
        sphere_radius: f64,
    },
}

impl BoundaryModel {
    pub fn flat_torus(dim: usize, period: f64, resolution: usize) -> Result<Self> {
        Self::FlatTorus {
            periods: vec![period; dim],
            resolution: vec![resolution; dim],
        }
        .validated()
    }

    /// The standard `(2π)^n` torus.
    pub fn standard_torus(dim: usize, resolution: usize) -> Result<Self> {
        Self::flat_torus(dim, 2.0 * PI, resolution)
    }

    pub fn round_sphere(dim: usize, radius: f64) -> Result<Self> {
        Self::RoundSphere { dim, radius }.validated()
    }

    pub fn circle_sphere(dim: usize, circle_length: f64, sphere_radius: f64) -> Result<Self> {
        Self::CircleSphere {
            dim,
            circle_length,
            sphere_radius,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if !(MIN_DIM..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidModel(format!(
                "dimension {dim} outside {MIN_DIM}..={MAX_DIM}"
            )));
        }
        let positive = |x: f64, what: &str| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{what} must be positive, got {x}")))
            }
        };
        match self {
            Self::FlatTorus {
                periods,
                resolution,
            } => {
                if periods.len() != resolution.len() {
                    return Err(Error::InvalidModel(
                        "periods and resolution differ in length".into(),
                    ));
                }
                for &p in periods {
                    positive(p, "torus period")?;
                }
                for &r in resolution {
                    if r < MIN_RESOLUTION || r % 2 != 0 {
                        return Err(Error::InvalidModel(format!(
                            "grid resolution {r} must be even and >= {MIN_RESOLUTION}"
                        )));
                    }
                }
            }
            Self::RoundSphere { radius, .. } => positive(*radius, "sphere radius")?,
            Self::CircleSphere {
                circle_length,
                sphere_radius,
                ..
            } => {
                positive(*circle_length, "circle length")?;
                positive(*sphere_radius, "sphere radius")?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::FlatTorus { periods, .. } => periods.len(),
            Self::RoundSphere { dim, .. } | Self::CircleSphere { dim, .. } => *dim,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, Self::FlatTorus { .. })
    }

    pub fn is_homogeneous(&self) -> bool {
        !self.is_torus()
    }

    /// Number of grid points (torus) or 1 (homogeneous models).
    pub fn num_points(&self) -> usize {
        match self {
            Self::FlatTorus { resolution, .. } => resolution.iter().product(),
            _ => 1,
        }
    }

    /// Block multiplicities of the homogeneous splitting; empty for tori.
    pub fn block_multiplicities(&self) -> Vec<usize> {
        match self {
            Self::FlatTorus { .. } => Vec::new(),
            Self::RoundSphere { dim, .. } => vec![*dim],
            Self::CircleSphere { dim, .. } => vec![1, dim - 1],
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.block_multiplicities().len()
    }

    /// Ricci tensor of any invariant metric, in reference block coefficients.
    ///
    /// Ricci curvature is invariant under constant rescaling of each factor,
    /// so these values do not depend on the metric's block coefficients.
    pub fn reference_ricci(&self) -> Vec<f64> {
        match self {
            Self::FlatTorus { .. } => Vec::new(),
            Self::RoundSphere { dim, .. } => vec![(*dim - 1) as f64],
            Self::CircleSphere { dim, .. } => vec![0.0, (*dim - 2) as f64],
        }
    }

    /// Volume of the reference metric whose block coefficients are all one.
    pub fn reference_volume(&self) -> f64 {
        match self {
            Self::FlatTorus { periods, .. } => periods.iter().product(),
            Self::RoundSphere { dim, .. } => unit_sphere_volume(*dim),
            Self::CircleSphere {
                dim, circle_length, ..
            } => circle_length * unit_sphere_volume(dim - 1),
        }
    }

    /// Number of parameters of the hard-coded Killing basis.
    pub fn killing_dim(&self) -> usize {
        match self {
            Self::FlatTorus { periods, .. } => periods.len(),
            Self::RoundSphere { dim, .. } => dim * (dim + 1) / 2,
            Self::CircleSphere { .. } => 1,
        }
    }

    /// Number of invariant one-form coefficients on homogeneous models.
    pub(crate) fn invariant_oneforms(&self) -> usize {
        match self {
            Self::FlatTorus { .. } => 0,
            Self::RoundSphere { .. } => 0,
            Self::CircleSphere { .. } => 1,
        }
    }

    /// Grid spacing along each axis (torus only).
    pub fn spacing(&self) -> Vec<f64> {
        match self {
            Self::FlatTorus {
                periods,
                resolution,
            } => periods
                .iter()
                .zip(resolution)
                .map(|(p, &r)| p / r as f64)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Coordinates of grid point `index` (torus only).
    pub fn point_coords(&self, index: usize) -> Vec<f64> {
        match self {
            Self::FlatTorus { resolution, .. } => {
                let h = self.spacing();
                let mut rem = index;
                let mut coords = vec![0.0; resolution.len()];
                for axis in (0..resolution.len()).rev() {
                    coords[axis] = (rem % resolution[axis]) as f64 * h[axis];
                    rem /= resolution[axis];
                }
                coords
            }
            _ => Vec::new(),
        }
    }

    /// Default radius of reliability for series evaluation.
    pub fn default_t_max(&self) -> f64 {
        match self {
            Self::RoundSphere { .. } => 1.0,
            _ => 0.5,
        }
    }

    /// Short human-readable descriptor, stable across runs.
    pub fn descriptor(&self) -> String {
        match self {
            Self::FlatTorus {
                periods,
                resolution,
            } => format!("T{}(periods={:?}, grid={:?})", periods.len(), periods, resolution),
            Self::RoundSphere { dim, radius } => format!("S{dim}({radius})"),
            Self::CircleSphere {
                dim,
                circle_length,
                sphere_radius,
            } => format!("S1({circle_length})xS{}({sphere_radius})", dim - 1),
        }
    }
}

/// Volume of the unit `k`-sphere in `R^{k+1}`.
pub fn unit_sphere_volume(k: usize) -> f64 {
    // |S^0| = 2, |S^1| = 2π, |S^k| = 2π/(k-1) |S^{k-2}|
    let (mut vol, mut j) = if k.is_multiple_of(2) { (2.0, 0) } else { (2.0 * PI, 1) };
    while j < k {
        j += 2;
        vol *= 2.0 * PI / (j - 1) as f64;
    }
    vol
}
