//! Run configuration: a TOML file, named presets and command-line overrides.

use std::f64::consts::PI;
use std::path::Path;

use fglab::constraints::example53;
use fglab::tensor::metric_of;
use fglab::{verify, BoundaryModel, Error, Result, SymTensorField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Sin,
    Cos,
}

impl Profile {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Profile::Sin => x.sin(),
            Profile::Cos => x.cos(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ode: f64,
    /// Integrator tolerance for the second data set of `decay`.
    pub ode_b: Option<f64>,
    pub fit: f64,
    pub identity: f64,
    /// Decay-fit floor; the library default when absent.
    pub floor: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode: 1e-10,
            ode_b: None,
            fit: 1e-6,
            identity: 1e-6,
            floor: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub points: usize,
}

impl Default for Window {
    fn default() -> Self {
        Self {
            t0: fglab::evolution::DEFAULT_SEED_T,
            t1: 1.0,
            points: fglab::evolution::DEFAULT_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub model: Option<BoundaryModel>,
    /// Block values (homogeneous models) or a row-major constant matrix (torus).
    pub g_n: Option<Vec<f64>>,
    /// Second data set for `decay`; defaults to `g_n`.
    pub g_n_b: Option<Vec<f64>>,
    /// Torus `g_(n)` given by the example tensor with this profile in `θ¹`.
    pub profile: Option<Profile>,
    /// Warp amplitude `a` of `γ = diag(1, e^{2φ}, e^{−2φ}, 1, …)`, `φ = a sin θ¹`, on a torus.
    pub warp: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<f64>,
    pub order: Option<usize>,
    pub resolve_log: bool,
    pub resolution: Option<usize>,
    pub tolerances: Tolerances,
    pub window: Window,
    pub fit_window: Option<[f64; 2]>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: None,
            model: None,
            g_n: None,
            g_n_b: None,
            profile: None,
            warp: None,
            n: None,
            m: None,
            order: None,
            resolve_log: false,
            resolution: None,
            tolerances: Tolerances::default(),
            window: Window::default(),
            fit_window: None,
            seed: verify::RANDOM_SEED,
        }
    }
}

pub const PRESETS: [&str; 6] = [
    "poincare",
    "cusp",
    "even-n-resonance",
    "schwarzschild",
    "circle-sphere",
    "torus-example",
];

/// Model, `g_(n)`, profile and warp fixed by a preset.
fn preset(name: &str) -> Result<(BoundaryModel, Option<Vec<f64>>, Option<Profile>, Option<f64>)> {
    Ok(match name {
        "poincare" => (BoundaryModel::round_sphere(3, 1.0)?, None, None, None),
        "cusp" => (BoundaryModel::standard_torus(3, 8)?, None, None, None),
        "even-n-resonance" => (BoundaryModel::standard_torus(4, 8)?, None, None, Some(0.3)),
        "schwarzschild" => (
            BoundaryModel::circle_sphere(3, PI, 1.0)?,
            Some(vec![-4.0 / 3.0, 2.0 / 3.0]),
            None,
            None,
        ),
        "circle-sphere" => (
            BoundaryModel::circle_sphere(3, PI, 1.0)?,
            Some(vec![0.2, -0.1]),
            None,
            None,
        ),
        "torus-example" => (BoundaryModel::standard_torus(3, 16)?, None, Some(Profile::Sin), None),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset {other:?}; known presets: {}",
                PRESETS.join(", ")
            )))
        }
    })
}

/// Boundary metric and free datum resolved from a configuration.
pub struct BoundaryData {
    pub gamma: SymTensorField,
    pub g_n: SymTensorField,
    pub g_n_b: SymTensorField,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::InvalidArgument(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        let positive = [Some(t.ode), t.ode_b, Some(t.fit), Some(t.identity), t.floor];
        if positive.iter().flatten().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        let w = &self.window;
        if !(w.t0 > 0.0 && w.t1 > w.t0) || w.points < 2 {
            return Err(Error::InvalidArgument(format!(
                "window needs 0 < t0 < t1 and at least 2 points, got ({}, {}, {})",
                w.t0, w.t1, w.points
            )));
        }
        if let Some([lo, hi]) = self.fit_window {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::InvalidArgument(format!("fit window ({lo}, {hi}) is empty")));
            }
        }
        if let Some(p) = &self.preset {
            preset(p)?;
        }
        Ok(())
    }

    /// Resolves the boundary metric and both data sets.
    pub fn boundary(&self) -> Result<BoundaryData> {
        let (mut model, mut g_n, mut profile, mut warp) = match &self.preset {
            Some(p) => {
                let (m, g, pr, w) = preset(p)?;
                (Some(m), g, pr, w)
            }
            None => (None, None, None, None),
        };
        if let Some(m) = &self.model {
            model = Some(m.clone().validated()?);
            g_n = None;
            profile = None;
            warp = None;
        }
        if let Some(res) = self.resolution {
            if let Some(BoundaryModel::FlatTorus { resolution, .. }) = &mut model {
                resolution.iter_mut().for_each(|r| *r = res);
            }
        }
        let model = match model {
            Some(m) => m.validated()?,
            None => {
                return Err(Error::InvalidArgument(
                    "no boundary data: set a preset or a model".into(),
                ))
            }
        };
        if self.g_n.is_some() {
            g_n = self.g_n.clone();
            profile = None;
        }
        if self.profile.is_some() {
            profile = self.profile;
            g_n = None;
        }
        if self.warp.is_some() {
            warp = self.warp;
        }
        let gamma = match warp {
            Some(a) => warped_metric(&model, a)?,
            None => metric_of(&model),
        };
        let datum = |values: &Option<Vec<f64>>| -> Result<SymTensorField> {
            match (values, profile) {
                (Some(v), _) => field_from_values(&model, v),
                (None, Some(p)) => example53(&model, |x| p.eval(x)),
                (None, None) => Ok(SymTensorField::zeros(&model)),
            }
        };
        let g_n_field = datum(&g_n)?;
        let g_n_b = match &self.g_n_b {
            Some(v) => field_from_values(&model, v)?,
            None => g_n_field.clone(),
        };
        Ok(BoundaryData {
            gamma,
            g_n: g_n_field,
            g_n_b,
        })
    }

    /// Series order, defaulting to `n + 5` and never below `n + 2`.
    pub fn order_for(&self, n: usize) -> Result<usize> {
        let k = self.order.unwrap_or(n + 5);
        if k < n + 2 {
            return Err(Error::InvalidArgument(format!(
                "series order {k} below n + 2 = {}",
                n + 2
            )));
        }
        Ok(k)
    }
}

fn field_from_values(model: &BoundaryModel, values: &[f64]) -> Result<SymTensorField> {
    if model.is_homogeneous() {
        SymTensorField::from_blocks(model, values.to_vec())
    } else {
        SymTensorField::constant(model, values)
    }
}

fn warped_metric(model: &BoundaryModel, amplitude: f64) -> Result<SymTensorField> {
    let n = model.dim();
    if !model.is_torus() || n < 3 {
        return Err(Error::InvalidArgument(
            "a warped metric needs a flat torus of dimension at least 3".into(),
        ));
    }
    SymTensorField::from_fn(model, |x| {
        let phi = amplitude * x[0].sin();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            g[i * n + i] = 1.0;
        }
        g[n + 1] = (2.0 * phi).exp();
        g[2 * n + 2] = (-2.0 * phi).exp();
        g
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for p in PRESETS {
            let cfg = RunConfig {
                preset: Some(p.into()),
                ..Default::default()
            };
            cfg.validate().unwrap();
            let b = cfg.boundary().unwrap();
            assert_eq!(b.g_n, b.g_n_b);
        }
    }

    #[test]
    fn toml_round_trip_and_errors() {
        let text = r#"
            preset = "circle-sphere"
            order = 9
            [tolerances]
            ode = 1e-11
            [model]
            kind = "CircleSphere"
            dim = 5
            circle_length = 2.0
            sphere_radius = 1.0
        "#;
        let cfg: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.order, Some(9));
        assert_eq!(cfg.tolerances.ode, 1e-11);
        assert_eq!(cfg.boundary().unwrap().gamma.dim(), 5);
        assert!(toml::from_str::<RunConfig>("unknown = 1").is_err());
        let bad = RunConfig {
            tolerances: Tolerances {
                ode: -1.0,
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(RunConfig::default().order_for(3).unwrap() == 8);
        let low = RunConfig {
            order: Some(4),
            ..Default::default()
        };
        assert!(low.order_for(3).is_err());
    }
}
