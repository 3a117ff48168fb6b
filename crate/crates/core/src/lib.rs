//! Numerical laboratory for conformally compact Einstein metrics.
//!
//! The crate computes Fefferman–Graham expansions from boundary data
//! `(γ, g_(n))`, integrates the radial Einstein equation for homogeneous
//! boundaries, evaluates exactly solvable reference metrics (Poincaré,
//! hyperbolic cusp, AdS–Schwarzschild) and checks the boundary constraint
//! and Killing-extension identities on flat tori.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity, clippy::needless_range_loop)]

pub mod constraints;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod evolution;
pub mod exact;
pub mod model;
pub mod numerics;
pub mod ode;
pub mod pointwise;
pub mod scalar;
pub mod series;
pub mod spectral;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use field::{OneFormField, ScalarField, SymTensorField, Values, VectorField};
pub use model::BoundaryModel;
pub use evolution::{ConstraintReport, MetricCurve};
pub use series::FGSeries;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
