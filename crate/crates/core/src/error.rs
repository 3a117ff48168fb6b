use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid boundary model: {0}")]
    InvalidModel(String),

    #[error("fields live on different boundary models")]
    ModelMismatch,

    #[error("representation not available on this model: {0}")]
    Representation(String),

    #[error("g_(n) is not transverse-traceless: |div| = {divergence:.3e}, |tr| = {trace:.3e}")]
    NotTransverseTraceless { divergence: f64, trace: f64 },

    #[error("log resonance at order {order}: obstruction magnitude {magnitude:.3e}")]
    LogResonance { order: usize, magnitude: f64 },

    #[error("vector field is not Killing: |killing operator| = {0:.3e}")]
    NotKilling(f64),

    #[error("tensor is not divergence free: |div| = {0:.3e}")]
    NotDivergenceFree(f64),

    #[error("Richardson check failed for linearized divergence: discrepancy {discrepancy:.3e} > {tolerance:.3e}")]
    Richardson { discrepancy: f64, tolerance: f64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("integration failed near the singular point: {0}")]
    SingularSeed(String),

    #[error("metric lost positive-definiteness at t = {t}")]
    PositivityLost { t: f64 },

    #[error("evolution requires spatially homogeneous data on this model")]
    Inhomogeneous,

    #[error("unstable coefficient fit: window sensitivity {sensitivity:.3e} > {tolerance:.3e}")]
    UnstableFit { sensitivity: f64, tolerance: f64 },

    #[error("fit window contains {0} samples, need at least 5")]
    EmptyWindow(usize),

    #[error("curves are sampled on different grids")]
    GridMismatch,

    #[error("no Killing basis available for this model")]
    NoKillingBasis,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "invalid-model",
            Error::ModelMismatch => "model-mismatch",
            Error::Representation(_) => "representation",
            Error::NotTransverseTraceless { .. } => "not-transverse-traceless",
            Error::LogResonance { .. } => "log-resonance",
            Error::NotKilling(_) => "not-killing",
            Error::NotDivergenceFree(_) => "not-divergence-free",
            Error::Richardson { .. } => "richardson",
            Error::OutOfRange(_) => "out-of-range",
            Error::SingularSeed(_) => "singular-seed",
            Error::PositivityLost { .. } => "positivity-lost",
            Error::Inhomogeneous => "inhomogeneous",
            Error::UnstableFit { .. } => "unstable-fit",
            Error::EmptyWindow(_) => "empty-window",
            Error::GridMismatch => "grid-mismatch",
            Error::NoKillingBasis => "no-killing-basis",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// True when the error reflects rejected input rather than a numerical failure.
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            Error::InvalidModel(_)
                | Error::ModelMismatch
                | Error::Representation(_)
                | Error::NotTransverseTraceless { .. }
                | Error::LogResonance { .. }
                | Error::NotKilling(_)
                | Error::NotDivergenceFree(_)
                | Error::OutOfRange(_)
                | Error::Inhomogeneous
                | Error::GridMismatch
                | Error::NoKillingBasis
                | Error::InvalidArgument(_)
                | Error::EmptyWindow(_)
        )
    }
}
