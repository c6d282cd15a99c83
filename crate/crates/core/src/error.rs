use thiserror::Error;

/// Errors surfaced by the forward solvers, quadrature routines and inversions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    #[error("symmetry mismatch: {0}")]
    SymmetryMismatch(String),

    #[error("comparability needs a nonempty sample grid")]
    EmptyGrid,

    #[error("degenerate ellipsoid: |x|+|x-e| = {0} must exceed 1")]
    DegenerateEllipsoid(f64),

    #[error("radius must be positive, got {0}")]
    NonpositiveRadius(f64),

    #[error("segment endpoints coincide")]
    CoincidentEndpoints,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("point (t={t}, r={r}) lies outside the solved domain (eta_max={eta_max})")]
    OutOfDomain { t: f64, r: f64, eta_max: f64 },

    #[error("unsupported series order {0}; at most 2 is implemented")]
    UnsupportedOrder(usize),

    #[error("potential has negative entries (minimum {0:e}); comparability hypothesis violated")]
    NegativeEntries(f64),

    #[error("sample times are not strictly increasing at index {0}")]
    NonmonotoneTimes(usize),

    #[error("secant iteration diverged at layer {layer} (last bracket [{lo}, {hi}])")]
    SecantDivergence { layer: usize, lo: f64, hi: f64 },

    #[error(
        "class {0} has more than one scalar unknown; the single-trace problem is underdetermined"
    )]
    ClassUnderdetermined(String),

    #[error("line search failed to decrease the objective at iteration {iter}")]
    LineSearchFailure { iter: usize },

    #[error("normal equations are singular (condition estimate {condition:e})")]
    SingularNormalEquations { condition: f64 },

    #[error("fixed-point correction is not contracting; residuals {residuals:?}")]
    NonContraction { residuals: Vec<f64> },

    #[error("trace format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
