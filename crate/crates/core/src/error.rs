//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown cost kind `{0}`")]
    UnknownKind(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("evaluation point out of domain")]
    OutOfDomain,

    #[error("derivative order {0} exceeds the supported maximum 4")]
    OrderTooHigh(usize),

    #[error("cross-Hessian singular or near-singular (smallest singular value {sigma_min:.3e})")]
    NondegeneracyFailure { sigma_min: f64 },

    #[error("Newton Jacobian singular at iterate {at:?}")]
    SingularJacobian { at: Vec<f64> },

    #[error("Newton did not converge in {iters} iterations (residual {residual:.3e} at {at:?})")]
    NoConvergence {
        iters: usize,
        residual: f64,
        at: Vec<f64>,
    },

    #[error("segment solve failed at t = {t}: {source}")]
    SegmentFailure { t: f64, source: Box<Error> },

    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("finite-difference stencil leaves the domain")]
    StencilOutOfDomain,

    #[error("step-halved finite-difference estimates disagree: {0:.6e} vs {1:.6e}")]
    StencilInconsistent(f64, f64),

    #[error("cost is not strictly regular on the sampled domain (min normalized cross-curvature {0:.3e})")]
    NotStrictlyRegular(f64),

    #[error("no admissible site for the query point")]
    NoAdmissibleSite,

    #[error("region {0} is empty but carries positive target weight")]
    EmptyRegion(usize),

    #[error("operation requires a squared-distance cost, got `{0}`")]
    NotSquaredDistance(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
