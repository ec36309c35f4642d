//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by measure construction, transport solves, proximal
/// steps, operator calculus and iteration drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("negative weight {value} at atom {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights sum to {sum}, outside the renormalization window around 1")]
    WeightSumOutOfTolerance { sum: f64 },

    #[error("a measure needs at least one atom")]
    EmptySupport,

    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("projection left atom {index} outside the declared set")]
    ProjectionFailure { index: usize },

    #[error("transport solver failed: {detail}")]
    SolverFailure { detail: String },

    #[error("interpolation parameter {t} outside [0, 1]")]
    TOutOfRange { t: f64 },

    #[error("plan carries no optimality certificate or fails the duality-gap check")]
    PlanNotOptimal,

    #[error("marginal constraint violated: {detail}")]
    MarginalViolation { detail: String },

    #[error("interaction kernel is not even at probe {probe:?}")]
    AsymmetricKernel { probe: Vec<f64> },

    #[error("empirical Lipschitz constant {observed} exceeds declared bound {declared}")]
    DeclaredBoundViolated { declared: f64, observed: f64 },

    #[error("proximal solver stalled before reaching the decrease tolerance")]
    InnerSolverStall,

    #[error("objective became non-finite during the proximal solve")]
    NonFiniteObjective,

    #[error("operator declares no fixed-point witness")]
    NoFixedPointWitness,

    #[error("operators share no fixed-point witness")]
    NoCommonFixedPoint,

    #[error("fixed-set witness disagrees with the operator: {detail}")]
    MembershipCheckFailed { detail: String },

    #[error("functional {index} declares no Lipschitz bound")]
    MissingLipschitzBound { index: usize },

    #[error("operator `{label}` declares no quasi-firmness constant")]
    MissingAlpha { label: String },

    #[error("invalid configuration: {detail}")]
    InvalidConfig { detail: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
