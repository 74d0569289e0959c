use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown catalog function `{name}`; valid names: {valid}")]
    UnknownFunction { name: String, valid: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polytope has no vertices")]
    EmptyPolytope,

    #[error("polytope has {count} vertices; at most {limit} are supported")]
    TooManyVertices { count: usize, limit: usize },

    #[error("every sample at radius {radius} lies outside the domain")]
    InsufficientDomain { radius: f64 },

    #[error("no admissible samples for the probe")]
    EmptyProbe,

    #[error("degenerate example: {0}")]
    Degenerate(String),

    #[error("objective is +inf on the whole search box")]
    OracleFailure,

    #[error("iterate norm {norm} exceeded divergence bound {bound}")]
    Divergence { norm: f64, bound: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("projection failed after {iterations} iterations (|G| = {residual:e}, stationarity = {stationarity:e})")]
    ProjectionFailure {
        iterations: usize,
        residual: f64,
        stationarity: f64,
    },

    #[error("constraint Jacobian is rank deficient at the given point")]
    RankDeficient,

    #[error("operation supports one-dimensional manifolds only (got dimension {0})")]
    UnsupportedManifoldDimension(usize),

    #[error("trajectory never settles inside the tube")]
    MissingIdentification,

    #[error("infimum of the function is not registered")]
    UnknownInfimum,

    #[error("no level-set description registered for weak-sharp test")]
    MissingLevelSet,

    #[error("{found} admissible samples, at least {needed} required")]
    TooFewSamples { found: usize, needed: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("missing metadata: {0}")]
    MissingMetadata(String),
}

pub type Result<T> = core::result::Result<T, Error>;
