use thiserror::Error;

/// Errors raised by the tomogram toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("point ({mu}, {nu}) is the origin of the (mu, nu) plane; the tomogram degenerates to a delta function there")]
    OriginPoint { mu: f64, nu: f64 },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("state `{state}` has no {repr} representation")]
    RepresentationUnavailable { state: String, repr: String },

    #[error("point has {got} coordinates, {repr} representation needs {expected}")]
    PointArity { repr: String, expected: usize, got: usize },

    #[error("requested X = {x} lies outside the phase-space grid's diagonal extent {extent}")]
    OutOfRange { x: f64, extent: f64 },

    #[error("Hermite values overflow for n = {n}, x = {x}; use the normalized Hermite functions instead")]
    HermiteOverflow { n: usize, x: f64 },

    #[error("row at theta = {theta} has negative value {value:.3e}")]
    NegativeDensity { theta: f64, value: f64 },

    #[error("theta grid of {0} rows has no conjugate (theta + pi/2) pairs; need an even row count")]
    NoConjugatePairs(usize),

    #[error("time step {dt} exceeds the stability limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("potential degree {0} exceeds 4")]
    PotentialDegree(usize),

    #[error("malformed potential: {0}")]
    MalformedPotential(String),

    #[error("rank-deficient moment panel: {0}")]
    RankDeficient(String),

    #[error("moment order must be at least {min}, got {got}")]
    MomentOrder { min: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid file: {0}")]
    GridFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
