use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site index {site} outside 1..={n_sites}")]
    InvalidSite { site: usize, n_sites: usize },

    #[error("n_sites = {0} is outside the supported range 1..=12")]
    TooManySites(usize),

    #[error("single-site sigma^y is imaginary and cannot be embedded in the real backend")]
    ImaginaryOperator,

    #[error("two-site product needs distinct sites, got {0} twice")]
    RepeatedSite(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (|psi|^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("partial trace needs at least one kept site")]
    EmptyKeep,

    #[error("ground space of dimension {0} does not split into the requested symmetry sectors")]
    NoSectorSplit(usize),

    #[error("|gamma| = {0:e} is below the closed-form domain (1e-3); use the numeric eigenvector path")]
    GammaOutOfDomain(f64),

    #[error("renormalized exchange J' = {j_prime} is not positive at gamma = {gamma}")]
    FlowSign { gamma: f64, j_prime: f64 },

    #[error("coupling {0} is not a finite non-negative number")]
    InvalidCoupling(f64),

    #[error("no sign change of g'(g) - g on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("flow derivative {0} at the fixed point is not repulsive (must exceed 1)")]
    NonRepulsive(f64),

    #[error("grid is not uniform at index {0}")]
    NonUniformGrid(usize),

    #[error("series is empty")]
    EmptySeries,

    #[error("scaling fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("invalid sweep specification: {0}")]
    InvalidSpec(String),

    #[error("at coupling {x}, RG step {step}: {source}")]
    AtPoint {
        x: f64,
        step: usize,
        #[source]
        source: Box<Error>,
    },
}
