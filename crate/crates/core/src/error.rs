use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("pole on the unit circle: entry ({row}, {col}) has a pole of modulus {modulus}")]
    PoleOnCircle { row: usize, col: usize, modulus: f64 },

    #[error("denominator vanishes on the grid: entry ({row}, {col}), |den| = {value:e}")]
    VanishingDenominator { row: usize, col: usize, value: f64 },

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("truncation too small: {what}; increase N (estimated decay rate {decay_rate:.4})")]
    Truncation { what: String, decay_rate: f64 },

    #[error("no convergence after {iterations} iterations in {what}")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("matrix is not positive semidefinite: pivot {value:e} below -{tol:e}")]
    NotPsd { value: f64, tol: f64 },

    #[error("degenerate outer factor: {0}")]
    DegenerateOuter(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("frame not pointwise orthonormal: deviation {deviation:e}")]
    FrameNotOrthonormal { deviation: f64 },

    #[error("interpolant not found up to degree {degree} (residual {residual:e}); raise max-q-degree")]
    InterpolantNotFound { degree: usize, residual: f64 },

    #[error("level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by the input document rather than by the
    /// numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parse(_)
            | Error::Dimension(_)
            | Error::PoleOnCircle { .. }
            | Error::VanishingDenominator { .. }
            | Error::Config(_) => true,
            Error::Level { source, .. } => source.is_validation(),
            _ => false,
        }
    }

    /// True when a finer grid (and with it a larger truncation cap) may
    /// resolve the failure.
    pub fn needs_finer_grid(&self) -> bool {
        match self {
            Error::Aliasing(_) | Error::Truncation { .. } => true,
            Error::Level { source, .. } => source.needs_finer_grid(),
            _ => false,
        }
    }

    pub(crate) fn at_level(self, level: usize) -> Error {
        match self {
            e @ Error::Level { .. } => e,
            e => Error::Level {
                level,
                source: Box::new(e),
            },
        }
    }
}
