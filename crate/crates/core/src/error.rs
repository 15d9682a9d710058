use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A monochromatic beam has a delta-distribution momentum density.
    #[error("delta-distribution density: {0}")]
    DeltaDensity(&'static str),

    /// The shift law is a point mass, so it has no density and its entropy is -inf.
    #[error("atomic distribution: {0}")]
    AtomicDistribution(&'static str),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error(
        "quadrature did not converge on [{lower}, {upper}]: estimated error {achieved:.3e} \
         exceeds requested {requested:.3e} after {evaluations} evaluations"
    )]
    QuadratureNonConvergence {
        lower: f64,
        upper: f64,
        achieved: f64,
        requested: f64,
        evaluations: usize,
    },

    #[error("undefined state: trace estimate {0:.3e} is not positive")]
    UndefinedState(f64),

    #[error("grid does not cover the state support: boundary/peak ratio {ratio:.3e} > {limit:.1e}")]
    GridCoverage { ratio: f64, limit: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
