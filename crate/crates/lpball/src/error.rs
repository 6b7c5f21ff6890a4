use thiserror::Error;

/// Errors raised by the library.
///
/// The CLI maps these onto exit codes: configuration problems exit with 1,
/// numeric failures (nonconvergence, singular systems) with 2.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter combination for which the limit theorem degenerates
    /// (for instance the MDP rate at p = q, where the variance vanishes).
    #[error("degenerate case: {0}")]
    Degenerate(String),

    /// The 2x2 moment covariance matrix is numerically singular.
    #[error("singular covariance matrix: determinant {det:.3e}")]
    SingularCovariance { det: f64 },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    /// An iterative solver stopped without meeting its convergence test.
    #[error("solver did not converge: {0}")]
    Nonconvergence(String),

    /// Two internal evaluation routes disagree beyond tolerance, or a
    /// quantity that must be nonnegative came out significantly negative.
    #[error("internal consistency violation: {0}")]
    Inconsistent(String),

    /// Invalid experiment or CLI configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A user-supplied hook violated its contract (e.g. a mixing sampler
    /// returned a negative value).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The operation needs information the supplied object does not carry
    /// (e.g. a density evaluation for a sampler-only external mixing law).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Single-token tag used for machine-parsable stderr lines.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Degenerate(_) => "degenerate",
            Error::SingularCovariance { .. } => "singular",
            Error::Quadrature(_) => "quadrature",
            Error::Nonconvergence(_) => "nonconvergence",
            Error::Inconsistent(_) => "inconsistent",
            Error::Config(_) => "config",
            Error::Contract(_) => "contract",
            Error::Unsupported(_) => "unsupported",
        }
    }

    /// True for errors that should map to the CLI's "config error" exit code.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Domain(_) | Error::Unsupported(_)
        )
    }
}
