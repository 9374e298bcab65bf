use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the physics is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A validity condition for an approximation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Inconsistent or malformed model configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Caller broke an operation contract (wrong site kind, non-Hermitian input, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no equilibrium found after {iterations} Newton iterations (max node residual {residual:e})")]
    NoEquilibrium { iterations: usize, residual: f64 },

    #[error("mechanically unstable: mode {mode} has negative stiffness eigenvalue {eigenvalue:e}")]
    Instability { mode: usize, eigenvalue: f64 },

    #[error("mode {mode} has zero frequency; zero-point amplitude is singular")]
    SingularAmplitude { mode: usize },

    #[error("Hilbert space dimension {dimension} exceeds the resource limit {limit}")]
    Resource { dimension: usize, limit: usize },

    #[error("solver error: {0}")]
    Solver(String),
}
