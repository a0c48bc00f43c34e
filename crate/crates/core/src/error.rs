use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A shape or grid does not fit the requested configuration.
    #[error("domain-fit error: {0}")]
    DomainFit(String),

    /// Two fields live on different grids.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A level-set field has no zero crossing.
    #[error("level set has no interface (field is one-signed)")]
    NoInterface,

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// Containment or normal-field failure (D_in not inside E, degenerate normal, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// An argument outside the domain of a closed-form function.
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("config error at line {line}, key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("malformed grid dump: {0}")]
    Dump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(line: usize, key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            key: key.into(),
            message: message.into(),
        }
    }
}
