use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("path gain undefined at zero distance")]
    ZeroDistance,

    #[error("link distance {0} m is below the 1 m model minimum")]
    BelowMinimumDistance(f64),

    #[error("time step gives {samples} samples per rotation, need at least {required}")]
    ResolutionTooCoarse { samples: usize, required: usize },

    #[error("empirical CDF needs at least one sample")]
    EmptySampleSet,

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failures while reading a configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("configuration failed validation: {}", .0.join("; "))]
    Validation(Vec<String>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
