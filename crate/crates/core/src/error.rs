use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-side precondition did not hold (e.g. a non-horizontal tangent).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The Grassmann logarithm hit (or came too close to) the cut locus.
    #[error("target outside normal neighborhood (condition number of X^T Y = {condition:e})")]
    OutsideNeighborhood { condition: f64 },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("rank-deficient landmarks (sigma_2 / sigma_1 = {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("degenerate segment between landmarks {index} and {next}", next = index + 1)]
    DegenerateSegment { index: usize },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },

    #[error("data has zero variance")]
    ZeroVariance,

    #[error("ordering error: {0}")]
    Ordering(String),

    #[error("span position {eta} outside [{lo}, {hi}]")]
    OutOfSpan { eta: f64, lo: f64, hi: f64 },

    #[error("shape self-intersects")]
    SelfIntersection,

    #[error("station at eta = {eta}: {source}")]
    Station {
        eta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_station(self, eta: f64) -> Self {
        match self {
            e @ Error::Station { .. } => e,
            e => Error::Station {
                eta,
                source: Box::new(e),
            },
        }
    }

    /// Innermost error, looking through station wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Station { source, .. } => source.root(),
            e => e,
        }
    }
}
