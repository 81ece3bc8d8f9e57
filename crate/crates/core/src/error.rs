use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |A - A^H| = {max_asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { max_asymmetry: f64, tolerance: f64 },

    #[error("QL iteration did not converge for eigenvalue {index} after {iterations} sweeps")]
    NoConvergence { index: usize, iterations: usize },

    #[error("eigenvalue {value:e} of a Gram matrix is below the roundoff floor {floor:e}")]
    NegativeEigenvalue { value: f64, floor: f64 },

    #[error("degenerate state: Tr(XX^H) = 0")]
    DegenerateState,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {x} outside the supported range [{min}, {max}]")]
    OutOfRange { x: f64, min: f64, max: f64 },

    #[error("integrand is not finite at x = {0}")]
    NonFiniteIntegrand(f64),

    #[error("adaptive quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e})")]
    QuadratureTolerance { tolerance: f64, estimate: f64 },

    #[error("Painleve II solution blew up at s = {s} (|q| = {q:e})")]
    BlowUp { s: f64, q: f64 },

    #[error("Tracy-Widom table not built")]
    TableNotBuilt,

    #[error("Fredholm determinant at s = {s} changed by {change:e} on node doubling")]
    FredholmNotConverged { s: f64, change: f64 },

    #[error("hard-edge regime (r = {r}): smallest-eigenvalue scaling is degenerate")]
    HardEdge { r: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("trial {trial_index}: {source}")]
    Trial {
        trial_index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed table: {0}")]
    Table(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
