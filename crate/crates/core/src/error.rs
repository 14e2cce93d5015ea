use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the forward solvers, the dataset layer and the inversion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The mesh is too coarse for the requested wave number. `ratio` is
    /// `max_edge / (wavelength / 8)` and exceeds 1.
    #[error("mesh under-refined for k = {k}: max edge {max_edge:.5} is {ratio:.3}x the allowed {allowed:.5}")]
    UnderRefined {
        k: f64,
        max_edge: f64,
        allowed: f64,
        ratio: f64,
    },

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("series did not converge within {max_order} orders (tail estimate {tail:.3e})")]
    Truncation { max_order: usize, tail: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("indicator for direction {direction} is identically zero")]
    DegenerateField { direction: String },

    #[error("projection vector nearly orthogonal to polarization (|e.p| = {dot:.3e})")]
    Conditioning { dot: f64 },

    #[error("profile is identically zero")]
    EmptyProfile,

    #[error("degenerate strip: {0}")]
    DegenerateStrip(String),

    #[error("strip normals are linearly dependent (det = {det:.3e})")]
    DegenerateNormals { det: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
