use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("entry count {found} does not match {rows}x{cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        found: usize,
    },
    #[error("incompatible dimensions: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("singular matrix (smallest singular value {smallest_singular_value:e})")]
    Singular { smallest_singular_value: f64 },
    #[error("lapack failure: {0}")]
    Lapack(String),
    #[error("invalid block parameters: {0}")]
    InvalidParams(String),
    #[error("dimension {n} exceeds the dense limit {limit}")]
    DimensionGuard { n: u128, limit: u128 },
    #[error("power index {j} outside 0..{n}")]
    PowerOutOfRange { j: u128, n: u128 },
    #[error("psi undefined at zero")]
    PsiUndefinedAtZero,
    #[error("rho = {0} outside (0, 1)")]
    RhoOutOfRange(f64),
    #[error("matrix magnitudes exceed double range (log scale {0:.3})")]
    Unrepresentable(f64),
    #[error("segment {k}: expected length {expected}, found {found}")]
    SegmentMismatch {
        k: usize,
        expected: u128,
        found: usize,
    },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("r = {0} outside [0, 1)")]
    InvalidR(f64),
    #[error("empty grid")]
    EmptyGrid,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no grid radius lies in the spectrum")]
    NoSpectrumOnGrid,
    #[error("operator not invertible")]
    NotInvertible,
    #[error("eigenvalue {index} has modulus {modulus}, not unimodular")]
    NonUnimodular { index: usize, modulus: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
