use thiserror::Error;

use crate::group::Sign;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wire {wire} out of range for a {n_qubits}-qubit register")]
    WireOutOfRange { wire: usize, n_qubits: usize },
    #[error("matrix is not unitary (max deviation {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is not in SU(2) (determinant deviates by {residual:.3e})")]
    NotSpecialUnitary { residual: f64 },
    #[error("operator is not Hermitian (max deviation {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("map on {len} elements is not a bijection")]
    NotBijection { len: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("cycle length {k} outside 2..={n_pairs}")]
    CycleLength { k: usize, n_pairs: usize },
    #[error("{what} = {value} exceeds the dense-simulation limit {limit}")]
    TooLarge { what: &'static str, value: usize, limit: usize },
    #[error("{what} must be at least {min}, got {value}")]
    TooSmall { what: &'static str, value: usize, min: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("encoding angle |p|/theta = {phi} must stay below pi/2")]
    EncodingAngle { phi: f64 },
    #[error("encoder scale theta must be positive, got {0}")]
    InvalidTheta(f64),
    #[error("pair indices must differ, got ({0}, {0})")]
    SamePair(usize),
    #[error("pair index {index} out of range for {n_pairs} pairs")]
    PairOutOfRange { index: usize, n_pairs: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("activation cache does not belong to these parameters")]
    StaleCache,
    #[error("no generator for k={k}, sign {sign}")]
    MissingGenerator { k: usize, sign: Sign },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed eigendecomposition cache: {0}")]
    CacheFormat(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
