use thiserror::Error;

/// Errors raised by the numerical kernel, the state and detector constructors,
/// and the evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not Hermitian: {0}")]
    HermiticityViolation(String),

    #[error("not positive semidefinite (min eigenvalue {min_eig:e})")]
    PsdViolation { min_eig: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceViolation { trace: f64 },

    #[error("not a probability vector: {0}")]
    NormalizationViolation(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("states {0} and {1} are not distinct")]
    NotDistinct(usize, usize),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("partial detector elements exceed the identity (min eigenvalue of I - sum {min_eig:e})")]
    PartialsExceedIdentity { min_eig: f64 },

    #[error("partial detector elements sum to the identity")]
    PartialsEqualIdentity,

    #[error("copy split n1 = {n1}, n2 = {n2} leaves an empty block (n = {n}, w1 = {w1})")]
    SplitTooSmall { n: usize, w1: f64, n1: usize, n2: usize },

    #[error("not a valid detector: {0}")]
    InvalidDetector(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("{what} has imaginary part {residue:e}; expected a real value")]
    ImaginaryResidue { what: String, residue: f64 },

    #[error("consistency check failed: {0}")]
    ConsistencyCheckFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
