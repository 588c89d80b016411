use thiserror::Error;

/// Errors raised by the library. Verification failures that are part of a
/// certificate (a POVM that does not sum to the identity, a fiducial that is
/// not a SIC) are reported in the returned reports instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2 (got {0})")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not traceless (trace {0:e})")]
    NotTraceless(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("not a Bloch vector: smallest eigenvalue {0} is below -1")]
    OutsideBlochBody(f64),

    #[error("element is not on the outer sphere (norm {0})")]
    NotOnOuterSphere(f64),

    #[error("zero matrix has no eigenvalue extremes")]
    ZeroMatrix,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("product formulas take 2 or 3 operands (got {0})")]
    OperandCount(usize),

    #[error("operation requires odd dimension (got d = {0})")]
    EvenDimension(usize),

    #[error("phase for ({p1}, {p2}) violates exp(2i theta) = {sign} (self-paired index)")]
    SelfPairedPhase { p1: usize, p2: usize, sign: i32 },

    #[error("phases for ({p1}, {p2}) and its partner violate the pairing constraint")]
    InconsistentPhasePair { p1: usize, p2: usize },

    #[error("no phase given for ({p1}, {p2}) or its partner")]
    MissingPhase { p1: usize, p2: usize },

    #[error("POVM is not informationally complete (rank {rank} < {required})")]
    NotInformationallyComplete { rank: usize, required: usize },

    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),

    #[error("basis {index} is not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { index: usize, deviation: f64 },

    #[error("vector is zero")]
    ZeroVector,

    #[error("{path}: {message}")]
    Decode { path: String, message: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
