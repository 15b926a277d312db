use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for dimension {dim} ({context})")]
    IndexOutOfRange {
        index: usize,
        dim: usize,
        context: String,
    },

    #[error("antisymmetry violation: conflicting entries for bracket ({i}, {j})")]
    AntisymmetryViolation { i: usize, j: usize },

    #[error(
        "Jacobi identity violated on triple ({}, {}, {}): residual max-norm {norm:.3e} exceeds {tolerance:.3e}, residual vector {residual:?}",
        triple.0, triple.1, triple.2
    )]
    JacobiViolation {
        triple: (usize, usize, usize),
        residual: Vec<f64>,
        norm: f64,
        tolerance: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subspaces live in different ambient spaces ({0} vs {1})")]
    AmbientMismatch(usize, usize),

    #[error("subspace is not an ideal: bracket residual {residual:.3e}")]
    NotAnIdeal { residual: f64 },

    #[error("solvability criteria disagree: Cartan test says {cartan}, derived series says {derived}")]
    CriterionDisagreement { cartan: bool, derived: bool },

    #[error("rank decision ambiguous in {context}: singular value {value:.3e} within a factor 10 of threshold {threshold:.3e}")]
    RankAmbiguous {
        context: String,
        value: f64,
        threshold: f64,
    },

    #[error("simple-ideal decomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("Killing form restricted to ideal is borderline: eigenvalue {eigenvalue:.3e} within tolerance of zero")]
    IndefiniteBorderline { eigenvalue: f64 },

    #[error("Levi complement not found: best closure residual {residual:.3e}")]
    LeviNotFound { residual: f64 },

    #[error("coadjoint flow diverged at time {time}")]
    FlowDiverged { time: f64 },

    #[error("orbit is not bounded; decomposition requires a fixed-point or compact verdict")]
    NotBounded,

    #[error("witness replay failed: observed growth {observed:.3e} below half the certified model {model:.3e} at t = {time}")]
    WitnessReplayFailed {
        time: f64,
        observed: f64,
        model: f64,
    },

    #[error("unknown algebra '{name}'; valid names: {}", valid.join(", "))]
    UnknownAlgebra { name: String, valid: Vec<String> },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::InvalidInput(_)
            | Error::IndexOutOfRange { .. }
            | Error::AntisymmetryViolation { .. }
            | Error::JacobiViolation { .. }
            | Error::DimensionMismatch { .. }
            | Error::AmbientMismatch(..)
            | Error::NotAnIdeal { .. }
            | Error::NotBounded
            | Error::UnknownAlgebra { .. } => 1,
            Error::CriterionDisagreement { .. }
            | Error::RankAmbiguous { .. }
            | Error::DecompositionFailed(_)
            | Error::IndefiniteBorderline { .. }
            | Error::LeviNotFound { .. }
            | Error::FlowDiverged { .. }
            | Error::WitnessReplayFailed { .. } => 2,
            Error::Internal(_) => 3,
        }
    }
}
