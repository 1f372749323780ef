use thiserror::Error;

use crate::polyring::MultError;

/// Every failure the engine can report. Each variant maps to one CLI exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("i/o error: {0}")]
    Io(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("not a complex: d^{} after d^{} is nonzero at entry ({row}, {col})", degree + 1, degree)]
    NotAComplex { degree: i32, row: usize, col: usize },
    #[error("not a chain map: square in degree {degree} fails at entry ({row}, {col})")]
    NotAChainMap { degree: i32, row: usize, col: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("descent failure: {0}")]
    DescentFailure(String),
    #[error("symmetry failure at entry ({row}, {col}): {detail}")]
    SymmetryFailure { row: usize, col: usize, detail: String },
    #[error("pairing is degenerate at {attempts} random points (last point {point})")]
    Degenerate { attempts: usize, point: String },
    #[error("fiber rank drop at {point}: fiber dimension {fiber} exceeds generic rank {generic}")]
    FiberRankDrop { point: String, fiber: usize, generic: usize },
    #[error("window overflow: {0}")]
    WindowOverflow(String),
    #[error("not a cocycle: {0}")]
    NotACocycle(String),
    #[error("class {index} is not globally representable by polynomial data")]
    NotGloballyRepresentable { index: usize },
    #[error("index {index} out of range (dimension {available})")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("unstable cohomology at window {window}: dims {at_window:?} vs {at_next:?}; retry with window {suggested}")]
    Unstable { window: u32, suggested: u32, at_window: Vec<usize>, at_next: Vec<usize> },

    #[error("no lift: {0}")]
    NoLift(String),
    #[error("descent obstruction: {0}")]
    DescentObstruction(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable short name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::UnknownName(_) => "UnknownName",
            Error::Io(_) => "IoError",
            Error::DegreeMismatch(_) => "DegreeMismatch",
            Error::NotAComplex { .. } => "NotAComplex",
            Error::NotAChainMap { .. } => "NotAChainMap",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::DescentFailure(_) => "DescentFailure",
            Error::SymmetryFailure { .. } => "SymmetryFailure",
            Error::Degenerate { .. } => "Degenerate",
            Error::FiberRankDrop { .. } => "FiberRankDrop",
            Error::WindowOverflow(_) => "WindowOverflow",
            Error::NotACocycle(_) => "NotACocycle",
            Error::NotGloballyRepresentable { .. } => "NotGloballyRepresentable",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::Unstable { .. } => "Unstable",
            Error::NoLift(_) => "NoLift",
            Error::DescentObstruction(_) => "DescentObstruction",
            Error::Internal(_) => "InternalError",
        }
    }

    /// Process exit code: 1 parse, 2 validation, 3 instability, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::UnknownName(_) | Error::Io(_) => 1,
            Error::DegreeMismatch(_)
            | Error::NotAComplex { .. }
            | Error::NotAChainMap { .. }
            | Error::ShapeMismatch(_)
            | Error::DescentFailure(_)
            | Error::SymmetryFailure { .. }
            | Error::Degenerate { .. }
            | Error::FiberRankDrop { .. }
            | Error::NotACocycle(_)
            | Error::NotGloballyRepresentable { .. }
            | Error::IndexOutOfRange { .. } => 2,
            Error::Unstable { .. } | Error::WindowOverflow(_) => 3,
            Error::NoLift(_) | Error::DescentObstruction(_) | Error::Internal(_) => 4,
        }
    }
}

impl From<MultError> for Error {
    fn from(e: MultError) -> Self {
        match e {
            MultError::WindowOverflow { .. } => Error::WindowOverflow(e.to_string()),
            MultError::DegreeMismatch { .. } => Error::DegreeMismatch(e.to_string()),
            MultError::Incompatible(_) => Error::Internal(e.to_string()),
        }
    }
}
