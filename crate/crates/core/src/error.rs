use thiserror::Error;

/// Errors raised by parsing, validation and the online solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("cost c[{index}] = {value} is not strictly positive")]
    NonPositiveCost { index: usize, value: f64 },
    #[error("negative constraint entry {value} in row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("row {row} has no strictly positive entry and can never be satisfied")]
    EmptyRow { row: usize },
    #[error("column index {col} out of range for n = {n}")]
    ColumnOutOfRange { col: usize, n: usize },
    #[error("matrix {what} is not symmetric (deviation {deviation:.3e})")]
    AsymmetricMatrix { what: String, deviation: f64 },
    #[error("matrix {what} is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { what: String, min_eig: f64 },
    #[error("B[{index}] does not dominate B[{prev}] (min eigenvalue of difference {min_eig:.3e})")]
    NonMonotoneB { index: usize, prev: usize, min_eig: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("advice length {got} does not match n = {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("advice entry x'[{index}] = {value} is negative")]
    NegativeAdvice { index: usize, value: f64 },
    #[error("confidence parameter lambda = {0} is outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("advice entry x'[{index}] = {value} exceeds the box cap of 1")]
    AdviceAboveCap { index: usize, value: f64 },
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NotConverged { sweeps: usize },
    #[error("exponent {exponent:.3} exceeds the overflow guard")]
    Overflow { exponent: f64 },
    #[error("no growth direction available for a violated constraint")]
    NoProgress,
    #[error("phase limit of {limit} exceeded")]
    PhaseRestartLimit { limit: usize },
    #[error("no feasible solution: constraint {round} cannot be satisfied under x <= 1")]
    NoFeasibleSolution { round: usize },
    #[error("advice gives zero coverage to violated row {row}; it cannot be scaled")]
    UnscalableRow { row: usize },
    #[error("offline instance is infeasible")]
    Infeasible,
    #[error("offline solver failed: {0}")]
    OfflineFailure(String),
    #[error("element {element} belongs to no set")]
    UncoverableElement { element: usize },
    #[error("malformed line {line}: {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("oracle returned row that is not violated (value {value:.6})")]
    OracleContract { value: f64 },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::MalformedDocument(e.to_string())
    }
}

/// Coarse classification shared by the CLI exit codes and the C ABI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Infeasible,
    Numeric,
    BadInput,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NoFeasibleSolution { .. } | Infeasible | UncoverableElement { .. } | UnscalableRow { .. } => {
                ErrorKind::Infeasible
            }
            NotConverged { .. }
            | Overflow { .. }
            | NoProgress
            | PhaseRestartLimit { .. }
            | OfflineFailure(_)
            | OracleContract { .. } => ErrorKind::Numeric,
            Io(_) => ErrorKind::Io,
            _ => ErrorKind::BadInput,
        }
    }

    /// Process exit code: 2 infeasible, 3 numeric failure, 4 bad input.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Infeasible => 2,
            ErrorKind::Numeric => 3,
            ErrorKind::BadInput | ErrorKind::Io => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
