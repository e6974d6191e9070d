use thiserror::Error;

use crate::assignment::PrefixAssignment;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("clause contains a complementary pair on x{var}")]
    Tautology { var: u32 },

    #[error("x{var} is already bound")]
    AlreadyBound { var: u32 },

    #[error("instance has {n} variables, at least {min} required")]
    InputTooSmall { n: usize, min: usize },

    #[error("{n} variables exceeds the supported maximum of {max}")]
    TooManyVariables { n: usize, max: usize },

    #[error("kmin={kmin} outside [1, {n}]")]
    KminOutOfRange { kmin: usize, n: usize },

    #[error("prefix length {k} outside [{min}, {n}]")]
    PrefixLengthOutOfRange { k: usize, min: usize, n: usize },

    #[error("enumeration over {n} variables exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("clause with {len} literals passed to the 3-limited closure")]
    OversizedClause { len: usize },

    #[error("model set is empty")]
    EmptyModelSet,

    #[error("model of length {found} in an instance with n={expected}")]
    ModelLength { expected: usize, found: usize },

    #[error("duplicate model {model}")]
    DuplicateModel { model: String },

    #[error("no extension of prefix {prefix} satisfies the closed candidate formula")]
    WitnessExtractionFailed { prefix: PrefixAssignment },

    #[error("witness {witness} from prefix {prefix} failed verification")]
    WitnessRejected {
        prefix: PrefixAssignment,
        witness: String,
    },

    #[error("generator gave up after {attempts} attempts")]
    GeneratorExhausted { attempts: usize },

    #[error("generator parameter out of range: {0}")]
    GeneratorRange(String),

    #[error("deadline of {limit_ms} ms exceeded")]
    Timeout { limit_ms: u128 },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for errors that indicate the pipeline contradicted itself rather
    /// than rejected its input.
    pub fn is_inconsistency(&self) -> bool {
        matches!(
            self,
            Error::WitnessExtractionFailed { .. } | Error::WitnessRejected { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

/// A diagnostic from one of the line-oriented text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: unexpected character {found:?} at column {column}")]
    BadCharacter {
        line: usize,
        column: usize,
        found: char,
    },

    #[error(
        "line {line}: model has length {found}, expected {expected} (set by line {first_line})"
    )]
    RaggedLength {
        line: usize,
        expected: usize,
        found: usize,
        first_line: usize,
    },

    #[error("line {line}: duplicate of the model on line {first_line}")]
    DuplicateModel { line: usize, first_line: usize },

    #[error("line {line}: {n} variables is outside the supported range [1, {max}]")]
    VariableCount { line: usize, n: usize, max: usize },

    #[error("no models in input")]
    Empty,

    #[error("line {line}: {message}")]
    Dimacs { line: usize, message: String },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::BadCharacter { line, .. }
            | ParseError::RaggedLength { line, .. }
            | ParseError::DuplicateModel { line, .. }
            | ParseError::VariableCount { line, .. }
            | ParseError::Dimacs { line, .. } => Some(*line),
            ParseError::Empty => None,
        }
    }
}
