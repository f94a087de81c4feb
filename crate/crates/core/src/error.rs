use std::fmt;

use thiserror::Error;

use crate::syntax::Level;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unbound variable at level {level} (substitution has {len} entries)")]
    UnboundVariable { level: Level, len: usize },
    #[error("operation is only defined on syntax without invertibility constructors")]
    NotCatt,
}

/// Coarse classification of failures, stable enough to match on in tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Parse,
    IllFormed,
    DuplicateVariable,
    UnknownIdentifier,
    Shadowing,
    NotPs,
    NotFull,
    TypeMismatch,
    NotInvertible,
    CoindArity,
    CanWitness,
    RecContext,
    IhOutsideRec,
    Unification,
    DimensionMismatch,
    NotCategorical,
    Bound,
}

impl ErrorKind {
    pub fn label(self) -> &'static str {
        match self {
            ErrorKind::Parse => "parse error",
            ErrorKind::IllFormed => "ill-formed syntax",
            ErrorKind::DuplicateVariable => "duplicate variable",
            ErrorKind::UnknownIdentifier => "unknown identifier",
            ErrorKind::Shadowing => "shadowing",
            ErrorKind::NotPs => "not a pasting diagram",
            ErrorKind::NotFull => "type not full",
            ErrorKind::TypeMismatch => "type mismatch",
            ErrorKind::NotInvertible => "not an invertibility structure",
            ErrorKind::CoindArity => "coind arity",
            ErrorKind::CanWitness => "can witness",
            ErrorKind::RecContext => "rec context",
            ErrorKind::IhOutsideRec => "inductive hypothesis outside rec",
            ErrorKind::Unification => "unification failure",
            ErrorKind::DimensionMismatch => "dimension mismatch",
            ErrorKind::NotCategorical => "not categorical",
            ErrorKind::Bound => "bound exceeded",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A failure with its category, a message and the stack of judgments that
/// were being checked when it occurred (innermost first).
#[derive(Debug, Clone, Error)]
pub struct Error {
    pub kind: ErrorKind,
    pub message: String,
    pub trace: Vec<String>,
}

impl Error {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Error {
        Error {
            kind,
            message: message.into(),
            trace: Vec::new(),
        }
    }

    pub fn within(mut self, frame: impl Into<String>) -> Error {
        self.trace.push(frame.into());
        self
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)?;
        for frame in &self.trace {
            write!(f, "\n  while {frame}")?;
        }
        Ok(())
    }
}

impl From<SyntaxError> for Error {
    fn from(e: SyntaxError) -> Error {
        Error::new(ErrorKind::IllFormed, e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[macro_export]
macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::new($crate::error::ErrorKind::$kind, format!($($arg)*)))
    };
}
