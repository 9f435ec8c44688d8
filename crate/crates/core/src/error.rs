use std::fmt;

use serde::{Deserialize, Serialize};

/// Byte range into a source string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    pub fn point(at: usize) -> Self {
        SourceSpan { start: at, end: at }
    }

    pub fn join(self, other: SourceSpan) -> Self {
        SourceSpan {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {span}: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("unknown operator `{name}` at {span}")]
    UnknownOperator { name: String, span: SourceSpan },
    #[error("malformed binding: {0}")]
    MalformedBinding(String),
    #[error("duplicate binding for `{0}`")]
    DuplicateBinding(String),
    #[error("operator registry: {0}")]
    Registry(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("simplifier did not converge after {0} passes")]
    NotConverged(usize),
    #[error("cannot differentiate `{0}`")]
    CannotDifferentiate(String),
    #[error("beta reduction exceeded the step limit of {0}")]
    NonTermination(usize),
    #[error("invalid path at step {step}: {message}")]
    InvalidPath { step: usize, message: String },
    #[error("overlapping hole paths {0} and {1}")]
    OverlappingPaths(String, String),
    #[error("no answer proposed for hole {0}")]
    MissingHole(u32),
    #[error("binding for `{0}` is not a parameter of rule {1}")]
    ForeignBinding(String, String),
    #[error("equation is not linear in the unknowns: {0}")]
    Nonlinear(String),
    #[error("system has no unique solution")]
    Singular,
    #[error("{0}")]
    Solve(String),
    #[error("cannot redefine opaque function `{0}`")]
    OpaqueDefinition(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("dangling reference {0}")]
    DanglingReference(String),
    #[error("malformed step: {0}")]
    MalformedStep(String),
    #[error("expansion concludes {found}, expected {expected}")]
    ConclusionMismatch { expected: String, found: String },
    #[error("unbound variable `{0}` in comprehension")]
    UnboundVariable(String),
    #[error("generator variable `{0}` is bound twice")]
    DuplicateGenerator(String),
    #[error("generator source is not a finite set: {0}")]
    NonFinite(String),
    #[error("range endpoint is not an integer: {0}")]
    NonInteger(String),
    #[error("condition does not evaluate to a truth value: {0}")]
    Unevaluable(String),
    #[error("expected {expected}, found {found}")]
    WrongShape { expected: String, found: String },
    #[error("json: {0}")]
    Json(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("name `{0}` is already bound")]
    DuplicateName(String),
}

impl Error {
    pub fn syntax(message: impl Into<String>, span: SourceSpan) -> Self {
        Error::Syntax {
            message: message.into(),
            span,
        }
    }

    pub fn wrong_shape(expected: impl Into<String>, found: impl fmt::Display) -> Self {
        Error::WrongShape {
            expected: expected.into(),
            found: found.to_string(),
        }
    }

    /// The source span, for errors raised while reading source text.
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            Error::Syntax { span, .. } | Error::UnknownOperator { span, .. } => Some(*span),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
