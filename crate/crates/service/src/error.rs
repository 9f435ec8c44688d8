use mex_core::{Error, SourceSpan};
use serde_json::{json, Value};

/// An error as the HTTP layer reports it: a status and a `{"error": ...}` body.
#[derive(Clone, Debug, PartialEq)]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl ApiError {
    pub fn new(status: u16, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
            span: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(400, "bad_request", message)
    }

    pub fn not_found(what: &str, name: &str) -> Self {
        Self::new(404, "not_found", format!("unknown {what} `{name}`"))
    }

    pub fn body(&self) -> Value {
        json!({
            "error": {
                "code": self.code,
                "message": self.message,
                "span": self.span,
            }
        })
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {}", self.status, self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

/// Status and machine-readable code for an engine error.
fn classify(e: &Error) -> (u16, &'static str) {
    match e {
        Error::Syntax { .. } => (400, "syntax"),
        Error::UnknownOperator { .. } => (400, "unknown_operator"),
        Error::MalformedBinding(_) => (400, "malformed_binding"),
        Error::DuplicateBinding(_) => (400, "duplicate_binding"),
        Error::Registry(_) => (400, "registry"),
        Error::WrongShape { .. } => (400, "wrong_shape"),
        Error::Json(_) => (400, "json"),
        Error::InvalidPath { .. } => (400, "invalid_path"),
        Error::OverlappingPaths(..) => (400, "overlapping_paths"),
        Error::UnknownName(_) => (404, "unknown_name"),
        Error::DuplicateName(_) => (409, "duplicate_name"),
        Error::Arithmetic(_) => (422, "arithmetic"),
        Error::NotConverged(_) => (422, "not_converged"),
        Error::CannotDifferentiate(_) => (422, "cannot_differentiate"),
        Error::NonTermination(_) => (422, "non_termination"),
        Error::MissingHole(_) => (422, "missing_hole"),
        Error::ForeignBinding(..) => (422, "foreign_binding"),
        Error::Nonlinear(_) => (422, "nonlinear"),
        Error::Singular => (422, "singular"),
        Error::Solve(_) => (422, "solve"),
        Error::OpaqueDefinition(_) => (422, "opaque_definition"),
        Error::UnknownRule(_) => (422, "unknown_rule"),
        Error::DanglingReference(_) => (422, "dangling_reference"),
        Error::MalformedStep(_) => (422, "malformed_step"),
        Error::ConclusionMismatch { .. } => (422, "conclusion_mismatch"),
        Error::UnboundVariable(_) => (422, "unbound_variable"),
        Error::DuplicateGenerator(_) => (422, "duplicate_generator"),
        Error::NonFinite(_) => (422, "non_finite"),
        Error::NonInteger(_) => (422, "non_integer"),
        Error::Unevaluable(_) => (422, "unevaluable"),
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = classify(&e);
        ApiError {
            status,
            code: code.to_string(),
            message: e.to_string(),
            span: e.span(),
        }
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
