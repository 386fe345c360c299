use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use netpulse_core::data::DataError;
use netpulse_core::session::{ConfigViolation, SessionError};
use serde::Serialize;
use serde_json::{json, Value};

/// Machine-readable error codes. Every non-2xx response carries one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    ConfigInvalid,
    DatasetMalformed,
    IllegalTransition,
    NotFound,
    InputInvalid,
    BadRequest,
    PayloadTooLarge,
    SessionLimit,
    MethodNotAllowed,
    Internal,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 10] = [
        ErrorCode::ConfigInvalid,
        ErrorCode::DatasetMalformed,
        ErrorCode::IllegalTransition,
        ErrorCode::NotFound,
        ErrorCode::InputInvalid,
        ErrorCode::BadRequest,
        ErrorCode::PayloadTooLarge,
        ErrorCode::SessionLimit,
        ErrorCode::MethodNotAllowed,
        ErrorCode::Internal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::ConfigInvalid => "CONFIG_INVALID",
            ErrorCode::DatasetMalformed => "DATASET_MALFORMED",
            ErrorCode::IllegalTransition => "ILLEGAL_TRANSITION",
            ErrorCode::NotFound => "NOT_FOUND",
            ErrorCode::InputInvalid => "INPUT_INVALID",
            ErrorCode::BadRequest => "BAD_REQUEST",
            ErrorCode::PayloadTooLarge => "PAYLOAD_TOO_LARGE",
            ErrorCode::SessionLimit => "SESSION_LIMIT",
            ErrorCode::MethodNotAllowed => "METHOD_NOT_ALLOWED",
            ErrorCode::Internal => "INTERNAL",
        }
    }

    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::ConfigInvalid
            | ErrorCode::DatasetMalformed
            | ErrorCode::InputInvalid
            | ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::IllegalTransition => StatusCode::CONFLICT,
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::PayloadTooLarge => StatusCode::PAYLOAD_TOO_LARGE,
            ErrorCode::SessionLimit => StatusCode::TOO_MANY_REQUESTS,
            ErrorCode::MethodNotAllowed => StatusCode::METHOD_NOT_ALLOWED,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(ErrorCode::NotFound, format!("no {what} with id {id}")).with_detail(json!({ "id": id }))
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, message)
    }

    pub fn config(violations: &[ConfigViolation]) -> Self {
        let message = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        Self::new(ErrorCode::ConfigInvalid, message).with_detail(json!({ "violations": violations }))
    }

    pub fn config_field(field: &str, message: impl Into<String>) -> Self {
        Self::config(&[ConfigViolation {
            field: field.to_owned(),
            message: message.into(),
        }])
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Internal, message)
    }
}

impl From<DataError> for ApiError {
    fn from(e: DataError) -> Self {
        let err = ApiError::new(ErrorCode::DatasetMalformed, e.to_string());
        match e.locator() {
            Some(loc) => err.with_detail(serde_json::to_value(loc).unwrap_or(Value::Null)),
            None => err,
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Config(v) => ApiError::config(&v),
            SessionError::IllegalTransition { status, command } => {
                ApiError::new(ErrorCode::IllegalTransition, e.to_string())
                    .with_detail(json!({ "status": status, "command": command }))
            }
            SessionError::TopologyLocked { status } => {
                ApiError::new(ErrorCode::IllegalTransition, e.to_string()).with_detail(json!({ "status": status }))
            }
            SessionError::Shape(_) | SessionError::Input(_) => ApiError::new(ErrorCode::InputInvalid, e.to_string()),
            SessionError::NotRunning { .. } | SessionError::EventLimit { .. } | SessionError::Trace(_) => {
                ApiError::internal(e.to_string())
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
