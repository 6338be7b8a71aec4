use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use delnim_core::Error;

/// Error body: `{"error": code, "message": text, "reason": code?}`.
#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<&'static str>,
}

impl ApiError {
    pub fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, error, message: message.into(), reason: None }
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown-session", format!("no session `{id}`"))
    }

    pub fn game_over() -> Self {
        Self::new(StatusCode::GONE, "game-over", "the game has already ended")
    }

    pub fn out_of_turn(expected: &str) -> Self {
        ApiError {
            reason: Some("out-of-turn"),
            ..Self::new(StatusCode::CONFLICT, "illegal-move", format!("it is the {expected}'s turn"))
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidRuleset(_)
            | Error::WrongArity { .. }
            | Error::IllegalHeapSize { .. }
            | Error::Domain(_) => StatusCode::BAD_REQUEST,
            Error::Unsupported(_) | Error::LimitExceeded(_) => StatusCode::UNPROCESSABLE_ENTITY,
            Error::IllegalMove { .. } => StatusCode::CONFLICT,
            Error::InternalContradiction(_) | Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let reason = match &e {
            Error::IllegalMove { reason } => Some(reason.code()),
            _ => None,
        };
        ApiError { status, error: e.code(), message: e.to_string(), reason }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}
