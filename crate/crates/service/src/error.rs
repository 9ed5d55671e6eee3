use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::{json, Value};
use thiserror::Error;

use subscope_core::charts::ChartError;
use subscope_core::filters::FilterError;
use subscope_core::ingest::IngestError;
use subscope_core::metrics::MetricsError;

use crate::session::EditError;
use subscope_core::decisions::DecisionError;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("unknown or expired session")]
    SessionNotFound,
    #[error("unknown journal key `{0}`")]
    JournalNotFound(String),
    #[error("unknown chart id `{0}`")]
    ChartNotFound(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("invalid status `{0}`")]
    InvalidStatus(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("upload exceeds {0} bytes")]
    PayloadTooLarge(usize),
}

impl From<EditError> for ApiError {
    fn from(e: EditError) -> Self {
        match e {
            EditError::Decision(DecisionError::UnknownKey(k)) => ApiError::JournalNotFound(k),
            EditError::Metrics(m) => ApiError::Metrics(m),
        }
    }
}

impl From<ChartError> for ApiError {
    fn from(e: ChartError) -> Self {
        match e {
            ChartError::UnknownChartId(id) => ApiError::ChartNotFound(id),
            other => ApiError::BadRequest(other.to_string()),
        }
    }
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::SessionNotFound | ApiError::JournalNotFound(_) | ApiError::ChartNotFound(_) => {
                StatusCode::NOT_FOUND
            }
            ApiError::InvalidStatus(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::PayloadTooLarge(_) => StatusCode::PAYLOAD_TOO_LARGE,
            ApiError::Ingest(_) | ApiError::Filter(_) | ApiError::Metrics(_) | ApiError::BadRequest(_) => {
                StatusCode::BAD_REQUEST
            }
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::SessionNotFound => "session_not_found",
            ApiError::JournalNotFound(_) => "journal_not_found",
            ApiError::ChartNotFound(_) => "chart_not_found",
            ApiError::Ingest(IngestError::MissingRequiredColumn(_)) => "missing_required_column",
            ApiError::Ingest(IngestError::RowParseError { .. }) => "row_parse_error",
            ApiError::Ingest(_) => "invalid_csv",
            ApiError::Filter(_) => "invalid_filter",
            ApiError::Metrics(_) => "invalid_metrics",
            ApiError::InvalidStatus(_) => "invalid_status",
            ApiError::BadRequest(_) => "bad_request",
            ApiError::PayloadTooLarge(_) => "payload_too_large",
        }
    }

    fn detail(&self) -> Value {
        match self {
            ApiError::Ingest(IngestError::MissingRequiredColumn(c)) => json!({ "column": c }),
            ApiError::Ingest(IngestError::RowParseError { line, column, reason }) => {
                json!({ "line": line, "column": column, "reason": reason })
            }
            _ => Value::Null,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "error": self.code(),
            "message": self.to_string(),
            "detail": self.detail(),
        });
        (self.status(), Json(body)).into_response()
    }
}
