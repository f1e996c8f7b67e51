use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use iiif_core::pipeline::PipelineError;
use iiif_core::request::{ParseError, RegionError, ResolveError, SizeError};
use serde::Serialize;

/// JSON error body: `{error, segment | path, detail}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub detail: String,
}

impl ApiError {
    pub fn not_found(path: &str) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            error: "not_found",
            segment: None,
            path: Some(path.to_string()),
            detail: "no resource at this path".into(),
        }
    }

    pub fn bad_segment(status: StatusCode, segment: &'static str, detail: impl Into<String>) -> Self {
        let error = if status == StatusCode::FORBIDDEN { "forbidden" } else { "invalid_request" };
        ApiError { status, error, segment: Some(segment), path: None, detail: detail.into() }
    }

    pub fn internal(path: &str, detail: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            error: "internal",
            segment: None,
            path: Some(path.to_string()),
            detail: detail.into(),
        }
    }

    pub fn method_not_allowed(path: &str) -> Self {
        ApiError {
            status: StatusCode::METHOD_NOT_ALLOWED,
            error: "method_not_allowed",
            segment: None,
            path: Some(path.to_string()),
            detail: "only GET and HEAD are served".into(),
        }
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        ApiError::bad_segment(StatusCode::BAD_REQUEST, e.segment(), e.to_string())
    }
}

impl From<ResolveError> for ApiError {
    fn from(e: ResolveError) -> Self {
        let detail = e.to_string();
        match e {
            ResolveError::Region(RegionError::RegionOutOfBounds { .. } | RegionError::EmptyRegion { .. })
            | ResolveError::Region(RegionError::EmptyImage) => {
                ApiError::bad_segment(StatusCode::BAD_REQUEST, "region", detail)
            }
            ResolveError::Size(SizeError::ExceedsServerLimits { .. }) => {
                ApiError::bad_segment(StatusCode::FORBIDDEN, "size", detail)
            }
            ResolveError::Size(SizeError::UpscaleForbidden { .. } | SizeError::ZeroSize) => {
                ApiError::bad_segment(StatusCode::BAD_REQUEST, "size", detail)
            }
        }
    }
}

impl ApiError {
    pub fn from_pipeline(e: PipelineError, path: &str) -> Self {
        match e {
            PipelineError::Resolve(r) => r.into(),
            other => ApiError::internal(path, other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(detail = %self.detail, path = ?self.path, "request failed");
        }
        let body = serde_json::to_vec(&self).expect("error body serializes");
        let mut resp = (self.status, body).into_response();
        resp.headers_mut().insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
        resp
    }
}
