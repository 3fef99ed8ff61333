//! Response envelope shared by every endpoint.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use kgreason::{Error, ErrorClass};
use serde::Serialize;
use serde_json::Value;

/// A finished computation, everything except timing. Cached as is.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: StatusCode,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Body {
    pub status: &'static str,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub job: Option<u64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Wire<'a> {
    status: &'static str,
    elapsed_ms: f64,
    warnings: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evidence: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    job: Option<u64>,
}

impl Outcome {
    pub fn ok(result: impl Serialize) -> Self {
        Self::ok_with(result, Vec::new())
    }

    pub fn ok_with(result: impl Serialize, warnings: Vec<String>) -> Self {
        match serde_json::to_value(result) {
            Ok(v) => Outcome {
                code: StatusCode::OK,
                body: Body {
                    status: "ok",
                    warnings,
                    result: Some(v),
                    error: None,
                    message: None,
                    evidence: None,
                    job: None,
                },
            },
            Err(e) => Self::failure(StatusCode::INTERNAL_SERVER_ERROR, "SerializationError", e.to_string(), None),
        }
    }

    pub fn failure(code: StatusCode, error: &str, message: String, evidence: Option<Value>) -> Self {
        Outcome {
            code,
            body: Body {
                status: "error",
                warnings: Vec::new(),
                result: None,
                error: Some(error.to_owned()),
                message: Some(message),
                evidence,
                job: None,
            },
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::failure(StatusCode::BAD_REQUEST, "BadRequest", message.into(), None)
    }

    pub fn pending(job: u64) -> Self {
        Outcome {
            code: StatusCode::ACCEPTED,
            body: Body {
                status: "pending",
                warnings: vec![format!("still running; poll /jobs/{job}")],
                result: None,
                error: None,
                message: None,
                evidence: None,
                job: Some(job),
            },
        }
    }

    /// Whether repeating the request would give the same answer.
    pub fn cacheable(&self) -> bool {
        self.code != StatusCode::ACCEPTED && self.code != StatusCode::INTERNAL_SERVER_ERROR
    }

    pub fn to_json(&self, elapsed_ms: f64) -> String {
        let b = &self.body;
        let wire = Wire {
            status: b.status,
            elapsed_ms,
            warnings: &b.warnings,
            result: b.result.as_ref(),
            error: b.error.as_deref(),
            message: b.message.as_deref(),
            evidence: b.evidence.as_ref(),
            job: b.job,
        };
        serde_json::to_string(&wire).expect("envelope serializes")
    }

    pub fn into_response(self, elapsed_ms: f64) -> Response {
        let json = self.to_json(elapsed_ms);
        (self.code, [(axum::http::header::CONTENT_TYPE, "application/json")], json).into_response()
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::NotFound => StatusCode::NOT_FOUND,
            ErrorClass::Unprocessable => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorClass::Invalid => StatusCode::BAD_REQUEST,
            ErrorClass::Numerical | ErrorClass::Io => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Outcome::failure(code, e.kind(), e.to_string(), e.evidence().cloned())
    }
}
