use axum::http::StatusCode;
use mog_core::cover::CoverError;
use mog_core::graph::GraphError;
use mog_core::lens::LensError;
use mog_core::mapper::MogError;
use serde::Serialize;

/// Structured error body: `{"error": {"status", "stage", "message", "line"?, "hint"?}}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub stage: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
}

impl ApiError {
    pub fn new(status: StatusCode, stage: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            stage,
            message: message.into(),
            line: None,
            hint: None,
        }
    }

    pub fn hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "lookup",
            format!("no {what} with id `{id}`"),
        )
    }

    pub fn graph(e: &GraphError) -> Self {
        Self {
            line: e.line(),
            ..Self::new(StatusCode::UNPROCESSABLE_ENTITY, "parse", e.to_string())
        }
    }

    pub fn cover(e: &CoverError) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "cover", e.to_string())
    }

    pub fn lens(e: &LensError, graph_id: &str) -> Self {
        let status = if e.is_undefined_on_graph() {
            StatusCode::CONFLICT
        } else if matches!(
            e,
            LensError::NotConverged { .. } | LensError::NonFinite { .. }
        ) {
            StatusCode::INTERNAL_SERVER_ERROR
        } else {
            StatusCode::UNPROCESSABLE_ENTITY
        };
        let err = Self::new(status, "lens", e.to_string());
        match e {
            LensError::Disconnected { .. } | LensError::KernelMultiplicity { .. } => {
                err.hint(format!(
                "POST /graphs/{graph_id}/mog evaluates this lens on the largest connected component"
            ))
            }
            LensError::IsolatedNode { .. } => {
                err.hint("remove isolated nodes or choose a geodesic lens")
            }
            _ => err,
        }
    }

    pub fn mog(e: &MogError, graph_id: &str) -> Self {
        match e {
            MogError::Lens(l) => Self::lens(l, graph_id),
            MogError::Cover(c) => Self::cover(c),
            MogError::LensSize { .. } => {
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.stage(), e.to_string())
            }
        }
    }

    pub fn body(&self) -> Vec<u8> {
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        #[derive(Serialize)]
        struct Body<'a> {
            status: u16,
            #[serde(flatten)]
            inner: &'a ApiError,
        }
        serde_json::to_vec(&Wrapper {
            error: Body {
                status: self.status.as_u16(),
                inner: self,
            },
        })
        .expect("error serializes")
    }
}
