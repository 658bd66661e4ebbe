//! HTTP routes. Cell indices in requests and responses are 1-based.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use pcdecomp_core::extend::{approximate_once, IterationStep};
use pcdecomp_core::io::{check_labels, default_labels};
use pcdecomp_core::report::{analyze, Analysis};
use pcdecomp_core::{PcError, PcMatrix, Tolerance};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::session::{Session, SessionStore, StoreError};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    current_revision: Option<u64>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into(), current_revision: None }
    }

    fn invalid_judgment(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_judgment", message)
    }

    fn conflict(current: u64, sent: u64) -> Self {
        Self {
            current_revision: Some(current),
            ..Self::new(
                StatusCode::CONFLICT,
                "revision_conflict",
                format!("revision {sent} is stale, the session is at {current}"),
            )
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": { "code": self.code, "message": self.message } });
        if let Some(r) = self.current_revision {
            body["error"]["current_revision"] = r.into();
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<PcError> for ApiError {
    fn from(e: PcError) -> Self {
        let code = match e {
            PcError::NotSquare { .. }
            | PcError::DimensionTooSmall { .. }
            | PcError::DimensionMismatch { .. }
            | PcError::WrongDimension { .. }
            | PcError::LabelMismatch { .. } => "invalid_dimension",
            PcError::Overflow { .. } => "numeric_overflow",
            _ => "invalid_matrix",
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, "unknown_session", e.to_string()),
            _ => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_failure", e.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "malformed_request", e.body_text())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub labels: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
    pub revision: u64,
}

#[derive(Debug, Deserialize)]
pub struct EntryUpdate {
    pub i: usize,
    pub j: usize,
    pub value: f64,
    pub revision: u64,
}

#[derive(Debug, Deserialize)]
pub struct RevisionOnly {
    pub revision: u64,
}

#[derive(Debug, Deserialize)]
pub struct AnalyzeRequest {
    pub matrix: Vec<Vec<f64>>,
    pub labels: Option<Vec<String>>,
}

/// Analysis of a session matrix plus the cells still awaiting a judgment.
#[derive(Debug, Serialize, Deserialize)]
pub struct SessionAnalysis {
    pub revision: u64,
    pub matrix: Vec<Vec<f64>>,
    #[serde(flatten)]
    pub analysis: Analysis,
    pub unjudged: Vec<[usize; 2]>,
    pub complete: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ApproximationResult {
    pub previous: Vec<Vec<f64>>,
    pub step: IterationStep,
    #[serde(flatten)]
    pub after: SessionAnalysis,
}

fn session_analysis(s: &Session) -> Result<SessionAnalysis, ApiError> {
    let m = s.pc_matrix()?;
    let analysis = analyze(&m, &s.labels, &Tolerance::default())?;
    let unjudged = s.unjudged();
    Ok(SessionAnalysis {
        revision: s.revision,
        matrix: s.matrix.clone(),
        analysis,
        complete: unjudged.is_empty(),
        unjudged,
    })
}

fn check_revision(s: &Session, sent: u64) -> Result<(), ApiError> {
    if s.revision != sent {
        Err(ApiError::conflict(s.revision, sent))
    } else {
        Ok(())
    }
}

async fn create_session(
    State(store): State<Arc<SessionStore>>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let Json(req) = body?;
    check_labels(&req.labels, req.labels.len())
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_labels", e.to_string()))?;
    let s = store.insert(Session::new(req.labels)?)?;
    Ok((StatusCode::CREATED, Json(Created { id: s.id, revision: s.revision })))
}

async fn get_session(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<Session> {
    Ok(Json(store.get(&id)?))
}

async fn put_entry(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    body: Result<Json<EntryUpdate>, JsonRejection>,
) -> ApiResult<SessionAnalysis> {
    let Json(req) = body?;
    if !req.value.is_finite() || req.value <= 0.0 {
        return Err(ApiError::invalid_judgment(format!(
            "judgment must be a positive finite number, got {}",
            req.value
        )));
    }
    let (_, s) = store.update(&id, |s| {
        check_revision(s, req.revision)?;
        let n = s.n();
        if req.i == 0 || req.j == 0 || req.i > n || req.j > n || req.i == req.j {
            return Err(ApiError::invalid_judgment(format!(
                "cell ({}, {}) is not an off-diagonal cell of a {n}x{n} matrix",
                req.i, req.j
            )));
        }
        s.apply_judgment(req.i, req.j, req.value)?;
        Ok::<_, ApiError>(())
    })?;
    Ok(Json(session_analysis(&s)?))
}

async fn get_analysis(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
) -> ApiResult<SessionAnalysis> {
    Ok(Json(session_analysis(&store.get(&id)?)?))
}

async fn post_approximate(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    body: Result<Json<RevisionOnly>, JsonRejection>,
) -> ApiResult<ApproximationResult> {
    let Json(req) = body?;
    let ((previous, step), s) = store.update(&id, |s| {
        check_revision(s, req.revision)?;
        let before = s.pc_matrix()?;
        let next = approximate_once(&before)?;
        s.apply_approximation(&next)?;
        let after = s.pc_matrix()?;
        let step = IterationStep {
            iteration: s.approximation_count(),
            inconsistency: after.inconsistency(),
            max_change: after.max_relative_diff(&before),
        };
        Ok::<_, ApiError>((before.to_rows(), step))
    })?;
    Ok(Json(ApproximationResult { previous, step, after: session_analysis(&s)? }))
}

async fn analyze_matrix(body: Result<Json<AnalyzeRequest>, JsonRejection>) -> ApiResult<Analysis> {
    let Json(req) = body?;
    let m = PcMatrix::new(&req.matrix, 1e-9)?;
    let labels = match req.labels {
        Some(l) => {
            check_labels(&l, m.n()).map_err(|e| {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_labels", e.to_string())
            })?;
            l
        }
        None => default_labels(m.n()),
    };
    Ok(Json(analyze(&m, &labels, &Tolerance::default())?))
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/entry", put(put_entry))
        .route("/sessions/{id}/analysis", get(get_analysis))
        .route("/sessions/{id}/approximate", post(post_approximate))
        .route("/matrices/analyze", post(analyze_matrix))
        .with_state(store)
}
