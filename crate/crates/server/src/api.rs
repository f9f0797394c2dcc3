//! JSON routes.
//!
//! Every error body is `{ "code", "message", "path" }`; `path` points into
//! the request (for example `changes[2]`) when the error concerns one part
//! of it.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, Path, Request, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use anameter::scoring::ScoreError;
use anameter::{compare, merge, score, AnalysisError, Evaluation, Mode, ScoreReport, TaxonomyRef};

use crate::store::{Change, ClearedMarks, Store, StoreError, VersionedEvaluation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>, path: Option<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code: code.to_owned(),
                message: message.into(),
                path,
            },
        }
    }

    fn incompatible(e: impl ToString, path: Option<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "incompatible", e.to_string(), path)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let msg = e.to_string();
        match e {
            StoreError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, "not_found", msg, None),
            StoreError::Exists(_) => Self::new(StatusCode::CONFLICT, "exists", msg, None),
            StoreError::StaleRevision { .. } => {
                Self::new(StatusCode::CONFLICT, "stale_revision", msg, Some("revision".into()))
            }
            StoreError::Rejected { index, .. } => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invariant_violation",
                msg,
                Some(format!("changes[{index}]")),
            ),
            StoreError::UnknownTaxonomy(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "unknown_taxonomy", msg, Some("taxonomy".into()))
            }
            StoreError::Load { .. } => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_document", msg, None),
            StoreError::Io(_) => {
                tracing::error!("{msg}");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", msg, None)
            }
        }
    }
}

/// `Json` with rejections rendered in the API's error format.
pub struct ApiJson<T>(pub T);

impl<T, S> FromRequest<S> for ApiJson<T>
where
    T: DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(ApiJson(v)),
            Err(rejection) => Err(rejection_error(rejection)),
        }
    }
}

fn rejection_error(r: JsonRejection) -> ApiError {
    ApiError::new(StatusCode::BAD_REQUEST, "bad_request", r.body_text(), None)
}

pub type AppState = Arc<Store>;

pub fn routes() -> Router<AppState> {
    Router::new()
        .route("/api/taxonomies", get(list_taxonomies))
        .route("/api/taxonomies/{id}", get(get_taxonomy))
        .route("/api/evaluations", get(list_evaluations).post(create_evaluation))
        .route("/api/evaluations/{id}", get(get_evaluation))
        .route("/api/evaluations/{id}/marks", patch(patch_marks))
        .route("/api/compare", post(post_compare))
        .route("/api/merge", post(post_merge))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaxonomySummary {
    pub id: String,
    pub version: String,
    pub factors: usize,
    pub sub_factors: usize,
    pub aspects: usize,
    pub sub_aspects: usize,
    pub micro_grids: usize,
}

async fn list_taxonomies(State(store): State<AppState>) -> Json<Vec<TaxonomySummary>> {
    Json(
        store
            .registry()
            .iter()
            .map(|t| TaxonomySummary {
                id: t.id.clone(),
                version: t.version.clone(),
                factors: t.factors.len(),
                sub_factors: t.sub_factors().count(),
                aspects: t.aspects.len(),
                sub_aspects: t.sub_aspects().count(),
                micro_grids: t.micro_grid_count(),
            })
            .collect(),
    )
}

/// `{id}` is `name` or `name@version`.
async fn get_taxonomy(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let t = store
        .registry()
        .lookup(&id)
        .map_err(|e| ApiError::new(StatusCode::NOT_FOUND, "not_found", e.to_string(), None))?;
    Ok(Json(t).into_response())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationSummary {
    pub id: String,
    pub revision: Option<u64>,
    pub system: Option<String>,
    pub evaluator: Option<String>,
    pub mode: Option<Mode>,
    pub taxonomy: Option<TaxonomyRef>,
    /// Set when the file on disk cannot be loaded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

async fn list_evaluations(State(store): State<AppState>) -> Result<Json<Vec<EvaluationSummary>>, ApiError> {
    let ids = store.ids()?;
    let list = ids
        .into_iter()
        .map(|id| match store.get(&id) {
            Ok(v) => EvaluationSummary {
                revision: Some(v.revision),
                system: Some(v.evaluation.system.clone()),
                evaluator: Some(v.evaluation.evaluator.clone()),
                mode: Some(v.evaluation.mode),
                taxonomy: Some(v.evaluation.taxonomy.clone()),
                error: None,
                id,
            },
            Err(e) => EvaluationSummary {
                revision: None,
                system: None,
                evaluator: None,
                mode: None,
                taxonomy: None,
                error: Some(e.to_string()),
                id,
            },
        })
        .collect();
    Ok(Json(list))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub system: String,
    pub evaluator: String,
    pub mode: Mode,
    /// `name` or `name@version`; the bundled taxonomy when absent.
    #[serde(default)]
    pub taxonomy: Option<String>,
}

/// An evaluation together with its live score.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationView {
    pub id: String,
    pub revision: u64,
    pub evaluation: Evaluation,
    pub score: Option<ScoreReport>,
    /// Why `score` is absent, e.g. every micro-grid is N/A.
    pub score_error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cleared_marks: Vec<ClearedMarks>,
}

fn view(store: &Store, v: VersionedEvaluation, cleared_marks: Vec<ClearedMarks>) -> Result<EvaluationView, ApiError> {
    let taxonomy = store.taxonomy_of(&v.evaluation)?;
    let (score, score_error) = match score(&v.evaluation, taxonomy) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(EvaluationView {
        id: v.id,
        revision: v.revision,
        evaluation: v.evaluation,
        score,
        score_error,
        cleared_marks,
    })
}

async fn create_evaluation(
    State(store): State<AppState>,
    ApiJson(req): ApiJson<CreateRequest>,
) -> Result<(StatusCode, Json<EvaluationView>), ApiError> {
    let default_ref = anameter::default_taxonomy().reference().to_string();
    let taxonomy = req.taxonomy.as_deref().unwrap_or(&default_ref);
    let v = store.create(taxonomy, &req.system, &req.evaluator, req.mode)?;
    Ok((StatusCode::CREATED, Json(view(&store, v, Vec::new())?)))
}

async fn get_evaluation(
    State(store): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<EvaluationView>, ApiError> {
    let v = store.get(&id)?;
    Ok(Json(view(&store, v, Vec::new())?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchRequest {
    pub revision: u64,
    #[serde(default)]
    pub changes: Vec<Change>,
}

async fn patch_marks(
    State(store): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<PatchRequest>,
) -> Result<Json<EvaluationView>, ApiError> {
    let out = store.patch(&id, req.revision, &req.changes)?;
    Ok(Json(view(&store, out.current, out.cleared)?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareRequest {
    pub left: String,
    pub right: String,
}

fn score_of(store: &Store, id: &str, path: String) -> Result<ScoreReport, ApiError> {
    let v = store.get(id)?;
    let t = store.taxonomy_of(&v.evaluation)?;
    score(&v.evaluation, t).map_err(|e: ScoreError| ApiError::incompatible(format!("{id}: {e}"), Some(path)))
}

async fn post_compare(
    State(store): State<AppState>,
    ApiJson(req): ApiJson<CompareRequest>,
) -> Result<Response, ApiError> {
    let left = score_of(&store, &req.left, "left".into())?;
    let right = score_of(&store, &req.right, "right".into())?;
    let report = compare(&left, &right).map_err(|e| ApiError::incompatible(e, None))?;
    Ok(Json(report).into_response())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeRequest {
    pub evaluations: Vec<String>,
}

async fn post_merge(
    State(store): State<AppState>,
    ApiJson(req): ApiJson<MergeRequest>,
) -> Result<Response, ApiError> {
    let evals = req
        .evaluations
        .iter()
        .map(|id| store.get(id).map(|v| v.evaluation))
        .collect::<Result<Vec<_>, _>>()?;
    let first = evals
        .first()
        .ok_or_else(|| ApiError::incompatible(AnalysisError::Empty, Some("evaluations".into())))?;
    let taxonomy = store.taxonomy_of(first)?;
    let merged = merge(&evals, taxonomy).map_err(|e| ApiError::incompatible(e, None))?;
    Ok(Json(merged).into_response())
}
