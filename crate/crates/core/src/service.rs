//! JSON-over-HTTP access to sessions for scripts and the browser console.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

use crate::dataset::{Dataset, LoadError, Violation};
use crate::goal::{solve_allocation, McgpModel};
use crate::pipeline::{allocation_model, Stage};
use crate::qualitative::{Appraisal, WeightJudgment};
use crate::session::{run_pipeline, Session};
use crate::topsis::GroupFilter;

pub const BODY_LIMIT: usize = 4 * 1024 * 1024;

const OPENAPI: &str = include_str!("openapi.json");

#[derive(Clone)]
struct Entry {
    session: Arc<Session>,
    revision: u64,
}

impl Entry {
    fn etag(&self) -> String {
        format!(
            "\"r{}-{}\"",
            self.revision,
            &self.session.provenance.artifact_hash[..12]
        )
    }
}

/// Session store shared by the handlers. With a directory set, every write is
/// also saved there as `<id>.json`.
#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Entry>>,
    next_id: AtomicU64,
    store: Option<PathBuf>,
}

impl AppState {
    pub fn new(store: Option<PathBuf>) -> Self {
        AppState {
            store,
            ..AppState::default()
        }
    }

    fn get(&self, id: &str) -> Result<Entry, ApiError> {
        self.sessions
            .read()
            .expect("session lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id}")))
    }

    fn persist(&self, id: &str, session: &Session) -> Result<(), ApiError> {
        if let Some(dir) = &self.store {
            session
                .save(&dir.join(format!("{id}.json")))
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    violations: Vec<Violation>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
            violations: Vec::new(),
        }
    }

    fn invalid(violations: Vec<Violation>) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            message: format!("{} violation(s)", violations.len()),
            violations,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if !self.violations.is_empty() {
            body["violations"] = json!(self.violations);
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<LoadError> for ApiError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Invalid(v) => ApiError::invalid(v),
            LoadError::UnsupportedVersion { .. } => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
            other => ApiError::new(StatusCode::BAD_REQUEST, other.to_string()),
        }
    }
}

fn unprocessable(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string())
}

fn bad_request(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(StatusCode::BAD_REQUEST, e.to_string())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SessionView<'a> {
    id: &'a str,
    etag: String,
    revision: u64,
    name: &'a str,
    suppliers: Vec<String>,
    attributes: usize,
    artifact_hash: &'a str,
    stage_hashes: &'a crate::session::StageHashes,
    ranking: Vec<&'a str>,
    warnings: &'a [String],
}

fn view(id: &str, entry: &Entry) -> Response {
    let s = &entry.session;
    let body = SessionView {
        id,
        etag: entry.etag(),
        revision: entry.revision,
        name: &s.dataset.manifest.name,
        suppliers: s.dataset.supplier_ids(),
        attributes: s.dataset.attributes.len(),
        artifact_hash: &s.provenance.artifact_hash,
        stage_hashes: &s.provenance.stages,
        ranking: s.artifacts.ranking.all.order(),
        warnings: &s.artifacts.warnings,
    };
    with_etag(entry, Json(body).into_response())
}

fn with_etag(entry: &Entry, mut r: Response) -> Response {
    if let Ok(v) = HeaderValue::from_str(&entry.etag()) {
        r.headers_mut().insert(header::ETAG, v);
    }
    r
}

fn wants_csv(headers: &HeaderMap) -> bool {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.contains("text/csv"))
}

fn csv_response(entry: &Entry, body: String) -> Response {
    with_etag(
        entry,
        ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], body).into_response(),
    )
}

async fn create(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body).map_err(bad_request)?;
    let ds = Dataset::from_json(text)?.validated()?;
    let session = tokio::task::spawn_blocking(move || run_pipeline(&ds))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(unprocessable)?;
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed) + 1);
    state.persist(&id, &session)?;
    let entry = Entry {
        session: Arc::new(session),
        revision: 1,
    };
    state
        .sessions
        .write()
        .expect("session lock")
        .insert(id.clone(), entry.clone());
    log::info!("created session {id}");
    let mut r = view(&id, &entry);
    *r.status_mut() = StatusCode::CREATED;
    if let Ok(v) = HeaderValue::from_str(&format!("/sessions/{id}")) {
        r.headers_mut().insert(header::LOCATION, v);
    }
    Ok(r)
}

async fn show(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    Ok(view(&id, &entry))
}

async fn export(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    Ok(with_etag(&entry, Json(&*entry.session).into_response()))
}

fn check_if_match(headers: &HeaderMap, entry: &Entry) -> Result<(), ApiError> {
    match headers.get(header::IF_MATCH).and_then(|v| v.to_str().ok()) {
        Some(tag) if tag.trim() != "*" && tag.trim() != entry.etag() => Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("etag {} is stale; current is {}", tag.trim(), entry.etag()),
        )),
        _ => Ok(()),
    }
}

/// Applies `edit` to a copy of the snapshot, recomputes from `from`, and swaps
/// the result in unless another write got there first.
async fn mutate(
    state: Arc<AppState>,
    id: String,
    headers: HeaderMap,
    from: Stage,
    edit: impl FnOnce(&mut Dataset) -> Result<(), ApiError> + Send + 'static,
) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    check_if_match(&headers, &entry)?;
    let mut ds = entry.session.dataset.clone();
    edit(&mut ds)?;
    let violations = ds.validate();
    if !violations.is_empty() {
        return Err(ApiError::invalid(violations));
    }
    let base = entry.session.clone();
    let revised = tokio::task::spawn_blocking(move || base.revise(ds, from))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(unprocessable)?;
    let updated = {
        let mut map = state.sessions.write().expect("session lock");
        let current = map
            .get_mut(&id)
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id}")))?;
        if current.revision != entry.revision {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "session changed during the update; retry",
            ));
        }
        current.session = Arc::new(revised);
        current.revision += 1;
        current.clone()
    };
    state.persist(&id, &updated.session)?;
    Ok(view(&id, &updated))
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(unprocessable)
}

async fn patch_appraisals(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let edits: Vec<Appraisal> = parse_body(&body)?;
    mutate(state, id, headers, Stage::Qualitative, move |ds| {
        for e in edits {
            match ds
                .appraisals
                .iter_mut()
                .find(|x| x.supplier == e.supplier && x.attribute == e.attribute && x.dm == e.dm)
            {
                Some(x) => x.term = e.term,
                None => ds.appraisals.push(e),
            }
        }
        Ok(())
    })
    .await
}

async fn patch_weights(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let edits: Vec<WeightJudgment> = parse_body(&body)?;
    mutate(state, id, headers, Stage::Qualitative, move |ds| {
        for e in edits {
            match ds
                .weights
                .iter_mut()
                .find(|x| x.attribute == e.attribute && x.dm == e.dm)
            {
                Some(x) => x.term = e.term,
                None => ds.weights.push(e),
            }
        }
        Ok(())
    })
    .await
}

/// JSON merge patch: objects merge key by key, `null` deletes, anything else
/// replaces.
pub fn merge_patch(target: &mut Value, patch: &Value) {
    match (target, patch) {
        (Value::Object(t), Value::Object(p)) => {
            for (k, v) in p {
                if v.is_null() {
                    t.remove(k);
                } else {
                    merge_patch(t.entry(k.clone()).or_insert(Value::Null), v);
                }
            }
        }
        (t, p) => *t = p.clone(),
    }
}

async fn patch_mcgp(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let patch: Value = parse_body(&body)?;
    mutate(state, id, headers, Stage::Allocation, move |ds| {
        let mut doc = match &ds.mcgp {
            Some(m) => serde_json::to_value(m).expect("model serializes"),
            None => json!({}),
        };
        merge_patch(&mut doc, &patch);
        let model: McgpModel = serde_json::from_value(doc).map_err(unprocessable)?;
        ds.mcgp = Some(model);
        Ok(())
    })
    .await
}

type Params = Query<HashMap<String, String>>;

fn param<T: std::str::FromStr>(q: &HashMap<String, String>, key: &str) -> Result<Option<T>, ApiError>
where
    T::Err: std::fmt::Display,
{
    q.get(key)
        .map(|v| v.parse::<T>().map_err(|e| bad_request(format!("{key}: {e}"))))
        .transpose()
}

async fn ranking(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Params,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    let group: GroupFilter = param(&q, "group")?.unwrap_or_default();
    let result = entry
        .session
        .artifacts
        .ranking
        .group(group)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("dataset has no {group} attributes")))?;
    if wants_csv(&headers) {
        return Ok(csv_response(&entry, result.to_csv()));
    }
    Ok(with_etag(&entry, Json(result).into_response()))
}

async fn scri(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Params,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    let ranking = &entry.session.artifacts.ranking;
    let inputs = ranking
        .scri_inputs()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "dataset lacks a resilience or cost group"))?;
    let alpha: Option<f64> = param(&q, "alpha")?;
    let step: Option<f64> = param(&q, "step")?;
    if let Some(alpha) = alpha {
        let values = inputs.scri(alpha).map_err(bad_request)?;
        let best = crate::topsis::argmax(&values);
        if wants_csv(&headers) {
            let mut out = String::from("alpha,supplier,scri,is_argmax\n");
            for (i, (s, v)) in inputs.suppliers.iter().zip(&values).enumerate() {
                out.push_str(&format!("{alpha},{s},{v:.6},{}\n", i == best));
            }
            return Ok(csv_response(&entry, out));
        }
        let body = json!({
            "alpha": alpha,
            "suppliers": inputs.suppliers,
            "values": values,
            "argmax": inputs.suppliers[best],
        });
        return Ok(with_etag(&entry, Json(body).into_response()));
    }
    let sweep = match (step, &ranking.scri) {
        (None, Some(s)) => s.clone(),
        (step, _) => inputs.sweep(step.unwrap_or(0.1)).map_err(bad_request)?,
    };
    if wants_csv(&headers) {
        return Ok(csv_response(&entry, sweep.to_csv()));
    }
    Ok(with_etag(&entry, Json(sweep).into_response()))
}

async fn allocation(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Params,
) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    let s = &entry.session;
    let tvp: Option<f64> = param(&q, "tvp")?;
    let plan = match tvp {
        None => s.artifacts.allocation.clone(),
        Some(tvp) => {
            if !(tvp.is_finite() && tvp >= 0.0) {
                return Err(bad_request(format!("tvp must be a nonnegative number, got {tvp}")));
            }
            match allocation_model(&s.dataset, &s.artifacts.ranking) {
                None => None,
                Some(model) => {
                    let options = s.dataset.config().allocation;
                    let model = model.with_tvp(tvp);
                    Some(
                        tokio::task::spawn_blocking(move || solve_allocation(&model, &options))
                            .await
                            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
                            .map_err(unprocessable)?,
                    )
                }
            }
        }
    };
    let plan = plan.ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "dataset has no goal-program parameters"))?;
    Ok(with_etag(&entry, Json(plan).into_response()))
}

async fn openapi() -> Response {
    ([(header::CONTENT_TYPE, "application/json")], OPENAPI).into_response()
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods(Any)
        .allow_headers(Any)
        .expose_headers([header::ETAG, header::LOCATION]);
    Router::new()
        .route("/spec", get(openapi))
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/session", get(export))
        .route("/sessions/{id}/appraisals", patch(patch_appraisals))
        .route("/sessions/{id}/weights", patch(patch_weights))
        .route("/sessions/{id}/mcgp", patch(patch_mcgp))
        .route("/sessions/{id}/ranking", get(ranking))
        .route("/sessions/{id}/scri", get(scri))
        .route("/sessions/{id}/allocation", get(allocation))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .layer(cors)
        .with_state(state)
}

/// Serves until the process is stopped, optionally preloading one dataset as
/// session `s1`.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>, preload: Option<Dataset>) -> std::io::Result<()> {
    if let Some(ds) = preload {
        let session = run_pipeline(&ds).map_err(std::io::Error::other)?;
        let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed) + 1);
        state
            .persist(&id, &session)
            .map_err(|e| std::io::Error::other(e.message))?;
        state.sessions.write().expect("session lock").insert(
            id.clone(),
            Entry {
                session: Arc::new(session),
                revision: 1,
            },
        );
        log::info!("preloaded session {id}");
    }
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
