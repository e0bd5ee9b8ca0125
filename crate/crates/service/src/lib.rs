//! HTTP API over a single workflow session.
//!
//! | method | path | body |
//! |---|---|---|
//! | GET | `/health` | [`Health`] |
//! | GET | `/state` | [`StateView`] |
//! | GET | `/candidates/insights` | [`CandidateList`] of [`InsightView`] |
//! | GET | `/candidates/exceptions` | [`CandidateList`] of [`ExceptionView`] |
//! | POST | `/decisions` | [`DecisionRequest`] in, [`StateView`] out |
//! | GET | `/report` | report document (`?format=markdown` for Markdown) |
//! | GET | `/trace` | decision trace document |
//! | GET | `/patterns/{key}` | [`PatternView`] |
//!
//! Errors are [`ErrorBody`] with status 404 (no session, unknown pattern),
//! 409 (wrong phase, stale sequence) or 422 (not a presented candidate,
//! unreadable polynomial).

mod views;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::sync::{Arc, RwLock};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tower_http::services::ServeDir;

use lad_core::boolring::{parse_poly, MonomialOrder};
use lad_core::dataset::{PatternTable, RecordTable};
use lad_core::workflow::{
    final_report, start_session, ExceptionDecision, ExcisionDoc, Phase, ReportContext, SessionState, WorkflowError,
};
use lad_core::TOOL_VERSION;

pub use views::*;

/// What a session is started from.
pub struct SessionConfig {
    pub patterns: PatternTable,
    pub order: MonomialOrder,
    pub records: Option<RecordTable>,
    pub context: ReportContext,
}

struct ApiSession {
    id: String,
    sequence: u64,
    /// Every accepted mutation pushes a snapshot.
    snapshots: Vec<Arc<SessionState>>,
    records: Option<Arc<RecordTable>>,
    context: ReportContext,
}

impl ApiSession {
    fn current(&self) -> Arc<SessionState> {
        self.snapshots.last().expect("a session has a snapshot").clone()
    }
}

/// Shared handle; clones refer to the same session.
#[derive(Clone, Default)]
pub struct AppState {
    session: Arc<RwLock<Option<ApiSession>>>,
    ui: bool,
}

impl AppState {
    pub fn new(config: SessionConfig) -> Result<Self, WorkflowError> {
        let mut hasher = DefaultHasher::new();
        config.patterns.to_doc().patterns.iter().for_each(|p| {
            p.bits.hash(&mut hasher);
            p.record_ids.hash(&mut hasher);
        });
        let state = start_session(config.patterns, &config.order)?;
        let session = ApiSession {
            id: format!("{:016x}", hasher.finish()),
            sequence: 0,
            snapshots: vec![Arc::new(state)],
            records: config.records.map(Arc::new),
            context: config.context,
        };
        Ok(Self {
            session: Arc::new(RwLock::new(Some(session))),
            ui: false,
        })
    }

    /// A server with nothing loaded; every session endpoint answers 404.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Current snapshot and its sequence number.
    fn snapshot(&self) -> Result<(Arc<SessionState>, u64, String), ApiError> {
        let guard = self.session.read().expect("session lock");
        let s = guard.as_ref().ok_or_else(ApiError::no_session)?;
        Ok((s.current(), s.sequence, s.id.clone()))
    }
}

/// Builds the router. When `ui_dir` holds an `index.html` it is served for
/// every path that is not an API route.
pub fn router(mut state: AppState, ui_dir: Option<&Path>) -> Router {
    let ui = ui_dir.filter(|d| ui_available(d));
    state.ui = ui.is_some();
    let api = Router::new()
        .route("/health", get(health))
        .route("/state", get(get_state))
        .route("/candidates/insights", get(insight_candidates))
        .route("/candidates/exceptions", get(exception_candidates))
        .route("/decisions", post(decide))
        .route("/report", get(report))
        .route("/trace", get(trace))
        .route("/patterns/{key}", get(pattern))
        .with_state(state);
    match ui {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub fn ui_available(dir: &Path) -> bool {
    dir.join("index.html").is_file()
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app).await
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    sequence: Option<u64>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
            sequence: None,
        }
    }

    fn no_session() -> Self {
        Self::new(StatusCode::NOT_FOUND, "no session loaded")
    }
}

impl From<WorkflowError> for ApiError {
    fn from(e: WorkflowError) -> Self {
        let status = match e {
            WorkflowError::WrongPhase { .. } => StatusCode::CONFLICT,
            WorkflowError::NotACandidate { .. } | WorkflowError::Ring(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            api_version: API_VERSION,
            status: self.status.as_u16(),
            error: self.message,
            sequence: self.sequence,
        };
        (self.status, Json(body)).into_response()
    }
}

async fn health(State(app): State<AppState>) -> Json<Health> {
    let session = app.snapshot().ok().map(|(s, _, id)| SessionMeta {
        id,
        variables: s.table().codes(),
        records: s.original().record_count(),
        observed_patterns: s.original().observed_count(),
    });
    Json(Health {
        api_version: API_VERSION,
        status: "ok".into(),
        tool_version: TOOL_VERSION.into(),
        session,
        ui: app.ui,
    })
}

fn state_view(s: &SessionState, sequence: u64, id: String) -> StateView {
    let table = s.table();
    let candidates = match s.phase() {
        Phase::Insight => s.insight_candidates().map_or(0, <[_]>::len),
        Phase::Exception => s.exception_candidates().map_or(0, <[_]>::len),
        Phase::Terminated => 0,
    };
    StateView {
        api_version: API_VERSION,
        session_id: id,
        sequence,
        cycle: s.cycle(),
        phase: s.phase(),
        round: s.round(),
        variables: table.to_docs(),
        order: s.order().to_doc(table),
        records: s.original().record_count(),
        observed_patterns: s.original().observed_count(),
        active_records: s.active().record_count(),
        active_patterns: s.active().observed_count(),
        active_unobserved_exponent: s.active().unobserved_count(),
        i_generators: s.ideal_i().generators().len(),
        j_generators: s.ideal_j().generators().len(),
        excised: s
            .excised()
            .iter()
            .map(|e| ExcisionDoc {
                record_id: e.record_id.clone(),
                pattern: e.pattern.clone(),
                cycle: e.cycle,
            })
            .collect(),
        candidates,
    }
}

async fn get_state(State(app): State<AppState>) -> Result<Json<StateView>, ApiError> {
    let (s, seq, id) = app.snapshot()?;
    Ok(Json(state_view(&s, seq, id)))
}

async fn insight_candidates(State(app): State<AppState>) -> Result<Json<CandidateList<InsightView>>, ApiError> {
    let (s, sequence, _) = app.snapshot()?;
    let candidates = s
        .insight_candidates()?
        .iter()
        .map(|c| InsightView::new(c, s.active()))
        .collect();
    Ok(Json(CandidateList {
        api_version: API_VERSION,
        sequence,
        cycle: s.cycle(),
        round: s.round(),
        candidates,
    }))
}

async fn exception_candidates(State(app): State<AppState>) -> Result<Json<CandidateList<ExceptionView>>, ApiError> {
    let (s, sequence, _) = app.snapshot()?;
    let candidates = s
        .exception_candidates()?
        .iter()
        .map(|c| ExceptionView::new(c, s.table()))
        .collect();
    Ok(Json(CandidateList {
        api_version: API_VERSION,
        sequence,
        cycle: s.cycle(),
        round: s.round(),
        candidates,
    }))
}

async fn decide(State(app): State<AppState>, Json(req): Json<DecisionRequest>) -> Result<Json<StateView>, ApiError> {
    // the write lock is the single writer; readers keep their snapshots
    let mut guard = app.session.write().expect("session lock");
    let session = guard.as_mut().ok_or_else(ApiError::no_session)?;
    if req.sequence != session.sequence {
        return Err(ApiError {
            sequence: Some(session.sequence),
            ..ApiError::new(
                StatusCode::CONFLICT,
                format!("stale sequence {} (current {})", req.sequence, session.sequence),
            )
        });
    }
    let current = session.current();
    let expected = match req.kind {
        DecisionKind::Insight => Phase::Insight,
        DecisionKind::Exception => Phase::Exception,
    };
    if current.phase() != expected {
        return Err(WorkflowError::WrongPhase {
            expected,
            actual: current.phase(),
        }
        .into());
    }
    let next = match req.kind {
        DecisionKind::Insight => {
            if !req.records.is_empty() {
                return Err(ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "records apply to exception decisions only",
                ));
            }
            let polys = req
                .ids
                .iter()
                .map(|id| parse_poly(id, current.table()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(WorkflowError::from)?;
            current.decide_insights(&polys)?
        }
        DecisionKind::Exception => {
            let mut decisions: Vec<ExceptionDecision> = req.ids.iter().map(|k| ExceptionDecision::pattern(k)).collect();
            if !req.records.is_empty() {
                decisions.push(ExceptionDecision::records(&req.records));
            }
            current.decide_exceptions(&decisions)?
        }
    };
    session.sequence += 1;
    session.snapshots.push(Arc::new(next));
    Ok(Json(state_view(
        &session.current(),
        session.sequence,
        session.id.clone(),
    )))
}

#[derive(Deserialize)]
struct ReportQuery {
    format: Option<String>,
}

async fn report(State(app): State<AppState>, Query(q): Query<ReportQuery>) -> Result<Response, ApiError> {
    let context = {
        let guard = app.session.read().expect("session lock");
        guard.as_ref().ok_or_else(ApiError::no_session)?.context.clone()
    };
    let (s, _, _) = app.snapshot()?;
    let report = final_report(&s, &context)?;
    match q.format.as_deref() {
        None | Some("json") => Ok(([(header::CONTENT_TYPE, "application/json")], report.to_json()).into_response()),
        Some("markdown") => Ok((
            [(header::CONTENT_TYPE, "text/markdown; charset=utf-8")],
            report.to_markdown(),
        )
            .into_response()),
        Some(other) => Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            format!("unknown report format '{other}'"),
        )),
    }
}

async fn trace(State(app): State<AppState>) -> Result<Response, ApiError> {
    let (s, _, _) = app.snapshot()?;
    Ok(([(header::CONTENT_TYPE, "application/json")], s.trace().to_json()).into_response())
}

async fn pattern(State(app): State<AppState>, UrlPath(key): UrlPath<String>) -> Result<Json<PatternView>, ApiError> {
    let (s, _, _) = app.snapshot()?;
    let records = {
        let guard = app.session.read().expect("session lock");
        guard.as_ref().and_then(|g| g.records.clone())
    };
    let table = s.table();
    let p = s
        .original()
        .find_key(&key)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no observed pattern '{key}'")))?;
    let (active_ids, excised_ids): (Vec<String>, Vec<String>) = p
        .record_ids
        .iter()
        .cloned()
        .partition(|id| !s.excised().iter().any(|e| &e.record_id == id));
    let high = table
        .variables()
        .iter()
        .enumerate()
        .filter(|(i, _)| p.bits >> i & 1 == 1)
        .map(|(_, v)| v.code)
        .collect();
    let cuts = {
        let guard = app.session.read().expect("session lock");
        guard.as_ref().and_then(|g| g.context.thresholds.clone())
    };
    let records = records.map(|rt| {
        let names = rt.feature_names();
        p.record_ids
            .iter()
            .filter_map(|id| rt.get(id))
            .map(|r| RecordView {
                id: r.id.clone(),
                class: r.class,
                values: names
                    .iter()
                    .zip(&r.values)
                    .map(|(name, &value)| FeatureValue {
                        feature: name.to_string(),
                        value,
                        cut: cuts.as_ref().and_then(|c| c.get(name)),
                    })
                    .collect(),
            })
            .collect()
    });
    Ok(Json(PatternView {
        api_version: API_VERSION,
        key,
        class: p.class(table),
        high,
        multiplicity: p.multiplicity(),
        active_ids,
        excised_ids,
        records,
    }))
}
