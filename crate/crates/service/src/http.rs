use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use uuid::Uuid;

use verdict_core::case::CaseError;

use crate::session::{Mutation, Session, SessionError, SessionReport};

/// Live sessions keyed by id.
#[derive(Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn insert(&self, session: Session) -> Uuid {
        let id = Uuid::new_v4();
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id, Arc::new(Mutex::new(session)));
        id
    }

    pub fn get(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        let id = Uuid::parse_str(id).ok()?;
        self.sessions.read().expect("session map poisoned").get(&id).cloned()
    }

    pub fn remove(&self, id: &str) -> bool {
        let Ok(id) = Uuid::parse_str(id) else { return false };
        self.sessions.write().expect("session map poisoned").remove(&id).is_some()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

#[derive(Debug)]
pub enum ApiError {
    UnknownSession,
    Invalid {
        kind: &'static str,
        message: String,
        issues: Vec<Issue>,
    },
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match &e {
            SessionError::Case(c) => case_error(c),
            other => ApiError::Invalid {
                kind: "invalid_request",
                message: other.to_string(),
                issues: vec![Issue {
                    path: other.path().unwrap_or("").to_string(),
                    message: other.to_string(),
                }],
            },
        }
    }
}

fn case_error(e: &CaseError) -> ApiError {
    ApiError::Invalid {
        kind: e.kind(),
        message: e.to_string(),
        issues: e
            .issues()
            .into_iter()
            .map(|i| Issue {
                path: i.path,
                message: i.message,
            })
            .collect(),
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::UnknownSession => (StatusCode::NOT_FOUND, Json(json!({ "error": "unknown_session" }))).into_response(),
            ApiError::Invalid { kind, message, issues } => (
                StatusCode::BAD_REQUEST,
                Json(json!({ "error": kind, "message": message, "issues": issues })),
            )
                .into_response(),
        }
    }
}

#[derive(Serialize)]
struct Created<'a> {
    session_id: Uuid,
    report: &'a SessionReport,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FactBody {
    model: String,
    node: String,
    state: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorsBody {
    #[serde(default)]
    models: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    credibility: Option<BTreeMap<String, Option<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeBody {
    mode: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StageBody {
    stage: usize,
}

fn parse_body<T: DeserializeOwned>(body: &str) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_str(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.into_inner().to_string();
        ApiError::Invalid {
            kind: "invalid_body",
            message: message.clone(),
            issues: vec![Issue { path, message }],
        }
    })
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(axum::http::header::CONTENT_TYPE, "application/json")], body).into_response()
}

type Store = Arc<SessionStore>;

/// Router over a fresh session store.
pub fn router() -> Router {
    router_with(Arc::new(SessionStore::default()))
}

pub fn router_with(store: Store) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", axum::routing::delete(remove))
        .route("/sessions/{id}/report", get(report))
        .route("/sessions/{id}/log", get(log))
        .route("/sessions/{id}/facts", post(fact))
        .route("/sessions/{id}/priors", patch(priors))
        .route("/sessions/{id}/mode", post(mode))
        .route("/sessions/{id}/stage", post(stage))
        .with_state(store)
}

async fn create(State(store): State<Store>, body: String) -> Result<Response, ApiError> {
    let session = Session::create(&body)?;
    let report = session.report().clone();
    let id = store.insert(session);
    let body = serde_json::to_string(&Created { session_id: id, report: &report }).expect("serializable");
    Ok(json_response(StatusCode::CREATED, body))
}

async fn remove(State(store): State<Store>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    if store.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::UnknownSession)
    }
}

async fn report(State(store): State<Store>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = store.get(&id).ok_or(ApiError::UnknownSession)?;
    let body = session.lock().expect("session poisoned").report().to_json();
    Ok(json_response(StatusCode::OK, body))
}

async fn log(State(store): State<Store>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = store.get(&id).ok_or(ApiError::UnknownSession)?;
    let body = serde_json::to_string(session.lock().expect("session poisoned").log()).expect("serializable");
    Ok(json_response(StatusCode::OK, body))
}

fn mutate(store: &SessionStore, id: &str, m: Mutation) -> Result<Response, ApiError> {
    let session = store.get(id).ok_or(ApiError::UnknownSession)?;
    let mut guard = session.lock().expect("session poisoned");
    let body = guard.apply(m)?.to_json();
    Ok(json_response(StatusCode::OK, body))
}

async fn fact(State(store): State<Store>, Path(id): Path<String>, body: String) -> Result<Response, ApiError> {
    store.get(&id).ok_or(ApiError::UnknownSession)?;
    let b: FactBody = parse_body(&body)?;
    mutate(
        &store,
        &id,
        Mutation::Fact {
            model: b.model,
            node: b.node,
            state: b.state,
        },
    )
}

async fn priors(State(store): State<Store>, Path(id): Path<String>, body: String) -> Result<Response, ApiError> {
    store.get(&id).ok_or(ApiError::UnknownSession)?;
    let b: PriorsBody = parse_body(&body)?;
    mutate(
        &store,
        &id,
        Mutation::Priors {
            models: b.models,
            credibility: b.credibility,
        },
    )
}

async fn mode(State(store): State<Store>, Path(id): Path<String>, body: String) -> Result<Response, ApiError> {
    store.get(&id).ok_or(ApiError::UnknownSession)?;
    let b: ModeBody = parse_body(&body)?;
    mutate(&store, &id, Mutation::Mode { mode: b.mode })
}

async fn stage(State(store): State<Store>, Path(id): Path<String>, body: String) -> Result<Response, ApiError> {
    store.get(&id).ok_or(ApiError::UnknownSession)?;
    let b: StageBody = parse_body(&body)?;
    mutate(&store, &id, Mutation::Stage { stage: b.stage })
}
