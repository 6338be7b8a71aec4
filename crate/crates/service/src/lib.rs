//! JSON-over-HTTP facade: classify positions, list options with their
//! outcomes, and play games against the perfect-play engine.
//!
//! | method | path | body |
//! |---|---|---|
//! | GET | `/api/health` | |
//! | GET | `/api/rulesets` | |
//! | POST | `/api/classify` | `{ruleset, heaps}` |
//! | POST | `/api/options` | `{ruleset, heaps}` |
//! | POST | `/api/session` | `{ruleset, heaps, first?}` |
//! | GET | `/api/session/{id}` | |
//! | POST | `/api/session/{id}/move` | `{move}` |
//! | POST | `/api/session/{id}/engine-move` | |

pub mod error;
pub mod session;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use delnim_core::{
    canonicalize, classify, delete_nim_grundy, legal_moves, CertificateStatus, Class, Family, MoveRecord,
    Position, Ruleset, MAX_HEAPS,
};

pub use error::ApiError;
use session::{GameSession, MoveError, Player, SessionStore};

/// Idle sessions are dropped after this long.
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(3600);

pub struct AppState {
    pub sessions: SessionStore,
}

impl AppState {
    pub fn new(ttl: Duration) -> Arc<Self> {
        Arc::new(AppState { sessions: SessionStore::new(ttl) })
    }
}

impl Default for AppState {
    fn default() -> Self {
        AppState { sessions: SessionStore::new(DEFAULT_SESSION_TTL) }
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad-request", e.body_text()))
}

#[derive(Debug, Deserialize)]
pub struct PositionRequest {
    pub ruleset: String,
    pub heaps: Vec<i64>,
}

impl PositionRequest {
    fn resolve(&self) -> Result<(Ruleset, Position), ApiError> {
        let ruleset: Ruleset = self.ruleset.parse()?;
        let p = canonicalize(&self.heaps, ruleset)?;
        Ok((ruleset, p))
    }
}

#[derive(Debug, Serialize)]
pub struct ClassifyResponse {
    pub ruleset: Ruleset,
    pub heaps: Position,
    pub outcome: Class,
    pub certificate: Option<String>,
    pub matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grundy: Option<u32>,
}

fn classify_response(ruleset: Ruleset, p: Position) -> Result<ClassifyResponse, ApiError> {
    let outcome = classify(ruleset, &p)?;
    let grundy = (ruleset.family() == Family::DeleteNim).then(|| delete_nim_grundy(p.heaps()[0], p.heaps()[1]));
    Ok(ClassifyResponse {
        ruleset,
        outcome: outcome.class,
        certificate: outcome.certificate.map(|c| c.condition.to_string()),
        matched: outcome.certificate.is_some_and(|c| c.status == CertificateStatus::Matched),
        grundy,
        heaps: p,
    })
}

async fn health() -> Json<Value> {
    Json(json!({ "ok": true }))
}

async fn rulesets() -> Json<Value> {
    let param = |name: &str, min: usize, max: usize| json!({ "name": name, "min": min, "max": max });
    Json(json!({ "rulesets": [
        { "template": "delete-nim", "params": [], "heaps": 2 },
        { "template": "vdn", "params": [], "heaps": 2 },
        { "template": "abo:n", "params": [param("n", 2, MAX_HEAPS)], "heaps": "n" },
        { "template": "nmth:n", "params": [param("n", 2, MAX_HEAPS)], "heaps": "n" },
        { "template": "half:m", "params": [param("m", 1, MAX_HEAPS / 2)], "heaps": "2m" },
        { "template": "kfrac:k,m", "params": [param("k", 2, MAX_HEAPS), param("m", 1, MAX_HEAPS / 2)], "heaps": "km", "constraint": format!("k*m <= {MAX_HEAPS}") },
        { "template": "single:n", "params": [param("n", 2, 4)], "heaps": "n", "note": "n >= 5 is uncharacterized" },
    ]}))
}

async fn classify_handler(payload: Result<Json<PositionRequest>, JsonRejection>) -> ApiResult<ClassifyResponse> {
    let (ruleset, p) = body(payload)?.resolve()?;
    Ok(Json(classify_response(ruleset, p)?))
}

#[derive(Debug, Serialize)]
pub struct OptionView {
    #[serde(rename = "move")]
    pub record: MoveRecord,
    pub result: Position,
    pub outcome: Class,
}

async fn options_handler(payload: Result<Json<PositionRequest>, JsonRejection>) -> ApiResult<Value> {
    let (ruleset, p) = body(payload)?.resolve()?;
    classify(ruleset, &p)?;
    let options = legal_moves(ruleset, &p)?
        .into_iter()
        .map(|m| {
            let outcome = classify(ruleset, &m.result)?.class;
            Ok(OptionView { record: m.record, result: m.result, outcome })
        })
        .collect::<Result<Vec<_>, ApiError>>()?;
    Ok(Json(json!({ "heaps": p, "options": options })))
}

#[derive(Debug, Deserialize)]
pub struct NewSessionRequest {
    pub ruleset: String,
    pub heaps: Vec<i64>,
    #[serde(default = "human")]
    pub first: Player,
}

fn human() -> Player {
    Player::Human
}

#[derive(Debug, Serialize)]
pub struct SessionView {
    #[serde(flatten)]
    pub session: GameSession,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

fn view(session: &GameSession, note: Option<&'static str>) -> Json<SessionView> {
    Json(SessionView { session: session.clone(), note })
}

async fn new_session(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<NewSessionRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let req = body(payload)?;
    let ruleset: Ruleset = req.ruleset.parse()?;
    let p = canonicalize(&req.heaps, ruleset)?;
    // The engine needs a characterization to play.
    classify(ruleset, &p)?;
    let id = uuid::Uuid::new_v4().to_string();
    let session = GameSession::new(id, ruleset, p, req.first);
    let stored = state.sessions.insert(session);
    let guard = stored.lock().expect("session poisoned");
    Ok((StatusCode::CREATED, view(&guard, None)))
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<SessionView> {
    let session = state.sessions.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let guard = session.lock().expect("session poisoned");
    Ok(view(&guard, None))
}

fn move_error(e: MoveError) -> ApiError {
    match e {
        MoveError::GameOver => ApiError::game_over(),
        MoveError::OutOfTurn(Player::Human) => ApiError::out_of_turn("human"),
        MoveError::OutOfTurn(Player::Engine) => ApiError::out_of_turn("engine"),
        MoveError::Rejected(e) => e.into(),
    }
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    #[serde(rename = "move")]
    pub record: MoveRecord,
}

async fn human_move(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    payload: Result<Json<MoveRequest>, JsonRejection>,
) -> ApiResult<SessionView> {
    let session = state.sessions.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let req = body(payload)?;
    let mut guard = session.lock().expect("session poisoned");
    guard.human_move(req.record).map_err(move_error)?;
    Ok(view(&guard, None))
}

async fn engine_move(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<SessionView> {
    let session = state.sessions.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let mut guard = session.lock().expect("session poisoned");
    let losing = guard.engine_move().map_err(move_error)?;
    let note = losing.then_some("engine expects to lose under perfect play");
    Ok(view(&guard, note))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/rulesets", get(rulesets))
        .route("/api/classify", post(classify_handler))
        .route("/api/options", post(options_handler))
        .route("/api/session", post(new_session))
        .route("/api/session/{id}", get(get_session))
        .route("/api/session/{id}/move", post(human_move))
        .route("/api/session/{id}/engine-move", post(engine_move))
        .with_state(state)
}

/// Serves the API on `addr` until interrupted.
pub async fn serve(addr: SocketAddr, ttl: Duration) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(ttl)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
