//! JSON-over-HTTP session API.
//!
//! ```text
//! POST /session                                  -> {id}
//! POST /session/{id}/parse             {src}     -> {name, ast, latex, ascii}
//! POST /session/{id}/subst             {target, bindings, form}
//! POST /session/{id}/simplify          {target}
//! POST /session/{id}/diff              {target, var, noun}
//! POST /session/{id}/exercise/make     {target, paths}
//! POST /session/{id}/exercise/check    {exerciseId, answers}
//! GET  /session/{id}/derivation/{name}
//! POST /session/{id}/derivation/check  {document}
//! POST /session/{id}/comprehension/eval {src}
//! ```
//!
//! Errors are `{"error": {"code", "message", "span"}}` with status 400 (bad input),
//! 404 (unknown session or object), 409 (name taken) or 422 (the engine refused).
//! There is no authentication beyond the unguessable session id.

pub mod api;
mod error;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mex_core::session::Session;
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

pub use error::{ApiError, ApiResult};
pub use store::{Store, DEFAULT_TTL};

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.body())).into_response()
    }
}

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    pub snapshot: Option<PathBuf>,
    pub ttl: Duration,
    /// Origin allowed by CORS; any origin when unset.
    pub allow_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            host: "127.0.0.1".into(),
            port: 8080,
            snapshot: None,
            ttl: DEFAULT_TTL,
            allow_origin: None,
        }
    }
}

fn json_body(body: &Bytes) -> ApiResult<Value> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(json!({}));
    }
    let v: Value = serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("request body is not JSON: {e}")))?;
    if !v.is_object() {
        return Err(ApiError::bad_request("request body must be a JSON object"));
    }
    Ok(v)
}

type Op = fn(&mut Session, &Value) -> ApiResult<Value>;

fn run(store: &Store, id: &str, body: &Bytes, op: Op) -> Response {
    let result = json_body(body).and_then(|b| store.with_session(id, |s| op(s, &b)));
    match result {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

macro_rules! op_route {
    ($op:path) => {
        post(
            |State(store): State<Arc<Store>>, Path(id): Path<String>, body: Bytes| async move {
                run(&store, &id, &body, $op)
            },
        )
    };
}

async fn create_session(State(store): State<Arc<Store>>) -> Response {
    Json(json!({ "id": store.create() })).into_response()
}

async fn get_derivation(
    State(store): State<Arc<Store>>,
    Path((id, name)): Path<(String, String)>,
) -> Response {
    match store.with_session(&id, |s| api::derivation_get(s, &name)) {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn no_route() -> Response {
    ApiError::new(404, "not_found", "no such endpoint").into_response()
}

fn cors(allow_origin: Option<&str>) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    match allow_origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(origin) => layer.allow_origin(origin),
        None => layer.allow_origin(Any),
    }
}

/// The API routes over `store`.
pub fn router(store: Arc<Store>, allow_origin: Option<&str>) -> Router {
    Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}/parse", op_route!(api::parse_expr))
        .route("/session/{id}/subst", op_route!(api::subst))
        .route("/session/{id}/simplify", op_route!(api::simplify))
        .route("/session/{id}/diff", op_route!(api::diff))
        .route("/session/{id}/exercise/make", op_route!(api::exercise_make))
        .route("/session/{id}/exercise/check", op_route!(api::exercise_check))
        .route("/session/{id}/derivation/check", op_route!(api::derivation_check))
        .route("/session/{id}/derivation/{name}", get(get_derivation))
        .route("/session/{id}/comprehension/eval", op_route!(api::comprehension_eval))
        .fallback(no_route)
        .layer(cors(allow_origin))
        .with_state(store)
}

/// Serve until interrupted, evicting idle sessions once a minute and writing the
/// snapshot on shutdown.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let store = Arc::new(Store::new(config.ttl, config.snapshot.clone())?);
    let addr: SocketAddr = format!("{}:{}", config.host, config.port)
        .parse()
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    let sweeper = Arc::clone(&store);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_expired();
        }
    });
    let app = router(Arc::clone(&store), config.allow_origin.as_deref());
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    store.save()
}
