//! HTTP routes over [`Service`].

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use valence_core::gateway::{self, Service};

type Params = Query<HashMap<String, String>>;

fn now_secs() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn reply(r: gateway::Response) -> Response {
    let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, r.content_type)], r.body).into_response()
}

async fn analyze(State(s): State<Arc<Service>>, Query(q): Params, body: Bytes) -> Response {
    reply(s.handle_analyze(&body, q.get("engine").map(String::as_str), q.get("lang").map(String::as_str)))
}

async fn channel_message(
    State(s): State<Arc<Service>>,
    Path(id): Path<String>,
    Query(q): Params,
    body: Bytes,
) -> Response {
    let get = |k: &str| q.get(k).map(String::as_str);
    reply(s.handle_channel_message(&id, &body, get("engine"), get("lang"), get("t"), now_secs()))
}

async fn gauge(State(s): State<Arc<Service>>, Path(id): Path<String>, Query(q): Params) -> Response {
    let get = |k: &str| q.get(k).map(String::as_str);
    reply(s.handle_gauge(&id, get("window"), get("now"), now_secs()))
}

async fn health(State(s): State<Arc<Service>>) -> Response {
    reply(s.handle_health())
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/analyze", post(analyze))
        .route("/channels/{id}/messages", post(channel_message))
        .route("/channels/{id}/gauge", get(gauge))
        .route("/health", get(health))
        .with_state(service)
}

/// Serves until ctrl-c.
pub async fn serve(listener: TcpListener, service: Arc<Service>) -> std::io::Result<()> {
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
