//! HTTP/JSON facade over segment extraction and comparative reasoning.
//!
//! Every response is `{status, elapsedMs, warnings, ...}` with either `result`
//! or `error`/`message`/`evidence`. Compute endpoints are answered from an LRU
//! cache keyed on the canonical request, and anything slower than
//! [`ServiceConfig::job_after`] is handed back as a job to poll at `/jobs/{id}`.

mod envelope;
mod handlers;
mod state;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;

pub use envelope::Outcome;
pub use state::{AppState, ServiceConfig, Snapshot};

/// The OpenAPI document served at `/spec`.
pub const OPENAPI: &str = include_str!("openapi.json");

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(handlers::health))
        .route("/spec", get(handlers::spec))
        .route("/entity", get(handlers::entity))
        .route("/predicates", get(handlers::predicates))
        .route("/predicates/similarity", get(handlers::similarity))
        .route("/ks/node", post(handlers::ks_node))
        .route("/ks/edge", post(handlers::ks_edge))
        .route("/ks/subgraph", post(handlers::ks_subgraph))
        .route("/reason/pairwise", post(handlers::reason_pairwise))
        .route("/reason/collective", post(handlers::reason_collective))
        .route("/jobs/{id}", get(handlers::job))
        .with_state(state)
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("server stopped: {0}")]
    Serve(#[source] std::io::Error),
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })?;
    tracing::info!("listening on {}", listener.local_addr().map_err(ServeError::Serve)?);
    axum::serve(listener, router(state)).await.map_err(ServeError::Serve)
}
