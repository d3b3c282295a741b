//! A small read-only HTTP service exposing a [`CountSource`] over the
//! wire protocol:
//!
//! ```text
//! GET /v1/counts?terms=und,von,f%C3%BCr
//! -> {"counts": {"für": 3, "und": 7, "von": 0}, "total_tokens": 42, "source_id": "..."}
//!
//! GET /v1/counts?terms=und,von&format=legacy
//! -> word count: von: 0; und: 7
//! ```
//!
//! Errors come back as `{"error": "..."}` with a 4xx/5xx status; a request
//! can never crash the service.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde::{Deserialize, Serialize};
use tokio::sync::oneshot;

use super::{format_legacy_wordcount, CountQuery, CountSource, ProviderError};
use crate::tokenizer::Token;

/// The structured response body; `total_tokens` is `null` when unknown.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct WireCounts {
    pub counts: BTreeMap<String, u64>,
    pub total_tokens: Option<u64>,
    pub source_id: String,
}

#[derive(Clone)]
struct AppState {
    source: Arc<dyn CountSource>,
}

/// A running count service. Shuts down when dropped or via [`CountServer::shutdown`].
pub struct CountServer {
    addr: SocketAddr,
    shutdown_tx: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl CountServer {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Signals the server to stop and waits for it to finish.
    pub fn shutdown(mut self) {
        self.stop();
    }

    /// Blocks until the server exits (i.e. until shutdown is signalled
    /// from elsewhere or the process is interrupted).
    pub fn wait(mut self) {
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }

    fn stop(&mut self) {
        if let Some(tx) = self.shutdown_tx.take() {
            let _ = tx.send(());
        }
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}

impl Drop for CountServer {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Binds `bind` and serves `source` until shutdown. Binding happens
/// synchronously, so a port conflict fails here, not in the background.
pub fn serve_counts(
    source: Arc<dyn CountSource>,
    bind: SocketAddr,
) -> Result<CountServer, ProviderError> {
    let listener = std::net::TcpListener::bind(bind).map_err(|source| ProviderError::Bind {
        addr: bind.to_string(),
        source,
    })?;
    listener
        .set_nonblocking(true)
        .map_err(|source| ProviderError::Bind {
            addr: bind.to_string(),
            source,
        })?;
    let addr = listener.local_addr().map_err(|source| ProviderError::Bind {
        addr: bind.to_string(),
        source,
    })?;

    let (shutdown_tx, shutdown_rx) = oneshot::channel::<()>();
    let state = AppState { source };
    let thread = std::thread::Builder::new()
        .name("count-server".into())
        .spawn(move || {
            let runtime = tokio::runtime::Builder::new_current_thread()
                .enable_all()
                .build()
                .expect("failed to build server runtime");
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener)
                    .expect("listener already configured");
                let app = Router::new()
                    .route("/v1/counts", get(handle_counts))
                    .with_state(state);
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = shutdown_rx.await;
                    })
                    .await
                    .expect("count server failed");
            });
        })
        .map_err(|source| ProviderError::Bind {
            addr: addr.to_string(),
            source,
        })?;

    Ok(CountServer {
        addr,
        shutdown_tx: Some(shutdown_tx),
        thread: Some(thread),
    })
}

fn error_response(status: StatusCode, message: String) -> Response {
    let body = serde_json::json!({ "error": message });
    (status, axum::Json(body)).into_response()
}

async fn handle_counts(
    State(state): State<AppState>,
    Query(params): Query<HashMap<String, String>>,
) -> Response {
    let Some(raw_terms) = params.get("terms") else {
        return error_response(StatusCode::BAD_REQUEST, "missing terms parameter".into());
    };
    let format = params.get("format").map(String::as_str).unwrap_or("json");
    if format != "json" && format != "legacy" {
        return error_response(
            StatusCode::BAD_REQUEST,
            format!("unknown format {format:?} (expected json or legacy)"),
        );
    }

    let mut terms = Vec::new();
    for piece in raw_terms.split(',') {
        match Token::new(piece) {
            Ok(token) => terms.push(token),
            Err(e) => return error_response(StatusCode::BAD_REQUEST, e.to_string()),
        }
    }
    let query = match CountQuery::new(terms) {
        Ok(q) => q,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, e.to_string()),
    };

    let result = match state.source.get_counts(&query) {
        Ok(r) => r,
        Err(e) => return error_response(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    };

    if format == "legacy" {
        let line = format_legacy_wordcount(&result.counts);
        (
            StatusCode::OK,
            [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
            line,
        )
            .into_response()
    } else {
        let wire = WireCounts {
            counts: result
                .counts
                .iter()
                .map(|(t, c)| (t.as_str().to_string(), *c))
                .collect(),
            total_tokens: result.total_tokens,
            source_id: result.source_id,
        };
        (StatusCode::OK, axum::Json(wire)).into_response()
    }
}
