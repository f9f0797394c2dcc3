//! HTTP server for editing evaluation grids.
//!
//! Evaluations live as JSON files in a data directory; the server loads them
//! lazily, hands out a revision number per evaluation and rejects patches
//! made against an older revision.

pub mod api;
pub mod store;

use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::response::Html;
use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

pub use api::{AppState, ErrorBody};
pub use store::{load_registry, Change, Store, StoreError};

const FALLBACK_INDEX: &str = "<!doctype html>
<html><head><meta charset=\"utf-8\"><title>AnAmeter</title></head>
<body><h1>AnAmeter</h1>
<p>No UI bundle configured. Start the server with <code>--ui-dir</code>, or use the JSON API under <code>/api</code>.</p>
</body></html>
";

/// The full application: JSON API plus the static UI from `ui_dir` when given.
pub fn router(state: AppState, ui_dir: Option<PathBuf>) -> Router {
    let app = api::routes();
    let app = match ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => app.route("/", get(|| async { Html(FALLBACK_INDEX) })),
    };
    app.with_state(state)
}

#[derive(Debug, thiserror::Error)]
#[error("cannot listen on {addr}: {source}")]
pub struct BindError {
    pub addr: SocketAddr,
    #[source]
    pub source: io::Error,
}

pub async fn bind(addr: SocketAddr) -> Result<TcpListener, BindError> {
    TcpListener::bind(addr).await.map_err(|source| BindError { addr, source })
}

pub async fn serve(listener: TcpListener, state: Arc<Store>, ui_dir: Option<PathBuf>) -> io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!("listening on http://{addr}");
    }
    axum::serve(listener, router(state, ui_dir)).await
}
