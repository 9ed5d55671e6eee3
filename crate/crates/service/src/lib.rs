//! HTTP API over subscope-core. Every route lives under `/api/v1`; see
//! [`router`] for the list.

mod api;
pub mod config;
pub mod error;
pub mod session;

use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::DefaultBodyLimit;
use axum::Router;
use tokio::net::TcpListener;

pub use api::DEFAULT_PAGE_LIMIT;
pub use config::{Config, ConfigError};
pub use error::ApiError;
pub use session::{Session, SessionStore};

#[derive(Debug, Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    pub config: Arc<Config>,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        AppState {
            store: Arc::new(SessionStore::new(config.session_ttl)),
            config: Arc::new(config),
        }
    }
}

/// Routes:
///
/// - `POST /api/v1/sessions` (CSV body, multipart file, or `?source=sample`)
/// - `GET /api/v1/sessions/{id}/summary`
/// - `GET /api/v1/sessions/{id}/journals`
/// - `PATCH /api/v1/sessions/{id}/journals/{key}`
/// - `GET /api/v1/sessions/{id}/charts/{chart_id}`
/// - `GET /api/v1/sessions/{id}/export`
/// - `GET /api/v1/sessions/{id}/bounds`
/// - `GET /api/v1/sessions/{id}/search?q=`
/// - `GET /api/v1/charts/catalog`
pub fn router(state: AppState) -> Router {
    let limit = state.config.max_upload_bytes;
    api::routes()
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

/// Evicts idle sessions periodically until the runtime shuts down.
pub fn spawn_reaper(store: Arc<SessionStore>) -> tokio::task::JoinHandle<()> {
    let period = (store.ttl() / 4).clamp(Duration::from_secs(1), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            let evicted = store.reap(Instant::now());
            if evicted > 0 {
                tracing::info!(evicted, "reaped idle sessions");
            }
        }
    })
}

/// Serves on an already bound listener until `shutdown` resolves.
pub async fn serve<F>(listener: TcpListener, state: AppState, shutdown: F) -> std::io::Result<()>
where
    F: std::future::Future<Output = ()> + Send + 'static,
{
    let reaper = spawn_reaper(state.store.clone());
    let result = axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await;
    reaper.abort();
    result
}
