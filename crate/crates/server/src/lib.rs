//! HTTP adapter over `docgen-core`.
//!
//! | route                          | answer                                     |
//! |--------------------------------|--------------------------------------------|
//! | `GET /api/topics`              | vocabulary with per-topic clip counts      |
//! | `POST /api/generate`           | documentary manifest, logged to a session  |
//! | `GET /api/clips/{id}`          | clip record as written in the manifest     |
//! | `GET /api/sessions/{id}/coverage` | coverage report of a session log        |
//! | `GET /media/**`                | static assets when a media root is set     |
//!
//! Sessions are identified by the `x-docgen-session` request header. When it
//! is missing the service mints a token; either way the token comes back in
//! the same response header.

mod config;
mod handlers;
mod sessions;

use std::sync::Arc;

use axum::Router;
use axum::routing::{get, post};
use docgen_core::{ClipBank, GenerationConstraints};
use tower_http::services::ServeDir;

pub use config::{ConfigError, ServiceConfig};
pub use handlers::{GenerateRequest, SESSION_HEADER, TopicCount};
pub use sessions::SessionStore;

pub struct AppState {
    pub bank: ClipBank,
    pub constraints: GenerationConstraints,
    pub sessions: SessionStore,
}

pub fn router(state: Arc<AppState>, media_root: Option<&std::path::Path>) -> Router {
    let mut app = Router::new()
        .route("/api/topics", get(handlers::topics))
        .route("/api/generate", post(handlers::generate))
        .route("/api/clips/{id}", get(handlers::clip))
        .route("/api/sessions/{id}/coverage", get(handlers::coverage))
        .with_state(state);
    if let Some(root) = media_root {
        app = app.nest_service("/media", ServeDir::new(root));
    }
    app
}

/// Loads the bank, prepares the session directory and serves until the
/// process is stopped.
pub async fn serve(config: ServiceConfig) -> Result<(), ConfigError> {
    let bank = docgen_core::load_bank(&config.bank_path)?;
    config
        .constraints
        .check()
        .map_err(ConfigError::Constraints)?;
    let sessions = SessionStore::open(&config.session_dir)?;
    let state = Arc::new(AppState {
        bank,
        constraints: config.constraints,
        sessions,
    });
    let app = router(state, config.media_root.as_deref());
    let listener = tokio::net::TcpListener::bind(&config.listen_address).await?;
    eprintln!("docgen listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await?;
    Ok(())
}
