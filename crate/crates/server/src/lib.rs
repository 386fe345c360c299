//! HTTP and WebSocket service for live training sessions.
//!
//! Datasets are uploaded or picked from the built-ins, sessions are created
//! against them and driven with Play/Pause/Stop, and every training event is
//! streamed to subscribers in seq order. See `docs/protocol.md` for the wire
//! format.

pub mod error;
pub mod routes;
pub mod state;
pub mod stream;
pub mod worker;

use axum::extract::DefaultBodyLimit;
use axum::handler::HandlerWithoutStateExt;
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

pub use error::{ApiError, ErrorCode};
pub use state::{AppState, ServerConfig};

/// All routes. Unknown paths fall through to the static directory when one
/// is configured.
pub fn router(state: AppState) -> Router {
    let max_upload = state.config().max_upload_bytes;
    let static_dir = state.config().static_dir.clone();
    let api = Router::new()
        .route("/datasets", get(routes::list_datasets).post(routes::upload_dataset))
        .route("/datasets/{id}", get(routes::get_dataset))
        .route("/sessions", get(routes::list_sessions).post(routes::create_session))
        .route("/sessions/{id}", get(routes::get_session).delete(routes::delete_session))
        .route("/sessions/{id}/control", post(routes::control_session))
        .route("/sessions/{id}/predict", post(routes::predict))
        .route("/sessions/{id}/neurons/{layer}/{index}", get(routes::neuron_equation))
        .route("/sessions/{id}/events", get(stream::subscribe))
        .method_not_allowed_fallback(routes::method_not_allowed)
        .layer(DefaultBodyLimit::max(max_upload));
    let api = match static_dir {
        Some(dir) => api.fallback_service(
            ServeDir::new(dir)
                .call_fallback_on_method_not_allowed(true)
                .fallback(routes::not_found.into_service()),
        ),
        None => api.fallback(routes::not_found),
    };
    api.with_state(state)
}

/// Bind `config.listen` and serve until the process ends.
pub async fn serve(config: ServerConfig) -> std::io::Result<()> {
    let listener = TcpListener::bind(config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    serve_on(listener, config).await
}

/// Serve on an already bound listener (port 0 in tests).
pub async fn serve_on(listener: TcpListener, config: ServerConfig) -> std::io::Result<()> {
    axum::serve(listener, router(AppState::new(config))).await
}
