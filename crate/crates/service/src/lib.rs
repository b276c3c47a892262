//! HTTP service for interactive trailer walks.
//!
//! Endpoints: `POST /sessions`, `GET /sessions/{id}/candidates`,
//! `POST /sessions/{id}/step`, `POST /sessions/{id}/undo`,
//! `GET /sessions/{id}/path`, `GET /movies`, `GET /movies/{id}/graph`.
//! Errors are `{code, message, field?}`.

pub mod config;
pub mod error;
pub mod journal;
mod routes;
pub mod session;
pub mod state;

use std::sync::Arc;

pub use config::ServiceConfig;
pub use error::{ApiError, ErrorBody};
pub use state::AppState;

pub fn app(state: Arc<AppState>) -> axum::Router {
    routes::router(state)
}
