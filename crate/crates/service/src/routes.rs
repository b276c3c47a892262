use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ApiError;
use crate::session::{Candidates, Choice, PathView, StartCandidate};
use crate::state::AppState;

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/candidates", get(candidates))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/path", get(path))
        .route("/movies", get(movies))
        .route("/movies/{id}/graph", get(graph))
        .fallback(|| async { ApiError::not_found("no-route", "no such endpoint") })
        .with_state(state)
}

/// JSON body with field paths in decode errors.
fn decode<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let err = ApiError::unprocessable("invalid-body", e.inner().to_string());
        if path == "." {
            err
        } else {
            err.with_field(path)
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    movie_id: String,
    #[serde(default)]
    config: Value,
}

#[derive(Serialize)]
struct Created {
    session_id: String,
    movie_id: String,
    candidates: Vec<StartCandidate>,
}

async fn create_session(State(st): State<Shared>, body: Bytes) -> ApiResult<(StatusCode, Json<Created>)> {
    let req: CreateRequest = decode(&body)?;
    let handle = st.create_session(&req.movie_id, req.config)?;
    let s = handle.lock().unwrap();
    Ok((
        StatusCode::CREATED,
        Json(Created {
            session_id: s.id.clone(),
            movie_id: req.movie_id,
            candidates: s.start_candidates(),
        }),
    ))
}

async fn candidates(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Candidates>> {
    let handle = st.session(&id)?;
    let s = handle.lock().unwrap();
    Ok(Json(s.candidates()?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRequest {
    choice: Choice,
}

async fn step(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<PathView>> {
    let req: StepRequest = decode(&body)?;
    let handle = st.step(&id, req.choice)?;
    let view = handle.lock().unwrap().view();
    Ok(Json(view))
}

async fn undo(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<PathView>> {
    let handle = st.undo(&id)?;
    let view = handle.lock().unwrap().view();
    Ok(Json(view))
}

async fn path(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<PathView>> {
    let handle = st.session(&id)?;
    let view = handle.lock().unwrap().view();
    Ok(Json(view))
}

#[derive(Serialize)]
struct MovieSummary {
    movie_id: String,
    n_shots: usize,
    /// No turning-point scores; starts are sampled.
    degenerate: bool,
}

async fn movies(State(st): State<Shared>) -> Json<Vec<MovieSummary>> {
    Json(
        st.movies()
            .map(|m| MovieSummary {
                movie_id: m.bundle.movie_id.clone(),
                n_shots: m.graph.n_shots(),
                degenerate: m.is_degenerate(),
            })
            .collect(),
    )
}

#[derive(Serialize)]
struct Edge {
    source: usize,
    target: usize,
    weight: f64,
}

#[derive(Serialize)]
struct GraphView {
    movie_id: String,
    n_shots: usize,
    k_per_node: Vec<usize>,
    edges: Vec<Edge>,
    /// Shot ids per turning point.
    tp_sets: [Vec<usize>; 5],
}

async fn graph(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<GraphView>> {
    let m = st.movie(&id)?;
    Ok(Json(GraphView {
        movie_id: id,
        n_shots: m.graph.n_shots(),
        k_per_node: m.graph.k_per_node().to_vec(),
        edges: m
            .graph
            .edges()
            .map(|(source, target, weight)| Edge { source, target, weight })
            .collect(),
        tp_sets: m.tp_sets.as_id_sets(),
    }))
}
