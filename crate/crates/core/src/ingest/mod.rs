//! Movie bundles on disk, sequence alignment and label transfer.

mod bundle;
mod canonical;
mod dtw;
mod labels;
mod synthetic;

pub use bundle::{load_bundle, parse_bundle, save_bundle, MovieBundle, SceneRecord, TrailerShot};
pub use canonical::{to_canonical_json, CanonicalFormatter};
pub use dtw::{dtw_align, step_cost, AlignmentResult};
pub use labels::{project_scene_labels, silver_matches, silver_trailer_labels};
pub use synthetic::synthetic_bundle;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("non-contiguous shot ids: position {position} holds id {found}")]
    NonContiguous { position: usize, found: usize },
    #[error("shot_to_scene is not monotone at shot {shot}")]
    NonMonotone { shot: usize },
    #[error("`{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("{0} sequence is empty")]
    EmptySequence(&'static str),
    #[error("trailer has no shots")]
    EmptyTrailer,
    #[error("`{field}`: embedding dimension {found}, expected {expected}")]
    Dimension {
        field: String,
        expected: usize,
        found: usize,
    },
    #[error("shot {0} has no scene")]
    ShotWithoutScene(usize),
    #[error("threshold must be finite, got {0}")]
    Threshold(f64),
}

impl IngestError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}
