//! Engine configuration as read from TOML.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::SimilarityParams;
use crate::numerics::{JointWeights, DEFAULT_WALK_STEPS};
use crate::traversal::{TraversalConfig, TraversalError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CpcConfig {
    pub walk_steps: usize,
}

impl Default for CpcConfig {
    fn default() -> Self {
        Self {
            walk_steps: DEFAULT_WALK_STEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub traversal: TraversalConfig,
    pub similarity: SimilarityParams,
    /// Shots kept per turning point when sets come from predicted scores.
    pub tp_set_size: usize,
    pub losses: JointWeights,
    pub cpc: CpcConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            traversal: TraversalConfig::default(),
            similarity: SimilarityParams::default(),
            tp_set_size: 5,
            losses: JointWeights::default(),
            cpc: CpcConfig::default(),
        }
    }
}

impl EngineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::Field {
            field: String::new(),
            message: e.to_string(),
        })?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Field {
            field: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.traversal.validate().map_err(|e| match e {
            TraversalError::InvalidConfig { field, reason } => ConfigError::Field {
                field: format!("traversal.{field}"),
                message: reason,
            },
            other => ConfigError::Field {
                field: "traversal".into(),
                message: other.to_string(),
            },
        })?;
        self.similarity.validate().map_err(|e| ConfigError::Field {
            field: "similarity".into(),
            message: e.to_string(),
        })?;
        if self.tp_set_size == 0 {
            return Err(ConfigError::Field {
                field: "tp_set_size".into(),
                message: "must be >= 1".into(),
            });
        }
        for (name, v) in [("losses.a", self.losses.a), ("losses.b", self.losses.b)] {
            if !v.is_finite() {
                return Err(ConfigError::Field {
                    field: name.into(),
                    message: "must be finite".into(),
                });
            }
        }
        Ok(())
    }
}
