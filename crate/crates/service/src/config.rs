use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const ENV_PORT: &str = "TRAILER_PORT";
pub const ENV_BUNDLE_DIR: &str = "TRAILER_BUNDLE_DIR";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    /// Every `*.json` bundle in here is served.
    pub bundle_dir: PathBuf,
    /// Append-only session journal, replayed at startup.
    pub journal: Option<PathBuf>,
    /// Engine TOML for graph construction and session defaults.
    pub engine_config: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            host: "127.0.0.1".into(),
            port: 8080,
            bundle_dir: PathBuf::from("bundles"),
            journal: None,
            engine_config: None,
        }
    }
}

impl ServiceConfig {
    pub fn from_toml_str(text: &str) -> anyhow::Result<Self> {
        let de = toml::Deserializer::parse(text)?;
        serde_path_to_error::deserialize(de).map_err(|e| anyhow::anyhow!("{}: {}", e.path(), e.inner()))
    }

    /// Reads `path` when given, then applies environment overrides.
    pub fn load(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> anyhow::Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?;
                Self::from_toml_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?
            }
            None => Self::default(),
        };
        if let Some(port) = env(ENV_PORT) {
            cfg.port = port
                .parse()
                .map_err(|_| anyhow::anyhow!("{ENV_PORT}={port:?} is not a port number"))?;
        }
        if let Some(dir) = env(ENV_BUNDLE_DIR) {
            cfg.bundle_dir = dir.into();
        }
        Ok(cfg)
    }

    pub fn addr(&self) -> anyhow::Result<SocketAddr> {
        Ok(format!("{}:{}", self.host, self.port).parse()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides_file() {
        let cfg = ServiceConfig::from_toml_str("port = 9000\nbundle_dir = \"a\"\n").unwrap();
        assert_eq!(cfg.port, 9000);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.toml");
        std::fs::write(&p, "port = 9000\nbundle_dir = \"a\"\n").unwrap();
        let env = |k: &str| match k {
            ENV_PORT => Some("9100".to_string()),
            ENV_BUNDLE_DIR => Some("b".to_string()),
            _ => None,
        };
        let cfg = ServiceConfig::load(Some(&p), env).unwrap();
        assert_eq!((cfg.port, cfg.bundle_dir), (9100, PathBuf::from("b")));
    }

    #[test]
    fn bad_values_name_the_field() {
        let err = ServiceConfig::from_toml_str("port = \"x\"").unwrap_err().to_string();
        assert!(err.starts_with("port"), "{err}");
        assert!(ServiceConfig::load(None, |_| Some("nope".into())).is_err());
    }
}
