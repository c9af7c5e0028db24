use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {message}")]
    Toml { path: String, message: String },
    #[error("environment variable {name}={value} is not a valid {expected}")]
    Env {
        name: &'static str,
        value: String,
        expected: &'static str,
    },
}

/// Service settings. Read from a TOML file (optionally under a `[service]`
/// table), then overridden by `MOG_*` environment variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    /// Largest accepted upload, in bytes.
    pub max_upload_bytes: usize,
    /// Cached lens fields and layouts kept before the oldest is evicted.
    pub cache_capacity: usize,
    /// Stored graphs kept before the oldest is evicted.
    pub max_graphs: usize,
    /// Lens and summary requests on graphs with more nodes run as jobs (202).
    pub job_threshold_nodes: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            host: "127.0.0.1".to_owned(),
            port: 8080,
            max_upload_bytes: 64 * 1024 * 1024,
            cache_capacity: 256,
            max_graphs: 64,
            job_threshold_nodes: 50_000,
        }
    }
}

#[derive(Deserialize)]
struct FileLayout {
    service: Option<ServiceConfig>,
}

impl ServiceConfig {
    pub fn from_toml_str(text: &str, path: &str) -> Result<Self, ConfigError> {
        let err = |e: toml::de::Error| ConfigError::Toml {
            path: path.to_owned(),
            message: e.to_string(),
        };
        let nested: FileLayout = toml::from_str(text).map_err(err)?;
        match nested.service {
            Some(cfg) => Ok(cfg),
            None => toml::from_str(text).map_err(err),
        }
    }

    /// File (if given) then environment.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let base = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                Self::from_toml_str(&text, &p.display().to_string())?
            }
            None => Self::default(),
        };
        base.with_env(|name| std::env::var(name).ok())
    }

    pub fn with_env(mut self, get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        fn parse<T: std::str::FromStr>(
            get: &impl Fn(&str) -> Option<String>,
            name: &'static str,
            expected: &'static str,
        ) -> Result<Option<T>, ConfigError> {
            match get(name) {
                None => Ok(None),
                Some(value) => value
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| ConfigError::Env {
                        name,
                        value,
                        expected,
                    }),
            }
        }
        if let Some(h) = get("MOG_HOST") {
            self.host = h;
        }
        if let Some(p) = parse(&get, "MOG_PORT", "port number")? {
            self.port = p;
        }
        if let Some(v) = parse(&get, "MOG_MAX_UPLOAD_BYTES", "byte count")? {
            self.max_upload_bytes = v;
        }
        if let Some(v) = parse(&get, "MOG_CACHE_CAPACITY", "count")? {
            self.cache_capacity = v;
        }
        if let Some(v) = parse(&get, "MOG_MAX_GRAPHS", "count")? {
            self.max_graphs = v;
        }
        if let Some(v) = parse(&get, "MOG_JOB_THRESHOLD", "node count")? {
            self.job_threshold_nodes = v;
        }
        Ok(self)
    }
}
