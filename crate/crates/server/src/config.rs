//! Service configuration: one TOML file, with `IIIF_*` environment variables
//! overriding the same keys.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use iiif_core::request::ServiceRoot;
use iiif_core::{ComplianceLevel, ServerLimits, TileConfig};
use serde::{Deserialize, Serialize};

pub const ENV_PREFIX: &str = "IIIF_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    /// Socket address to bind, e.g. `127.0.0.1:8182`.
    pub listen: String,
    /// Origin used in minted ids; defaults to `http://{listen}`.
    pub public_base: Option<String>,
    /// Path prefix of the image service, without slashes.
    pub image_prefix: String,
    pub image_root: PathBuf,
    /// Directory that ingestion writes manifests and collections into.
    pub presentation_root: PathBuf,
    /// Defaults to `{presentation_root}/activity.jsonl`.
    pub activity_log: Option<PathBuf>,
    pub page_size: usize,
    pub cache_capacity: usize,
    pub compliance: ComplianceLevel,
    pub limits: ServerLimits,
    pub tiles: TileConfig,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            listen: "127.0.0.1:8182".into(),
            public_base: None,
            image_prefix: "iiif".into(),
            image_root: PathBuf::from("images"),
            presentation_root: PathBuf::from("presentation"),
            activity_log: None,
            page_size: iiif_core::discovery::DEFAULT_PAGE_SIZE,
            cache_capacity: 64,
            compliance: ComplianceLevel::default(),
            limits: ServerLimits::default(),
            tiles: TileConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {detail}")]
    Parse { path: PathBuf, detail: String },
    #[error("{key}={value}: {detail}")]
    Env { key: String, value: String, detail: String },
    #[error("{key} {path} does not exist or is not a directory")]
    MissingRoot { key: &'static str, path: PathBuf },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn parse_env<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Env {
        key: key.to_string(),
        value: value.to_string(),
        detail: e.to_string(),
    })
}

impl ServerConfig {
    /// Reads the file, resolves relative paths against its directory and
    /// applies overrides from the process environment.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let mut cfg = ServerConfig::from_toml(&text)
            .map_err(|detail| ConfigError::Parse { path: path.to_path_buf(), detail })?;
        cfg.apply_env(std::env::vars())?;
        if let Some(dir) = path.parent() {
            cfg.resolve_relative(dir);
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Applies every `IIIF_*` variable naming a known key. Nested keys join
    /// with an underscore: `IIIF_LIMITS_MAX_AREA`, `IIIF_TILES_WIDTH`.
    pub fn apply_env<I>(&mut self, vars: I) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        for (key, value) in vars {
            let Some(name) = key.strip_prefix(ENV_PREFIX) else { continue };
            let v = value.as_str();
            match name {
                "LISTEN" => self.listen = value.clone(),
                "PUBLIC_BASE" => self.public_base = Some(value.clone()),
                "IMAGE_PREFIX" => self.image_prefix = value.clone(),
                "IMAGE_ROOT" => self.image_root = PathBuf::from(v),
                "PRESENTATION_ROOT" => self.presentation_root = PathBuf::from(v),
                "ACTIVITY_LOG" => self.activity_log = Some(PathBuf::from(v)),
                "PAGE_SIZE" => self.page_size = parse_env(&key, v)?,
                "CACHE_CAPACITY" => self.cache_capacity = parse_env(&key, v)?,
                "COMPLIANCE" => {
                    self.compliance = match v {
                        "level0" => ComplianceLevel::Level0,
                        "level1" => ComplianceLevel::Level1,
                        "level2" => ComplianceLevel::Level2,
                        _ => {
                            return Err(ConfigError::Env {
                                key,
                                value,
                                detail: "expected level0, level1 or level2".into(),
                            })
                        }
                    }
                }
                "LIMITS_MAX_WIDTH" => self.limits.max_width = parse_env(&key, v)?,
                "LIMITS_MAX_HEIGHT" => self.limits.max_height = Some(parse_env(&key, v)?),
                "LIMITS_MAX_AREA" => self.limits.max_area = parse_env(&key, v)?,
                "TILES_WIDTH" => self.tiles.width = parse_env(&key, v)?,
                "TILES_HEIGHT" => self.tiles.height = parse_env(&key, v)?,
                _ => {}
            }
        }
        Ok(())
    }

    fn resolve_relative(&mut self, dir: &Path) {
        for p in [&mut self.image_root, &mut self.presentation_root] {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        if let Some(p) = self.activity_log.as_mut().filter(|p| p.is_relative()) {
            *p = dir.join(&*p);
        }
    }

    pub fn public_base(&self) -> String {
        match &self.public_base {
            Some(b) => b.trim_end_matches('/').to_string(),
            None => format!("http://{}", self.listen),
        }
    }

    pub fn image_prefix(&self) -> &str {
        self.image_prefix.trim_matches('/')
    }

    /// Root of every image base URI.
    pub fn image_service_root(&self) -> Result<ServiceRoot, ConfigError> {
        let prefix = self.image_prefix();
        let text = if prefix.is_empty() { self.public_base() } else { format!("{}/{prefix}", self.public_base()) };
        text.parse().map_err(|e| ConfigError::Invalid(format!("public_base: {e}")))
    }

    pub fn activity_log_path(&self) -> PathBuf {
        self.activity_log.clone().unwrap_or_else(|| self.presentation_root.join("activity.jsonl"))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, path) in [("image_root", &self.image_root), ("presentation_root", &self.presentation_root)] {
            if !path.is_dir() {
                return Err(ConfigError::MissingRoot { key, path: path.clone() });
            }
        }
        self.limits.validate().map_err(ConfigError::Invalid)?;
        self.tiles.validate().map_err(ConfigError::Invalid)?;
        if self.page_size == 0 {
            return Err(ConfigError::Invalid("page_size must be positive".into()));
        }
        let reserved = ["presentation", "discovery"];
        if self.image_prefix().split('/').next().is_some_and(|s| reserved.contains(&s)) {
            return Err(ConfigError::Invalid(format!("image_prefix {:?} collides with a reserved path", self.image_prefix)));
        }
        self.image_service_root()?;
        Ok(())
    }
}
