//! HTTP front end: Image API requests and `info.json`, persisted manifests
//! and collections, and the change discovery activity stream.
//!
//! Endpoints (GET and HEAD):
//!
//! - `/{prefix}/{identifier}/info.json`
//! - `/{prefix}/{identifier}/{region}/{size}/{rotation}/{quality}.{format}`
//! - `/presentation/{slug}/{record_id}/manifest`
//! - `/presentation/{slug}/collection`
//! - `/discovery/changes` and `/discovery/changes/page/{n}`

pub mod config;
pub mod error;
mod routes;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::Router;
use iiif_core::pipeline::ImageCache;
use tokio::net::TcpListener;

pub use config::{ConfigError, ServerConfig, ENV_PREFIX};
pub use error::ApiError;
pub use routes::{ACTIVITY_MEDIA_TYPE, IMAGE_INFO_MEDIA_TYPE};

/// Validates the configuration and builds the service.
pub fn router(config: ServerConfig) -> Result<Router, ConfigError> {
    config.validate()?;
    let app = routes::App {
        image_root: config.image_service_root()?,
        cache: ImageCache::new(config.cache_capacity),
        config,
    };
    Ok(Router::new().fallback(routes::dispatch).with_state(Arc::new(app)))
}

/// Serves on an already bound listener until `shutdown` resolves, then
/// flushes the activity log to disk.
pub async fn serve(
    listener: TcpListener,
    config: ServerConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let log = config.activity_log_path();
    let app = router(config).map_err(std::io::Error::other)?;
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await?;
    sync_file(&log)
}

fn sync_file(path: &std::path::Path) -> std::io::Result<()> {
    match std::fs::OpenOptions::new().append(true).open(path) {
        Ok(f) => f.sync_all(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(e),
    }
}

/// Binds `config.listen`.
pub async fn bind(config: &ServerConfig) -> std::io::Result<(TcpListener, SocketAddr)> {
    let listener = TcpListener::bind(&config.listen).await?;
    let addr = listener.local_addr()?;
    Ok((listener, addr))
}
