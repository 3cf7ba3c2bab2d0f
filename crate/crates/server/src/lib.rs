//! Read-only HTTP API over loaded atlases and bilingual dictionaries.
//!
//! Every response is JSON. Errors carry `{"error": "..."}` with status 400
//! for bad parameters, 404 for unknown languages, units, cliques or
//! dictionaries, and 500 otherwise.

pub mod api;
pub mod config;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::http::{HeaderValue, Method};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use api::router;
pub use config::{Catalog, ConfigError, DictionaryConfig, ServiceConfig};

/// Router for a loaded catalog, with CORS restricted to `cors` origins.
pub fn app(catalog: Catalog, cors: &[String]) -> Result<Router, ConfigError> {
    let router = router(Arc::new(catalog));
    if cors.is_empty() {
        return Ok(router);
    }
    let origins = cors
        .iter()
        .map(|o| HeaderValue::from_str(o).map_err(|_| ConfigError::Parse(format!("bad CORS origin {o}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let layer = CorsLayer::new().allow_origin(AllowOrigin::list(origins)).allow_methods([Method::GET]);
    Ok(router.layer(layer))
}

/// Loads everything named in `cfg` and binds its address. The returned
/// future serves until the process stops.
pub async fn bind(
    cfg: &ServiceConfig,
) -> Result<
    (SocketAddr, impl std::future::Future<Output = std::io::Result<()>>),
    Box<dyn std::error::Error + Send + Sync>,
> {
    let catalog = Catalog::load(cfg)?;
    let app = app(catalog, &cfg.cors)?;
    let listener = TcpListener::bind(&cfg.bind).await?;
    let addr = listener.local_addr()?;
    Ok((addr, async move { axum::serve(listener, app).await }))
}
