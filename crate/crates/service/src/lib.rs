//! HTTP service for graphs, lenses, covers and summaries.
//!
//! Graphs are content-addressed; every computed value is immutable and
//! cached under a key that includes all parameters it depends on, so
//! identical requests yield byte-identical responses.
//!
//! | method | path | result |
//! |---|---|---|
//! | `POST` | `/graphs` | upload an edge list or graph-json, returns the id |
//! | `GET` | `/graphs/{id}` | graph-json |
//! | `GET` | `/graphs/{id}/layout?seed=&iterations=&theta=` | graph-json with positions |
//! | `GET` | `/graphs/{id}/lens/{kind}?…` | lens values and histogram |
//! | `POST` | `/graphs/{id}/mog` | summary with memberships and its layout |
//! | `GET` | `/jobs/{id}` | result of a long computation (202 while pending) |
//! | `GET` | `/healthz` | liveness |

mod api;
mod cache;
pub mod config;
mod error;
mod jobs;
mod state;

pub use api::router;
pub use cache::ComputeCache;
pub use config::{ConfigError, ServiceConfig};
pub use error::ApiError;
pub use state::AppState;

use std::sync::Arc;

/// Binds `config.host:config.port` and serves until the process exits.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let addr = format!("{}:{}", config.host, config.port);
    let listener = tokio::net::TcpListener::bind(&addr).await?;
    eprintln!("mog service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(AppState::new(config)))).await
}
