use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use mog_core::graph::WeightedGraph;
use mog_core::lens::{LensError, LensField};
use mog_core::mapper::LensDomain;

use crate::cache::ComputeCache;
use crate::config::ServiceConfig;
use crate::error::ApiError;
use crate::jobs::Jobs;

/// A finished JSON response, cheap to clone and replay.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub status: StatusCode,
    pub body: Arc<Vec<u8>>,
}

impl Reply {
    pub fn json<T: serde::Serialize>(status: StatusCode, value: &T) -> Reply {
        Reply {
            status,
            body: Arc::new(serde_json::to_vec(value).expect("response serializes")),
        }
    }
}

impl From<ApiError> for Reply {
    fn from(e: ApiError) -> Reply {
        Reply {
            status: e.status,
            body: Arc::new(e.body()),
        }
    }
}

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        (
            self.status,
            [(header::CONTENT_TYPE, "application/json")],
            self.body.as_ref().clone(),
        )
            .into_response()
    }
}

pub type LensResult = Result<Arc<LensField>, LensError>;

pub struct AppState {
    pub config: ServiceConfig,
    graphs: Mutex<GraphSlots>,
    pub lenses: ComputeCache<LensResult>,
    pub layouts: ComputeCache<Arc<Vec<[f64; 2]>>>,
    pub domains: ComputeCache<Arc<LensDomain>>,
    pub jobs: Jobs,
}

struct GraphSlots {
    graphs: HashMap<String, Arc<WeightedGraph>>,
    order: VecDeque<String>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        let capacity = config.cache_capacity;
        Self {
            graphs: Mutex::new(GraphSlots {
                graphs: HashMap::new(),
                order: VecDeque::new(),
            }),
            lenses: ComputeCache::new(capacity),
            layouts: ComputeCache::new(capacity),
            domains: ComputeCache::new(capacity),
            jobs: Jobs::new(capacity),
            config,
        }
    }

    /// Stores `g` under its content id; re-uploads keep the first copy.
    pub fn insert_graph(&self, g: WeightedGraph) -> (String, Arc<WeightedGraph>) {
        let id = g.content_id();
        let mut slots = self.graphs.lock().expect("graph store lock");
        if let Some(existing) = slots.graphs.get(&id) {
            return (id, existing.clone());
        }
        let g = Arc::new(g);
        slots.graphs.insert(id.clone(), g.clone());
        slots.order.push_back(id.clone());
        while slots.order.len() > self.config.max_graphs.max(1) {
            if let Some(old) = slots.order.pop_front() {
                slots.graphs.remove(&old);
            }
        }
        (id, g)
    }

    pub fn graph(&self, id: &str) -> Result<Arc<WeightedGraph>, ApiError> {
        self.graphs
            .lock()
            .expect("graph store lock")
            .graphs
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("graph", id))
    }
}
