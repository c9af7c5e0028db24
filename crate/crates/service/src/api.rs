use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::routing::{get, post};
use axum::Router;
use mog_core::cover::{Cover, CoverJson};
use mog_core::graph::{parse_graph, GraphFormat, WeightedGraph};
use mog_core::layout::{layout_fr, LayoutParams};
use mog_core::lens::{
    compute_lens, histogram, LensField, LensHistogram, LensKind, LensSpec, DEFAULT_BIN_COUNT,
};
use mog_core::mapper::{summarize, FilterSpec, LensDomain, MogSummaryJson};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ApiError;
use crate::jobs::JobState;
use crate::state::{AppState, LensResult, Reply};

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    let limit = state.config.max_upload_bytes;
    Router::new()
        .route("/healthz", get(healthz))
        .route("/graphs", post(upload_graph))
        .route("/graphs/{id}", get(get_graph))
        .route("/graphs/{id}/layout", get(get_layout))
        .route("/graphs/{id}/lens/{kind}", get(get_lens))
        .route("/graphs/{id}/mog", post(post_mog))
        .route("/jobs/{id}", get(get_job))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

async fn healthz() -> Reply {
    Reply::json(StatusCode::OK, &serde_json::json!({ "status": "ok" }))
}

fn request_error(message: impl Into<String>) -> ApiError {
    ApiError::new(StatusCode::BAD_REQUEST, "request", message)
}

/// Runs `work` on the blocking pool. Large requests become a job: the caller
/// gets 202 and polls `/jobs/{id}`; resubmitting returns the finished result.
async fn run(
    state: Shared,
    as_job: bool,
    job_key: String,
    work: impl FnOnce(&AppState) -> Reply + Send + 'static,
) -> Reply {
    let guarded = move |st: &AppState| {
        catch_unwind(AssertUnwindSafe(|| work(st))).unwrap_or_else(|_| {
            ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "internal",
                "computation panicked",
            )
            .into()
        })
    };
    if !as_job {
        let st = state.clone();
        return tokio::task::spawn_blocking(move || guarded(&st))
            .await
            .unwrap_or_else(|e| {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()).into()
            });
    }
    let id = hex::encode(&Sha256::digest(job_key.as_bytes())[..12]);
    if state.jobs.start(&id) {
        let st = state.clone();
        let job = id.clone();
        tokio::task::spawn_blocking(move || {
            let reply = guarded(&st);
            st.jobs.finish(&job, reply);
        });
    } else if let Some(JobState::Done(reply)) = state.jobs.get(&id) {
        return reply;
    }
    accepted(&id)
}

fn accepted(id: &str) -> Reply {
    Reply::json(
        StatusCode::ACCEPTED,
        &serde_json::json!({ "job": id, "status": "pending", "poll": format!("/jobs/{id}") }),
    )
}

async fn get_job(State(state): State<Shared>, Path(id): Path<String>) -> Reply {
    match state.jobs.get(&id) {
        Some(JobState::Done(reply)) => reply,
        Some(JobState::Pending) => accepted(&id),
        None => ApiError::not_found("job", &id).into(),
    }
}

#[derive(Serialize)]
struct UploadResponse<'a> {
    id: &'a str,
    nodes: usize,
    edges: usize,
}

async fn upload_graph(
    State(state): State<Shared>,
    Query(query): Query<HashMap<String, String>>,
    headers: HeaderMap,
    body: Bytes,
) -> Reply {
    let format = match query.get("format") {
        Some(f) => match f.parse::<GraphFormat>() {
            Ok(f) => f,
            Err(e) => return request_error(e.to_string()).into(),
        },
        None => {
            let json = headers
                .get(header::CONTENT_TYPE)
                .and_then(|v| v.to_str().ok())
                .is_some_and(|v| v.starts_with("application/json"));
            if json {
                GraphFormat::GraphJson
            } else {
                GraphFormat::detect(&body)
            }
        }
    };
    let graph = match parse_graph(&body, format) {
        Ok(g) if g.is_empty() => {
            return ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "parse",
                "graph has no nodes",
            )
            .into()
        }
        Ok(g) => g,
        Err(e) => return ApiError::graph(&e).into(),
    };
    let (id, g) = state.insert_graph(graph);
    Reply::json(
        StatusCode::OK,
        &UploadResponse {
            id: &id,
            nodes: g.node_count(),
            edges: g.edge_count(),
        },
    )
}

async fn get_graph(State(state): State<Shared>, Path(id): Path<String>) -> Reply {
    match state.graph(&id) {
        Ok(g) => Reply::json(StatusCode::OK, &g.to_graph_json(None)),
        Err(e) => e.into(),
    }
}

fn parse_query<T: std::str::FromStr>(
    query: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, ApiError> {
    query
        .get(key)
        .map(|v| {
            v.parse::<T>().map_err(|_| {
                request_error(format!("query parameter `{key}` has invalid value `{v}`"))
            })
        })
        .transpose()
}

fn reject_unknown(query: &HashMap<String, String>, known: &[&str]) -> Result<(), ApiError> {
    let mut unknown: Vec<&String> = query
        .keys()
        .filter(|k| !known.contains(&k.as_str()))
        .collect();
    unknown.sort();
    match unknown.first() {
        Some(k) => Err(request_error(format!(
            "unknown query parameter `{k}` (expected one of {})",
            known.join(", ")
        ))),
        None => Ok(()),
    }
}

fn layout_params(query: &HashMap<String, String>) -> Result<(u64, LayoutParams), ApiError> {
    let mut params = LayoutParams::default();
    if let Some(it) = parse_query(query, "iterations")? {
        params.iterations = it;
    }
    if let Some(theta) = parse_query::<f64>(query, "theta")? {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(request_error("theta must lie in (0, 1]"));
        }
        params.theta = theta;
    }
    Ok((parse_query(query, "seed")?.unwrap_or(0), params))
}

fn graph_layout(
    state: &AppState,
    id: &str,
    g: &WeightedGraph,
    seed: u64,
    params: &LayoutParams,
) -> Arc<Vec<[f64; 2]>> {
    let key = format!("{id}/layout/{seed}/{}/{}", params.iterations, params.theta);
    state
        .layouts
        .get_or_compute(&key, || Arc::new(layout_fr(g, seed, params).positions))
}

async fn get_layout(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> Reply {
    let g = match state.graph(&id) {
        Ok(g) => g,
        Err(e) => return e.into(),
    };
    let (seed, params) = match reject_unknown(&query, &["seed", "iterations", "theta"])
        .and_then(|_| layout_params(&query))
    {
        Ok(p) => p,
        Err(e) => return e.into(),
    };
    let key = format!("{id}/layout/{seed}/{}/{}", params.iterations, params.theta);
    let as_job =
        g.node_count() > state.config.job_threshold_nodes && state.layouts.get(&key).is_none();
    run(state, as_job, key, move |st| {
        let pos = graph_layout(st, &id, &g, seed, &params);
        Reply::json(StatusCode::OK, &g.to_graph_json(Some(&pos)))
    })
    .await
}

const LENS_QUERY: [&str; 7] = [
    "delta",
    "damping",
    "pagerank_tol",
    "max_iter",
    "eigen_tol",
    "eigen_seed",
    "bins",
];

fn lens_spec(kind: LensKind, query: &HashMap<String, String>) -> Result<LensSpec, ApiError> {
    reject_unknown(query, &LENS_QUERY)?;
    let mut spec = LensSpec::new(kind);
    let p = &mut spec.params;
    if let Some(v) = parse_query(query, "delta")? {
        p.delta = v;
    }
    if let Some(v) = parse_query(query, "damping")? {
        p.damping = v;
    }
    if let Some(v) = parse_query(query, "pagerank_tol")? {
        p.pagerank_tol = v;
    }
    if let Some(v) = parse_query(query, "max_iter")? {
        p.max_iter = v;
    }
    if let Some(v) = parse_query(query, "eigen_tol")? {
        p.eigen_tol = v;
    }
    if let Some(v) = parse_query(query, "eigen_seed")? {
        p.eigen_seed = v;
    }
    Ok(spec.canonical())
}

fn lens_key(id: &str, restricted: bool, spec: &LensSpec) -> String {
    format!(
        "{id}/{}/{}",
        if restricted { "lcc" } else { "full" },
        spec.cache_key()
    )
}

/// Lens on the full graph, cached.
fn full_lens(state: &AppState, id: &str, g: &WeightedGraph, spec: &LensSpec) -> LensResult {
    state.lenses.get_or_compute(&lens_key(id, false, spec), || {
        compute_lens(g, spec).map(Arc::new)
    })
}

#[derive(Serialize)]
struct LensResponse<'a> {
    graph_id: &'a str,
    nodes: &'a [String],
    #[serde(flatten)]
    field: &'a LensField,
    histogram: LensHistogram,
}

async fn get_lens(
    State(state): State<Shared>,
    Path((id, kind)): Path<(String, String)>,
    Query(query): Query<HashMap<String, String>>,
) -> Reply {
    let g = match state.graph(&id) {
        Ok(g) => g,
        Err(e) => return e.into(),
    };
    let kind: LensKind = match kind.parse() {
        Ok(k) => k,
        Err(e) => return ApiError::new(StatusCode::NOT_FOUND, "lookup", e.to_string()).into(),
    };
    let spec = match lens_spec(kind, &query) {
        Ok(s) => s,
        Err(e) => return e.into(),
    };
    let bins = match parse_query(&query, "bins") {
        Ok(b) => b.unwrap_or(DEFAULT_BIN_COUNT),
        Err(e) => return e.into(),
    };
    let key = lens_key(&id, false, &spec);
    let as_job =
        g.node_count() > state.config.job_threshold_nodes && state.lenses.get(&key).is_none();
    run(
        state,
        as_job,
        format!("lens:{key}:bins={bins}"),
        move |st| match full_lens(st, &id, &g, &spec) {
            Ok(field) => Reply::json(
                StatusCode::OK,
                &LensResponse {
                    graph_id: &id,
                    nodes: g.labels(),
                    field: &field,
                    histogram: histogram(&field, bins),
                },
            ),
            Err(e) => ApiError::lens(&e, &id).into(),
        },
    )
    .await
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LensArg {
    Name(String),
    Spec(LensSpec),
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct LayoutRequest {
    seed: u64,
    iterations: Option<usize>,
    theta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MogRequest {
    lens: LensArg,
    cover: CoverJson,
    #[serde(default)]
    filter: FilterSpec,
    #[serde(default)]
    layout: LayoutRequest,
}

#[derive(Serialize)]
struct SummaryLayout<'a> {
    seed: u64,
    iterations: usize,
    positions: &'a [[f64; 2]],
}

#[derive(Serialize)]
struct MogResponse<'a> {
    graph_id: &'a str,
    summary: MogSummaryJson,
    layout: SummaryLayout<'a>,
}

async fn post_mog(State(state): State<Shared>, Path(id): Path<String>, body: Bytes) -> Reply {
    let g = match state.graph(&id) {
        Ok(g) => g,
        Err(e) => return e.into(),
    };
    let req: MogRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return request_error(format!("invalid request body: {e}")).into(),
    };
    let spec = match req.lens {
        LensArg::Name(name) => match name.parse() {
            Ok(kind) => LensSpec::new(kind),
            Err(e) => {
                return ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "lens", e.to_string())
                    .into()
            }
        },
        LensArg::Spec(spec) => spec.canonical(),
    };
    let cover = match Cover::from_json(&req.cover) {
        Ok(c) => c,
        Err(e) => return ApiError::cover(&e).into(),
    };
    let mut layout = LayoutParams::default();
    layout.iterations = req.layout.iterations.unwrap_or(layout.iterations);
    if let Some(theta) = req.layout.theta {
        if !(theta > 0.0 && theta <= 1.0) {
            return request_error("layout theta must lie in (0, 1]").into();
        }
        layout.theta = theta;
    }
    let seed = req.layout.seed;
    let filter = req.filter;
    let as_job = g.node_count() > state.config.job_threshold_nodes
        && state.lenses.get(&lens_key(&id, false, &spec)).is_none()
        && state.lenses.get(&lens_key(&id, true, &spec)).is_none();
    let job_key = format!("mog:{id}:{}", String::from_utf8_lossy(&body));
    run(state, as_job, job_key, move |st| {
        let domain = if spec.kind.requires_connectivity() {
            st.domains.get_or_compute(&format!("{id}/lcc"), || {
                Arc::new(LensDomain::for_lens(&g, spec.kind))
            })
        } else {
            Arc::new(LensDomain::Full)
        };
        let field = if domain.is_restricted() {
            st.lenses.get_or_compute(&lens_key(&id, true, &spec), || {
                compute_lens(domain.graph(&g), &spec).map(Arc::new)
            })
        } else {
            full_lens(st, &id, &g, &spec)
        };
        let field = match field {
            Ok(f) => f,
            Err(e) => return ApiError::lens(&e, &id).into(),
        };
        let mut summary = match summarize(&g, &domain, &field, &cover, filter) {
            Ok(s) => s,
            Err(e) => return ApiError::mog(&e, &id).into(),
        };
        summary.meta.graph_id = Some(id.clone());
        let positions = layout_fr(&summary.to_graph(), seed, &layout).positions;
        Reply::json(
            StatusCode::OK,
            &MogResponse {
                graph_id: &id,
                summary: summary.to_json(&g),
                layout: SummaryLayout {
                    seed,
                    iterations: layout.iterations,
                    positions: &positions,
                },
            },
        )
    })
    .await
}
