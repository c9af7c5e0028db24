//! Scalar lenses on graph nodes.
//!
//! Every lens produces raw per-node values plus their min-max normalization
//! to `[0, 1]`, which is what covers and summaries consume.

mod geodesic;
mod histogram;
mod pagerank;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::WeightedGraph;

pub use geodesic::{compute_agd, compute_density};
pub use histogram::{histogram, LensHistogram, DEFAULT_BIN_COUNT};
pub use pagerank::{compute_pagerank, pagerank_scores, PageRankScores};
pub use spectral::{compute_laplacian_eigen, laplacian_apply, EigenWhich};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LensError {
    #[error("{lens} is undefined on a disconnected graph ({components} components); restrict the graph to its largest component")]
    Disconnected { lens: LensKind, components: usize },
    #[error("the Laplacian kernel has dimension {dimension} (graph is disconnected); restrict the graph to its largest component")]
    KernelMultiplicity { dimension: usize },
    #[error("node `{node}` is isolated; PageRank divides by neighbour counts")]
    IsolatedNode { node: String },
    #[error("{lens} needs at least {needed} nodes, graph has {found}")]
    TooFewNodes {
        lens: LensKind,
        needed: usize,
        found: usize,
    },
    #[error("{lens} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        lens: LensKind,
        iterations: usize,
        residual: f64,
    },
    #[error("invalid lens parameter: {0}")]
    InvalidParameter(String),
    #[error("lens value at node index {index} is not finite")]
    NonFinite { index: usize },
    #[error("lens requested on an empty graph")]
    EmptyGraph,
}

impl LensError {
    /// True when the lens is mathematically undefined for this graph, as
    /// opposed to a bad parameter or a numerical failure.
    pub fn is_undefined_on_graph(&self) -> bool {
        matches!(
            self,
            LensError::Disconnected { .. }
                | LensError::KernelMultiplicity { .. }
                | LensError::IsolatedNode { .. }
                | LensError::TooFewNodes { .. }
                | LensError::EmptyGraph
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LensKind {
    #[serde(rename = "agd")]
    Agd,
    #[serde(rename = "density")]
    Density,
    #[serde(rename = "l2")]
    LaplacianL2,
    #[serde(rename = "l3")]
    LaplacianL3,
    #[serde(rename = "pagerank")]
    PagerankLog,
}

impl LensKind {
    pub const ALL: [LensKind; 5] = [
        LensKind::Agd,
        LensKind::Density,
        LensKind::LaplacianL2,
        LensKind::LaplacianL3,
        LensKind::PagerankLog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LensKind::Agd => "agd",
            LensKind::Density => "density",
            LensKind::LaplacianL2 => "l2",
            LensKind::LaplacianL3 => "l3",
            LensKind::PagerankLog => "pagerank",
        }
    }

    /// Whether the lens is only defined on connected graphs.
    pub fn requires_connectivity(self) -> bool {
        !matches!(self, LensKind::PagerankLog)
    }
}

impl fmt::Display for LensKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LensKind {
    type Err = LensError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "agd" => Ok(LensKind::Agd),
            "density" => Ok(LensKind::Density),
            "l2" | "laplacian_l2" | "fiedler" => Ok(LensKind::LaplacianL2),
            "l3" | "laplacian_l3" => Ok(LensKind::LaplacianL3),
            "pagerank" | "pagerank_log" => Ok(LensKind::PagerankLog),
            other => Err(LensError::InvalidParameter(format!(
                "unknown lens `{other}` (expected agd, density, l2, l3 or pagerank)"
            ))),
        }
    }
}

/// Parameters for all lenses; each lens reads only its own fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LensParams {
    /// Kernel width of the density estimate.
    pub delta: f64,
    pub damping: f64,
    /// L1 convergence threshold for PageRank.
    pub pagerank_tol: f64,
    pub max_iter: usize,
    /// Residual bound `‖Lv − λv‖₂` for Laplacian eigenvectors.
    pub eigen_tol: f64,
    /// Seed of the eigensolver's start vector.
    pub eigen_seed: u64,
}

impl Default for LensParams {
    fn default() -> Self {
        Self {
            delta: 2.0,
            damping: 0.85,
            pagerank_tol: 1e-10,
            max_iter: 1000,
            eigen_tol: 1e-8,
            eigen_seed: 0x6d6f67,
        }
    }
}

/// A lens kind together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensSpec {
    pub kind: LensKind,
    #[serde(default, flatten)]
    pub params: LensParams,
}

impl LensSpec {
    pub fn new(kind: LensKind) -> Self {
        Self {
            kind,
            params: LensParams::default(),
        }
    }

    /// The same spec with every parameter this lens does not read reset to
    /// its default, so equal lenses compare equal.
    pub fn canonical(&self) -> LensSpec {
        let d = LensParams::default();
        let p = self.params;
        let params = match self.kind {
            LensKind::Agd => d,
            LensKind::Density => LensParams {
                delta: p.delta,
                ..d
            },
            LensKind::LaplacianL2 | LensKind::LaplacianL3 => LensParams {
                eigen_tol: p.eigen_tol,
                eigen_seed: p.eigen_seed,
                ..d
            },
            LensKind::PagerankLog => LensParams {
                damping: p.damping,
                pagerank_tol: p.pagerank_tol,
                max_iter: p.max_iter,
                ..d
            },
        };
        LensSpec {
            kind: self.kind,
            params,
        }
    }

    /// Canonical key covering exactly the parameters this lens reads.
    pub fn cache_key(&self) -> String {
        let p = &self.params;
        match self.kind {
            LensKind::Agd => "agd".to_owned(),
            LensKind::Density => format!("density:delta={}", p.delta),
            LensKind::LaplacianL2 | LensKind::LaplacianL3 => {
                format!("{}:tol={}:seed={}", self.kind, p.eigen_tol, p.eigen_seed)
            }
            LensKind::PagerankLog => format!(
                "pagerank:d={}:tol={}:max_iter={}",
                p.damping, p.pagerank_tol, p.max_iter
            ),
        }
    }
}

/// Numerical side information reported by iterative lenses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LensDiagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// PageRank scores before the log transform.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<f64>>,
}

/// Per-node lens values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LensField {
    pub kind: LensKind,
    pub params: LensParams,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
    /// Set when the raw values were constant and every node was mapped to 0.5.
    pub constant: bool,
    pub diagnostics: LensDiagnostics,
}

impl LensField {
    pub fn from_raw(kind: LensKind, params: LensParams, raw: Vec<f64>) -> Result<Self, LensError> {
        let normalized = normalize_lens(&raw)?;
        Ok(Self {
            kind,
            params,
            raw,
            constant: normalized.constant,
            normalized: normalized.values,
            diagnostics: LensDiagnostics::default(),
        })
    }

    /// Wraps values that are already in `[0, 1]` (tests and custom lenses).
    pub fn from_normalized(kind: LensKind, values: Vec<f64>) -> Result<Self, LensError> {
        if let Some(index) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(LensError::NonFinite { index });
        }
        Ok(Self {
            kind,
            params: LensParams::default(),
            raw: values.clone(),
            normalized: values,
            constant: false,
            diagnostics: LensDiagnostics::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub values: Vec<f64>,
    pub constant: bool,
}

/// Min-max maps `raw` onto `[0, 1]`; a constant input maps to 0.5 everywhere.
pub fn normalize_lens(raw: &[f64]) -> Result<Normalized, LensError> {
    if let Some(index) = raw.iter().position(|v| !v.is_finite()) {
        return Err(LensError::NonFinite { index });
    }
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if raw.is_empty() || max == min {
        return Ok(Normalized {
            values: vec![0.5; raw.len()],
            constant: true,
        });
    }
    let span = max - min;
    let values = raw
        .iter()
        .map(|&x| {
            if x == min {
                0.0
            } else if x == max {
                1.0
            } else {
                ((x - min) / span).clamp(0.0, 1.0)
            }
        })
        .collect();
    Ok(Normalized {
        values,
        constant: false,
    })
}

/// Computes any lens on `g`.
pub fn compute_lens(g: &WeightedGraph, spec: &LensSpec) -> Result<LensField, LensError> {
    let p = spec.params;
    match spec.kind {
        LensKind::Agd => compute_agd(g),
        LensKind::Density => compute_density(g, p.delta),
        LensKind::LaplacianL2 => {
            compute_laplacian_eigen(g, EigenWhich::L2, p.eigen_tol, p.eigen_seed)
        }
        LensKind::LaplacianL3 => {
            compute_laplacian_eigen(g, EigenWhich::L3, p.eigen_tol, p.eigen_seed)
        }
        LensKind::PagerankLog => compute_pagerank(g, p.damping, p.pagerank_tol, p.max_iter),
    }
    .map(|mut field| {
        field.params = p;
        field
    })
}
