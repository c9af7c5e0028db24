//! Weighted undirected graphs.
//!
//! Nodes carry opaque string labels that are mapped to dense indices in
//! first-appearance order. Adjacency is stored in compressed sparse row form
//! and the graph is immutable once built.

mod components;
mod io;
mod node_set;
mod paths;
mod union_find;

use std::collections::{HashMap, HashSet};

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use components::{connected_components, induced_subgraph, largest_component};
pub use io::{parse_graph, GraphFormat, GraphJson, GraphJsonEdge, GraphJsonNode};
pub use node_set::NodeSet;
pub use paths::{sssp, sssp_from_label};
pub use union_find::DisjointSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}", match .line { Some(l) => format!("line {l}: {message}"), None => message.clone() })]
    Validation {
        line: Option<usize>,
        message: String,
    },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node index {index} out of range for a graph with {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },
}

impl GraphError {
    /// Line number of the offending input, when the error came from parsing.
    pub fn line(&self) -> Option<usize> {
        match self {
            GraphError::Parse { line, .. } => Some(*line),
            GraphError::Validation { line, .. } => *line,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// An immutable weighted undirected graph with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a graph on nodes `0..labels.len()` from index pairs.
    pub fn from_indexed(labels: Vec<String>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::default();
        for label in labels {
            builder.add_node(&label)?;
        }
        for e in edges {
            builder.add_indexed_edge(e.u, e.v, e.weight, None)?;
        }
        Ok(builder.build())
    }

    /// Builds a graph with nodes labelled `"0".."n-1"` and the given edges.
    pub fn from_edges_numbered(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, GraphError> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let edges = edges
            .into_iter()
            .map(|(u, v, weight)| Edge { u, v, weight })
            .collect();
        Self::from_indexed(labels, edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `v` with the connecting edge weight.
    pub fn neighbors(&self, v: usize) -> impl ExactSizeIterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn neighbor_indices(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sum of incident edge weights.
    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.weights[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .sum()
    }

    /// Stable content hash of the canonical graph-json form.
    pub fn content_id(&self) -> String {
        let bytes = serde_json::to_vec(&self.to_graph_json(None)).expect("graph json serializes");
        let digest = Sha256::digest(&bytes);
        hex::encode(&digest[..16])
    }

    /// Relabels nodes so that new index `perm[i]` holds old node `i`.
    ///
    /// Edges keep their order; only node positions move.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, GraphError> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(GraphError::Validation {
                line: None,
                message: format!(
                    "permutation has length {} but graph has {n} nodes",
                    perm.len()
                ),
            });
        }
        let mut labels = vec![String::new(); n];
        for (old, &new) in perm.iter().enumerate() {
            if new >= n {
                return Err(GraphError::IndexOutOfRange { index: new, len: n });
            }
            labels[new] = self.labels[old].clone();
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: perm[e.u],
                v: perm[e.v],
                weight: e.weight,
            })
            .collect();
        Self::from_indexed(labels, edges)
    }
}

/// Incremental graph construction enforcing the graph invariants.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    pairs: HashSet<(usize, usize)>,
}

impl GraphBuilder {
    /// Adds a node, rejecting duplicate labels.
    pub fn add_node(&mut self, label: &str) -> Result<usize, GraphError> {
        if self.index.contains_key(label) {
            return Err(GraphError::Validation {
                line: None,
                message: format!("duplicate node `{label}`"),
            });
        }
        Ok(self.intern(label))
    }

    /// Returns the index for `label`, creating the node on first sight.
    pub fn intern(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), i);
        i
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn add_indexed_edge(
        &mut self,
        u: usize,
        v: usize,
        weight: f64,
        line: Option<usize>,
    ) -> Result<(), GraphError> {
        let n = self.labels.len();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::IndexOutOfRange { index: x, len: n });
            }
        }
        let invalid = |message: String| GraphError::Validation { line, message };
        if !(weight.is_finite() && weight > 0.0) {
            return Err(invalid(format!(
                "edge ({}, {}) has non-positive or non-finite weight {weight}",
                self.labels[u], self.labels[v]
            )));
        }
        if u == v {
            return Err(invalid(format!("self-loop on node `{}`", self.labels[u])));
        }
        if !self.pairs.insert((u.min(v), u.max(v))) {
            return Err(invalid(format!(
                "duplicate edge ({}, {})",
                self.labels[u], self.labels[v]
            )));
        }
        self.edges.push(Edge { u, v, weight });
        Ok(())
    }

    pub fn build(self) -> WeightedGraph {
        let n = self.labels.len();
        let mut degree = vec![0usize; n];
        for e in &self.edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let total = offsets[n];
        let mut targets = vec![0usize; total];
        let mut weights = vec![0f64; total];
        for e in &self.edges {
            targets[cursor[e.u]] = e.v;
            weights[cursor[e.u]] = e.weight;
            cursor[e.u] += 1;
            targets[cursor[e.v]] = e.u;
            weights[cursor[e.v]] = e.weight;
            cursor[e.v] += 1;
        }
        WeightedGraph {
            labels: self.labels,
            index: self.index,
            edges: self.edges,
            offsets,
            targets,
            weights,
        }
    }
}
