use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{GraphError, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties on node index
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source`. Unreachable nodes get `f64::INFINITY`.
pub fn sssp(g: &WeightedGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        node: source,
    });
    while let Some(Entry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for (next, w) in g.neighbors(node) {
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Entry {
                    dist: nd,
                    node: next,
                });
            }
        }
    }
    dist
}

pub fn sssp_from_label(g: &WeightedGraph, source: &str) -> Result<Vec<f64>, GraphError> {
    let s = g
        .index_of(source)
        .ok_or_else(|| GraphError::UnknownNode(source.to_owned()))?;
    Ok(sssp(g, s))
}
