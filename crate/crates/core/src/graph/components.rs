use super::{Edge, GraphBuilder, NodeSet, WeightedGraph};

/// Connected components, optionally of the subgraph induced by `restrict`.
///
/// Components are sorted internally and ordered by their smallest index.
pub fn connected_components(g: &WeightedGraph, restrict: Option<&NodeSet>) -> Vec<NodeSet> {
    let n = g.node_count();
    let mut allowed = vec![restrict.is_none(); n];
    if let Some(set) = restrict {
        for v in set.iter() {
            allowed[v] = true;
        }
    }
    let seeds: Box<dyn Iterator<Item = usize>> = match restrict {
        Some(set) => Box::new(set.iter()),
        None => Box::new(0..n),
    };
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in seeds {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s);
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for &u in g.neighbor_indices(v) {
                if allowed[u] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        members.sort_unstable();
        out.push(NodeSet::from_sorted(members));
    }
    out
}

/// A maximum-cardinality component; ties go to the lowest contained index.
pub fn largest_component(g: &WeightedGraph) -> NodeSet {
    connected_components(g, None)
        .into_iter()
        .fold(None::<NodeSet>, |best, c| match best {
            Some(b) if b.len() >= c.len() => Some(b),
            _ => Some(c),
        })
        .unwrap_or_default()
}

/// The subgraph induced by `nodes`, plus the map from new to original indices.
///
/// Relative node and edge order is preserved.
pub fn induced_subgraph(g: &WeightedGraph, nodes: &NodeSet) -> (WeightedGraph, Vec<usize>) {
    let mut new_index = vec![usize::MAX; g.node_count()];
    let mut builder = GraphBuilder::default();
    for v in nodes.iter() {
        new_index[v] = builder.intern(g.label(v));
    }
    for &Edge { u, v, weight } in g.edges() {
        if new_index[u] != usize::MAX && new_index[v] != usize::MAX {
            builder
                .add_indexed_edge(new_index[u], new_index[v], weight, None)
                .expect("edges of a valid graph stay valid");
        }
    }
    (builder.build(), nodes.as_slice().to_vec())
}
