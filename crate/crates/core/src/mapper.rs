//! The summary graph: pullback of a cover through a lens, then the
//! 1-skeleton of the nerve of the resulting connected pieces.

use std::borrow::Cow;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{Cover, CoverError, CoverJson};
use crate::graph::{
    connected_components, induced_subgraph, largest_component, DisjointSet, NodeSet, WeightedGraph,
};
use crate::lens::{compute_lens, LensError, LensField, LensKind, LensSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MogError {
    #[error("lens stage: {0}")]
    Lens(#[from] LensError),
    #[error("cover stage: {0}")]
    Cover(#[from] CoverError),
    #[error("pullback stage: lens has {lens} values but the graph has {graph} nodes")]
    LensSize { lens: usize, graph: usize },
}

impl MogError {
    pub fn stage(&self) -> &'static str {
        match self {
            MogError::Lens(_) => "lens",
            MogError::Cover(_) => "cover",
            MogError::LensSize { .. } => "pullback",
        }
    }
}

/// One connected piece of one interval's preimage.
#[derive(Debug, Clone, PartialEq)]
pub struct MogNode {
    pub id: usize,
    pub interval_id: usize,
    pub members: NodeSet,
    /// Mean normalized lens value over the members.
    pub mean_lens: f64,
}

impl MogNode {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MogEdge {
    pub source: usize,
    pub target: usize,
    pub intersection: NodeSet,
}

impl MogEdge {
    pub fn weight(&self) -> usize {
        self.intersection.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterSpec {
    /// Summary nodes with fewer members are dropped.
    pub min_size: usize,
    /// Keep only the largest connected component of the summary.
    pub largest_only: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryMeta {
    pub lens: Option<LensKind>,
    pub cover: Option<Cover>,
    pub graph_id: Option<String>,
    /// Set when the lens needed connectivity and was computed on the largest component.
    pub restricted_to_largest_component: bool,
    /// Number of graph nodes the lens was computed on.
    pub lens_domain_size: usize,
    pub uncovered: NodeSet,
    pub gaps: Vec<(f64, f64)>,
    pub lens_constant: bool,
}

/// The summary graph with memberships.
#[derive(Debug, Clone, PartialEq)]
pub struct MogSummary {
    pub nodes: Vec<MogNode>,
    pub edges: Vec<MogEdge>,
    pub filter: FilterSpec,
    pub meta: SummaryMeta,
}

/// Components of every interval's preimage, ordered by interval (cover
/// order) and then by smallest member.
pub fn pullback(
    g: &WeightedGraph,
    field: &LensField,
    cover: &Cover,
) -> Result<Vec<MogNode>, MogError> {
    let assignment = check_field(g, field).map(|_| cover.assign_nodes(field))?;
    Ok(pullback_assigned(g, field, cover, &assignment.preimages))
}

fn check_field(g: &WeightedGraph, field: &LensField) -> Result<(), MogError> {
    if field.len() != g.node_count() {
        return Err(MogError::LensSize {
            lens: field.len(),
            graph: g.node_count(),
        });
    }
    Ok(())
}

fn pullback_assigned(
    g: &WeightedGraph,
    field: &LensField,
    cover: &Cover,
    preimages: &[NodeSet],
) -> Vec<MogNode> {
    let pieces: Vec<Vec<NodeSet>> = preimages
        .par_iter()
        .map(|pre| connected_components(g, Some(pre)))
        .collect();
    let mut nodes = Vec::new();
    for (interval, comps) in cover.intervals().iter().zip(pieces) {
        for members in comps {
            let mean_lens =
                members.iter().map(|v| field.normalized[v]).sum::<f64>() / members.len() as f64;
            nodes.push(MogNode {
                id: nodes.len(),
                interval_id: interval.id,
                members,
                mean_lens,
            });
        }
    }
    nodes
}

/// Edges between every pair of nodes whose members intersect, ordered by
/// `(source, target)` with `source < target`. Higher simplices are not formed.
pub fn nerve_edges(nodes: &[MogNode]) -> Vec<MogEdge> {
    let universe = nodes
        .iter()
        .filter_map(|n| n.members.as_slice().last())
        .max()
        .map_or(0, |m| m + 1);
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); universe];
    for (i, node) in nodes.iter().enumerate() {
        for v in node.members.iter() {
            owners[v].push(i);
        }
    }
    let mut shared: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (v, list) in owners.iter().enumerate() {
        for (k, &a) in list.iter().enumerate() {
            for &b in &list[k + 1..] {
                assert_ne!(
                    nodes[a].interval_id, nodes[b].interval_id,
                    "components of one preimage must be disjoint"
                );
                shared.entry((a.min(b), a.max(b))).or_default().push(v);
            }
        }
    }
    shared
        .into_iter()
        .map(|((a, b), vs)| MogEdge {
            source: nodes[a].id,
            target: nodes[b].id,
            intersection: NodeSet::from_sorted(vs),
        })
        .collect()
}

/// The 1-skeleton of the nerve of `nodes`, unfiltered and without metadata.
pub fn nerve(nodes: Vec<MogNode>) -> MogSummary {
    let edges = nerve_edges(&nodes);
    MogSummary {
        nodes,
        edges,
        filter: FilterSpec::default(),
        meta: SummaryMeta::default(),
    }
}

/// Drops small nodes and, optionally, everything outside the largest
/// summary component (ties go to the component with the smallest node id).
/// Node ids are preserved.
pub fn filter_summary(s: &MogSummary, filter: FilterSpec) -> MogSummary {
    let mut keep: Vec<bool> = s
        .nodes
        .iter()
        .map(|n| n.size() >= filter.min_size)
        .collect();
    let position: BTreeMap<usize, usize> =
        s.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    if filter.largest_only {
        let mut ds = DisjointSet::new(s.nodes.len());
        for e in &s.edges {
            let (a, b) = (position[&e.source], position[&e.target]);
            if keep[a] && keep[b] {
                ds.union(a, b);
            }
        }
        let best = ds
            .groups()
            .into_iter()
            .filter(|grp| keep[grp[0]])
            .map(|grp| {
                let min_id = grp.iter().map(|&i| s.nodes[i].id).min().unwrap();
                (grp, min_id)
            })
            .fold(None::<(Vec<usize>, usize)>, |best, cand| match best {
                Some(b)
                    if b.0.len() > cand.0.len() || (b.0.len() == cand.0.len() && b.1 < cand.1) =>
                {
                    Some(b)
                }
                _ => Some(cand),
            });
        let mut in_best = vec![false; s.nodes.len()];
        if let Some((grp, _)) = best {
            for i in grp {
                in_best[i] = true;
            }
        }
        keep.iter_mut().zip(in_best).for_each(|(k, b)| *k &= b);
    }
    let nodes = s
        .nodes
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(n, _)| n.clone())
        .collect();
    let edges = s
        .edges
        .iter()
        .filter(|e| keep[position[&e.source]] && keep[position[&e.target]])
        .cloned()
        .collect();
    MogSummary {
        nodes,
        edges,
        filter,
        meta: s.meta.clone(),
    }
}

/// The graph a lens is evaluated on: the whole graph, or its largest
/// component when the lens needs connectivity and the graph has several.
#[derive(Debug, Clone)]
pub enum LensDomain {
    Full,
    LargestComponent {
        graph: WeightedGraph,
        to_parent: Vec<usize>,
    },
}

impl LensDomain {
    pub fn for_lens(g: &WeightedGraph, kind: LensKind) -> LensDomain {
        if kind.requires_connectivity() && connected_components(g, None).len() > 1 {
            let (graph, to_parent) = induced_subgraph(g, &largest_component(g));
            LensDomain::LargestComponent { graph, to_parent }
        } else {
            LensDomain::Full
        }
    }

    pub fn graph<'a>(&'a self, parent: &'a WeightedGraph) -> &'a WeightedGraph {
        match self {
            LensDomain::Full => parent,
            LensDomain::LargestComponent { graph, .. } => graph,
        }
    }

    pub fn is_restricted(&self) -> bool {
        matches!(self, LensDomain::LargestComponent { .. })
    }

    fn lift<'a>(&self, set: &'a NodeSet) -> Cow<'a, NodeSet> {
        match self {
            LensDomain::Full => Cow::Borrowed(set),
            LensDomain::LargestComponent { to_parent, .. } => Cow::Owned(set.mapped(to_parent)),
        }
    }
}

/// Pullback, nerve and filter for a lens already evaluated on `domain`.
/// Memberships in the result index into `g`.
pub fn summarize(
    g: &WeightedGraph,
    domain: &LensDomain,
    field: &LensField,
    cover: &Cover,
    filter: FilterSpec,
) -> Result<MogSummary, MogError> {
    let work = domain.graph(g);
    check_field(work, field)?;
    let assignment = cover.assign_nodes(field);
    let mut nodes = pullback_assigned(work, field, cover, &assignment.preimages);
    if domain.is_restricted() {
        for node in &mut nodes {
            node.members = domain.lift(&node.members).into_owned();
        }
    }
    let mut summary = nerve(nodes);
    summary.meta = SummaryMeta {
        lens: Some(field.kind),
        cover: Some(cover.clone()),
        graph_id: None,
        restricted_to_largest_component: domain.is_restricted(),
        lens_domain_size: work.node_count(),
        uncovered: domain.lift(&assignment.uncovered).into_owned(),
        gaps: cover.gaps(),
        lens_constant: field.constant,
    };
    Ok(filter_summary(&summary, filter))
}

/// Lens, cover pullback, nerve and filter in one call.
pub fn compute_mog(
    g: &WeightedGraph,
    lens: &LensSpec,
    cover: &Cover,
    filter: FilterSpec,
) -> Result<MogSummary, MogError> {
    let domain = LensDomain::for_lens(g, lens.kind);
    let field = compute_lens(domain.graph(g), lens)?;
    summarize(g, &domain, &field, cover, filter)
}

impl MogSummary {
    /// Number of independent cycles, `|E| − |V| + components`.
    pub fn cycle_rank(&self) -> usize {
        let position: BTreeMap<usize, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect();
        let mut ds = DisjointSet::new(self.nodes.len());
        let mut components = self.nodes.len();
        for e in &self.edges {
            if ds.union(position[&e.source], position[&e.target]) {
                components -= 1;
            }
        }
        self.edges.len() + components - self.nodes.len()
    }

    /// The summary as a weighted graph: one node per summary node (labelled
    /// by id), edge weight = intersection size.
    pub fn to_graph(&self) -> WeightedGraph {
        let position: BTreeMap<usize, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect();
        WeightedGraph::from_indexed(
            self.nodes.iter().map(|n| n.id.to_string()).collect(),
            self.edges
                .iter()
                .map(|e| crate::graph::Edge {
                    u: position[&e.source],
                    v: position[&e.target],
                    weight: e.weight() as f64,
                })
                .collect(),
        )
        .expect("summary edges are simple")
    }

    pub fn to_json(&self, g: &WeightedGraph) -> MogSummaryJson {
        let labels = |set: &NodeSet| {
            set.iter()
                .map(|v| g.label(v).to_owned())
                .collect::<Vec<_>>()
        };
        MogSummaryJson {
            nodes: self
                .nodes
                .iter()
                .map(|n| MogNodeJson {
                    id: n.id,
                    interval: n.interval_id,
                    size: n.size(),
                    mean_lens: n.mean_lens,
                    members: labels(&n.members),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| MogEdgeJson {
                    source: e.source,
                    target: e.target,
                    weight: e.weight(),
                    intersection: labels(&e.intersection),
                })
                .collect(),
            filter: self.filter,
            meta: MetaJson {
                lens: self.meta.lens,
                cover: self.meta.cover.as_ref().map(Cover::to_json),
                graph_id: self.meta.graph_id.clone(),
                graph_nodes: g.node_count(),
                graph_edges: g.edge_count(),
                restricted_to_largest_component: self.meta.restricted_to_largest_component,
                lens_domain_size: self.meta.lens_domain_size,
                uncovered: labels(&self.meta.uncovered),
                gaps: self.meta.gaps.iter().map(|&(a, b)| [a, b]).collect(),
                lens_constant: self.meta.lens_constant,
            },
        }
    }
}

/// Wire form of a summary; memberships are node labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MogSummaryJson {
    pub nodes: Vec<MogNodeJson>,
    pub edges: Vec<MogEdgeJson>,
    pub filter: FilterSpec,
    pub meta: MetaJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MogNodeJson {
    pub id: usize,
    pub interval: usize,
    pub size: usize,
    pub mean_lens: f64,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MogEdgeJson {
    pub source: usize,
    pub target: usize,
    pub weight: usize,
    pub intersection: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaJson {
    pub lens: Option<LensKind>,
    pub cover: Option<CoverJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_id: Option<String>,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub restricted_to_largest_component: bool,
    pub lens_domain_size: usize,
    pub uncovered: Vec<String>,
    pub gaps: Vec<[f64; 2]>,
    pub lens_constant: bool,
}

impl MogSummaryJson {
    /// The summary as a weighted graph for layout and rendering.
    pub fn to_graph(&self) -> WeightedGraph {
        let position: BTreeMap<usize, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect();
        WeightedGraph::from_indexed(
            self.nodes.iter().map(|n| n.id.to_string()).collect(),
            self.edges
                .iter()
                .filter(|e| position.contains_key(&e.source) && position.contains_key(&e.target))
                .map(|e| crate::graph::Edge {
                    u: position[&e.source],
                    v: position[&e.target],
                    weight: e.weight.max(1) as f64,
                })
                .collect(),
        )
        .expect("summary edges are simple")
    }
}
