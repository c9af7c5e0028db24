//! Deterministic synthetic graphs.
//!
//! All generators emit unit-weight graphs with nodes labelled `"0".."n-1"`.
//! Numbering follows the usual NetworkX conventions (row-major grids,
//! breadth-first trees) so drawings line up with familiar references.
//!
//! `random_geometric` draws `n` points uniformly in the unit square from a
//! `ChaCha8Rng` seeded with `seed` (x then y per node, via `Rng::random::<f64>`)
//! and joins every pair at Euclidean distance `<= radius`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::WeightedGraph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("unknown generator kind `{0}`")]
    UnknownKind(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Path,
    Cycle,
    Grid,
    BalancedTree,
    ConnectedCaveman,
    TorusMesh,
    Lollipop,
    RandomGeometric,
    CompleteBipartite,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 9] = [
        GeneratorKind::Path,
        GeneratorKind::Cycle,
        GeneratorKind::Grid,
        GeneratorKind::BalancedTree,
        GeneratorKind::ConnectedCaveman,
        GeneratorKind::TorusMesh,
        GeneratorKind::Lollipop,
        GeneratorKind::RandomGeometric,
        GeneratorKind::CompleteBipartite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Path => "path",
            GeneratorKind::Cycle => "cycle",
            GeneratorKind::Grid => "grid",
            GeneratorKind::BalancedTree => "balanced_tree",
            GeneratorKind::ConnectedCaveman => "connected_caveman",
            GeneratorKind::TorusMesh => "torus_mesh",
            GeneratorKind::Lollipop => "lollipop",
            GeneratorKind::RandomGeometric => "random_geometric",
            GeneratorKind::CompleteBipartite => "complete_bipartite",
        }
    }

    /// Parameter names and defaults, in declaration order.
    pub fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            GeneratorKind::Path | GeneratorKind::Cycle => &[("n", 10.0)],
            GeneratorKind::Grid => &[("rows", 4.0), ("cols", 4.0)],
            GeneratorKind::BalancedTree => &[("branching", 2.0), ("height", 4.0)],
            GeneratorKind::ConnectedCaveman => &[("cliques", 6.0), ("size", 5.0)],
            GeneratorKind::TorusMesh => &[("rows", 16.0), ("cols", 16.0)],
            GeneratorKind::Lollipop => &[("clique", 10.0), ("path", 10.0)],
            GeneratorKind::RandomGeometric => &[("n", 1000.0), ("radius", 0.2)],
            GeneratorKind::CompleteBipartite => &[("left", 5.0), ("right", 5.0)],
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.replace('-', "_");
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| GeneratorError::UnknownKind(s.to_owned()))
    }
}

/// A generator kind with its parameters and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_owned(), value);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Parses `key=value` pairs separated by commas, e.g. `rows=4,cols=5`.
    pub fn with_param_string(mut self, params: &str) -> Result<Self, GeneratorError> {
        for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair.split_once('=').ok_or_else(|| {
                GeneratorError::InvalidSpec(format!("expected key=value, got `{pair}`"))
            })?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| GeneratorError::InvalidSpec(format!("`{v}` is not a number")))?;
            self.params.insert(k.trim().to_owned(), value);
        }
        Ok(self)
    }

    /// All parameters with defaults filled in.
    pub fn resolved_params(&self) -> Result<BTreeMap<String, f64>, GeneratorError> {
        let defaults = self.kind.defaults();
        if let Some(unknown) = self
            .params
            .keys()
            .find(|k| !defaults.iter().any(|(d, _)| d == k))
        {
            return Err(GeneratorError::InvalidSpec(format!(
                "`{unknown}` is not a parameter of {}",
                self.kind
            )));
        }
        Ok(defaults
            .iter()
            .map(|&(name, default)| {
                (
                    name.to_owned(),
                    self.params.get(name).copied().unwrap_or(default),
                )
            })
            .collect())
    }

    fn count(&self, name: &str, min: usize) -> Result<usize, GeneratorError> {
        let value = self.real(name)?;
        if value.fract() != 0.0 || value < min as f64 {
            return Err(GeneratorError::InvalidSpec(format!(
                "{} requires integer `{name}` >= {min}, got {value}",
                self.kind
            )));
        }
        Ok(value as usize)
    }

    fn real(&self, name: &str) -> Result<f64, GeneratorError> {
        self.resolved_params()?
            .get(name)
            .copied()
            .ok_or_else(|| GeneratorError::MissingParam(name.to_owned()))
    }
}

/// Builds the graph described by `spec`. Output is identical for identical specs.
pub fn generate(spec: &GeneratorSpec) -> Result<WeightedGraph, GeneratorError> {
    let edges = match spec.kind {
        GeneratorKind::Path => {
            let n = spec.count("n", 1)?;
            (n, (1..n).map(|i| (i - 1, i)).collect())
        }
        GeneratorKind::Cycle => {
            let n = spec.count("n", 3)?;
            (n, (0..n).map(|i| (i, (i + 1) % n)).collect())
        }
        GeneratorKind::Grid => grid(spec.count("rows", 1)?, spec.count("cols", 1)?, false),
        GeneratorKind::TorusMesh => grid(spec.count("rows", 3)?, spec.count("cols", 3)?, true),
        GeneratorKind::BalancedTree => {
            balanced_tree(spec.count("branching", 1)?, spec.count("height", 0)?)
        }
        GeneratorKind::ConnectedCaveman => {
            connected_caveman(spec.count("cliques", 2)?, spec.count("size", 3)?)
        }
        GeneratorKind::Lollipop => lollipop(spec.count("clique", 2)?, spec.count("path", 0)?),
        GeneratorKind::CompleteBipartite => {
            let (a, b) = (spec.count("left", 1)?, spec.count("right", 1)?);
            (
                a + b,
                (0..a)
                    .flat_map(|i| (a..a + b).map(move |j| (i, j)))
                    .collect(),
            )
        }
        GeneratorKind::RandomGeometric => {
            let n = spec.count("n", 1)?;
            let radius = spec.real("radius")?;
            if !(radius.is_finite() && radius > 0.0) {
                return Err(GeneratorError::InvalidSpec(format!(
                    "radius must be positive, got {radius}"
                )));
            }
            random_geometric(n, radius, spec.seed)
        }
    };
    let (n, pairs): (usize, Vec<(usize, usize)>) = edges;
    Ok(
        WeightedGraph::from_edges_numbered(n, pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
            .expect("generators emit simple graphs"),
    )
}

fn grid(rows: usize, cols: usize, wrap: bool) -> (usize, Vec<(usize, usize)>) {
    let at = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((at(r, c), at(r, c + 1)));
            } else if wrap {
                edges.push((at(r, 0), at(r, c)));
            }
            if r + 1 < rows {
                edges.push((at(r, c), at(r + 1, c)));
            } else if wrap {
                edges.push((at(0, c), at(r, c)));
            }
        }
    }
    (rows * cols, edges)
}

fn balanced_tree(branching: usize, height: usize) -> (usize, Vec<(usize, usize)>) {
    let mut n = 1usize;
    let mut level = 1usize;
    for _ in 0..height {
        level *= branching;
        n += level;
    }
    // breadth-first numbering: children of v are v*b+1 ..= v*b+b
    let edges = (1..n)
        .map(|child| ((child - 1) / branching, child))
        .collect();
    (n, edges)
}

fn connected_caveman(cliques: usize, size: usize) -> (usize, Vec<(usize, usize)>) {
    let n = cliques * size;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for start in (0..n).step_by(size) {
        for i in start..start + size {
            for j in i + 1..start + size {
                // one edge per clique is rewired to the previous clique
                if !(i == start && j == start + 1) {
                    edges.push((i, j));
                }
            }
        }
        edges.push(((start + n - 1) % n, start));
    }
    (n, edges)
}

fn lollipop(clique: usize, path: usize) -> (usize, Vec<(usize, usize)>) {
    let mut edges = Vec::new();
    for i in 0..clique {
        for j in i + 1..clique {
            edges.push((i, j));
        }
    }
    for k in clique..clique + path {
        edges.push((k - 1, k));
    }
    (clique + path, edges)
}

fn random_geometric(n: usize, radius: f64, seed: u64) -> (usize, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    // bucket points into cells of side >= radius; only neighbouring cells can hold partners
    let cells = ((1.0 / radius).floor() as usize).clamp(1, 4096);
    let cell_of = |x: f64| ((x * cells as f64) as usize).min(cells - 1);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for (i, &(x, y)) in points.iter().enumerate() {
        buckets[cell_of(y) * cells + cell_of(x)].push(i);
    }
    let r2 = radius * radius;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        let (cx, cy) = (cell_of(x) as isize, cell_of(y) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (cx + dx, cy + dy);
                if nx < 0 || ny < 0 || nx >= cells as isize || ny >= cells as isize {
                    continue;
                }
                for &j in &buckets[ny as usize * cells + nx as usize] {
                    if j <= i {
                        continue;
                    }
                    let (px, py) = points[j];
                    if (px - x).powi(2) + (py - y).powi(2) <= r2 && seen.insert((i, j)) {
                        edges.push((i, j));
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    (n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::connected_components;

    fn gen(kind: GeneratorKind, params: &[(&str, f64)]) -> WeightedGraph {
        let spec = params
            .iter()
            .fold(GeneratorSpec::new(kind), |s, &(k, v)| s.param(k, v));
        generate(&spec).unwrap()
    }

    #[test]
    fn cycle_is_two_regular() {
        let g = gen(GeneratorKind::Cycle, &[("n", 4.0)]);
        assert_eq!((g.node_count(), g.edge_count()), (4, 4));
        assert!((0..4).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn grid_edge_count_matches_enumeration() {
        // oracle: count lattice neighbours (r,c)-(r',c') with |dr|+|dc| = 1 directly
        let k = 4usize;
        let mut oracle = 0;
        for a in 0..k * k {
            for b in a + 1..k * k {
                let (ra, ca, rb, cb) = (a / k, a % k, b / k, b % k);
                if ra.abs_diff(rb) + ca.abs_diff(cb) == 1 {
                    oracle += 1;
                }
            }
        }
        assert_eq!(oracle, 24);
        let g = gen(GeneratorKind::Grid, &[("rows", 4.0), ("cols", 4.0)]);
        assert_eq!((g.node_count(), g.edge_count()), (16, oracle));
    }

    #[test]
    fn balanced_tree_counts() {
        // (9^6 - 1) / 8 = 66,430 nodes, one fewer edge
        let g = gen(
            GeneratorKind::BalancedTree,
            &[("branching", 9.0), ("height", 5.0)],
        );
        assert_eq!((g.node_count(), g.edge_count()), (66_430, 66_429));
        for (b, h) in [(2usize, 3u32), (3, 2), (1, 4), (5, 0)] {
            let g = gen(
                GeneratorKind::BalancedTree,
                &[("branching", b as f64), ("height", h as f64)],
            );
            let expected = if b == 1 {
                h as usize + 1
            } else {
                (b.pow(h + 1) - 1) / (b - 1)
            };
            assert_eq!(g.node_count(), expected);
            assert_eq!(g.edge_count(), expected - 1);
            assert_eq!(connected_components(&g, None).len(), 1);
        }
    }

    #[test]
    fn torus_is_four_regular() {
        for (p, q) in [(16.0, 16.0), (3.0, 5.0)] {
            let g = gen(GeneratorKind::TorusMesh, &[("rows", p), ("cols", q)]);
            assert_eq!(g.edge_count(), 2 * g.node_count());
            assert!((0..g.node_count()).all(|v| g.degree(v) == 4));
            assert_eq!(connected_components(&g, None).len(), 1);
        }
        let spec = GeneratorSpec::new(GeneratorKind::TorusMesh).param("rows", 2.0);
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn caveman_is_connected() {
        for (k, m) in [(2.0, 3.0), (5.0, 4.0), (6.0, 5.0)] {
            let g = gen(
                GeneratorKind::ConnectedCaveman,
                &[("cliques", k), ("size", m)],
            );
            assert_eq!(g.node_count(), (k * m) as usize);
            assert_eq!(connected_components(&g, None).len(), 1);
            // each clique keeps C(m,2) edges: one removed, one added
            assert_eq!(g.edge_count(), (k * m * (m - 1.0) / 2.0) as usize);
        }
    }

    #[test]
    fn lollipop_and_bipartite() {
        let g = gen(GeneratorKind::Lollipop, &[("clique", 4.0), ("path", 3.0)]);
        assert_eq!((g.node_count(), g.edge_count()), (7, 9));
        let star = gen(
            GeneratorKind::CompleteBipartite,
            &[("left", 1.0), ("right", 3.0)],
        );
        assert_eq!(star.degree(0), 3);
        assert_eq!(star.edge_count(), 3);
    }

    #[test]
    fn random_geometric_is_seeded() {
        let spec = GeneratorSpec::new(GeneratorKind::RandomGeometric)
            .param("n", 300.0)
            .param("radius", 0.1)
            .seed(7);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.to_edge_list(), b.to_edge_list());
        let c = generate(&spec.clone().seed(8)).unwrap();
        assert_ne!(a.to_edge_list(), c.to_edge_list());
    }

    #[test]
    fn random_geometric_matches_brute_force() {
        let spec = GeneratorSpec::new(GeneratorKind::RandomGeometric)
            .param("n", 200.0)
            .param("radius", 0.13)
            .seed(3);
        let g = generate(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let mut expected = 0;
        for i in 0..200 {
            for j in i + 1..200 {
                if (pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2) <= 0.13 * 0.13 {
                    expected += 1;
                }
            }
        }
        assert_eq!(g.edge_count(), expected);
    }

    #[test]
    fn random_geometric_thousand_nodes_scale() {
        // expected pair probability in the unit square: pi r^2 - 8/3 r^3 + r^4 / 2
        let g = generate(
            &GeneratorSpec::new(GeneratorKind::RandomGeometric)
                .param("n", 1000.0)
                .param("radius", 0.2),
        )
        .unwrap();
        let p = std::f64::consts::PI * 0.04 - 8.0 / 3.0 * 0.008 + 0.0016 / 2.0;
        let expected = p * 1000.0 * 999.0 / 2.0;
        let m = g.edge_count() as f64;
        assert!((m - expected).abs() < 0.05 * expected, "{m} vs {expected}");
        assert!(m > 40_000.0 && m < 70_000.0);
    }

    #[test]
    fn invalid_specs() {
        let bad = GeneratorSpec::new(GeneratorKind::Grid).param("rows", 2.5);
        assert!(matches!(
            generate(&bad),
            Err(GeneratorError::InvalidSpec(_))
        ));
        let unknown = GeneratorSpec::new(GeneratorKind::Cycle).param("m", 3.0);
        assert!(generate(&unknown).is_err());
        assert!(generate(&GeneratorSpec::new(GeneratorKind::Cycle).param("n", 2.0)).is_err());
        assert!("blob".parse::<GeneratorKind>().is_err());
        assert_eq!(
            "torus-mesh".parse::<GeneratorKind>().unwrap(),
            GeneratorKind::TorusMesh
        );
    }

    #[test]
    fn param_string_parsing() {
        let spec = GeneratorSpec::new(GeneratorKind::Grid)
            .with_param_string("rows=3, cols=5")
            .unwrap();
        let g = generate(&spec).unwrap();
        assert_eq!(g.node_count(), 15);
        assert!(GeneratorSpec::new(GeneratorKind::Grid)
            .with_param_string("rows3")
            .is_err());
    }
}
