//! Fruchterman–Reingold placement with Barnes–Hut repulsion.
//!
//! Forces follow the original formulation: repulsion `k²/d` between every
//! pair, attraction `w·d²/k` along each edge of weight `w`, with
//! `k = sqrt(area/|V|)`. Displacements are capped by a temperature that cools
//! linearly to zero. The final drawing is centred on the origin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::WeightedGraph;

pub const DEFAULT_ITERATIONS: usize = 300;
pub const DEFAULT_THETA: f64 = 0.5;

/// Cells deeper than this are not split further (coincident points).
const MAX_DEPTH: usize = 48;
/// Distances below this are treated as coincident.
const MIN_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutParams {
    pub iterations: usize,
    /// Barnes–Hut opening criterion; `0` means exact repulsion.
    pub theta: f64,
    /// Drawing area; `None` means `|V|`, i.e. `k = 1`.
    pub area: Option<f64>,
    /// Initial temperature as a fraction of the drawing width.
    pub initial_temperature: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            theta: DEFAULT_THETA,
            area: None,
            initial_temperature: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    pub positions: Vec<[f64; 2]>,
    pub seed: u64,
    pub iterations: usize,
}

fn area_of(n: usize, params: &LayoutParams) -> f64 {
    params
        .area
        .filter(|a| a.is_finite() && *a > 0.0)
        .unwrap_or(n.max(1) as f64)
}

/// Ideal spring length `sqrt(area/|V|)`.
pub fn ideal_length(n: usize, params: &LayoutParams) -> f64 {
    (area_of(n, params) / n.max(1) as f64).sqrt()
}

/// Seeded uniform positions in the square of the given area, centred on the origin.
pub fn initial_positions(n: usize, seed: u64, params: &LayoutParams) -> Vec<[f64; 2]> {
    let side = area_of(n, params).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x = rng.random::<f64>() - 0.5;
            let y = rng.random::<f64>() - 0.5;
            [x * side, y * side]
        })
        .collect()
}

pub fn layout_fr(g: &WeightedGraph, seed: u64, params: &LayoutParams) -> LayoutResult {
    let n = g.node_count();
    let mut pos = initial_positions(n, seed, params);
    let k = ideal_length(n, params);
    let t0 = params.initial_temperature * area_of(n, params).sqrt();
    for it in 0..params.iterations {
        let temperature = t0 * (1.0 - it as f64 / params.iterations as f64);
        step(g, &mut pos, k, params.theta, temperature);
    }
    center(&mut pos);
    LayoutResult {
        positions: pos,
        seed,
        iterations: params.iterations,
    }
}

/// One FR iteration at the given temperature.
fn step(g: &WeightedGraph, pos: &mut [[f64; 2]], k: f64, theta: f64, temperature: f64) {
    let mut disp = repulsive_forces(pos, k, theta);
    for e in g.edges() {
        let (dx, dy, d) = separation(pos, e.u, e.v);
        let f = e.weight * d * d / k;
        let (fx, fy) = (dx / d * f, dy / d * f);
        disp[e.u][0] -= fx;
        disp[e.u][1] -= fy;
        disp[e.v][0] += fx;
        disp[e.v][1] += fy;
    }
    for (p, d) in pos.iter_mut().zip(&disp) {
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if len > 0.0 && len.is_finite() {
            let s = len.min(temperature) / len;
            p[0] += d[0] * s;
            p[1] += d[1] * s;
        }
    }
}

/// Vector from `v` to `u` and its length, with a deterministic unit offset
/// for coincident points.
fn separation(pos: &[[f64; 2]], u: usize, v: usize) -> (f64, f64, f64) {
    let dx = pos[u][0] - pos[v][0];
    let dy = pos[u][1] - pos[v][1];
    let d = (dx * dx + dy * dy).sqrt();
    if d >= MIN_DISTANCE {
        return (dx, dy, d);
    }
    let angle = (u as f64 * 0.618_033_988_75 - v as f64 * 0.414_213_562_37) * std::f64::consts::TAU;
    (
        angle.cos() * MIN_DISTANCE,
        angle.sin() * MIN_DISTANCE,
        MIN_DISTANCE,
    )
}

fn center(pos: &mut [[f64; 2]]) {
    if pos.is_empty() {
        return;
    }
    let n = pos.len() as f64;
    let cx = pos.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pos.iter().map(|p| p[1]).sum::<f64>() / n;
    for p in pos.iter_mut() {
        p[0] -= cx;
        p[1] -= cy;
    }
}

/// Total repulsive force `Σ_j k²/d_ij` on every node; `theta = 0` is exact.
pub fn repulsive_forces(pos: &[[f64; 2]], k: f64, theta: f64) -> Vec<[f64; 2]> {
    let k2 = k * k;
    if theta <= 0.0 || pos.len() < 2 {
        return (0..pos.len())
            .map(|i| {
                let mut f = [0.0; 2];
                for j in 0..pos.len() {
                    if i != j {
                        let (dx, dy, d) = separation(pos, i, j);
                        let s = k2 / (d * d);
                        f[0] += dx * s;
                        f[1] += dy * s;
                    }
                }
                f
            })
            .collect();
    }
    let tree = QuadTree::build(pos);
    (0..pos.len())
        .map(|i| tree.force_on(pos, i, k2, theta))
        .collect()
}

/// FR potential: `Σ_edges w·d³/(3k) − Σ_pairs k² ln d`.
pub fn layout_energy(g: &WeightedGraph, pos: &[[f64; 2]], k: f64) -> f64 {
    let spring: f64 = g
        .edges()
        .iter()
        .map(|e| e.weight * separation(pos, e.u, e.v).2.powi(3) / (3.0 * k))
        .sum();
    let mut repulsion = 0.0;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            repulsion -= k * k * separation(pos, i, j).2.ln();
        }
    }
    spring + repulsion
}

struct Cell {
    cx: f64,
    cy: f64,
    half: f64,
    mass: f64,
    com: [f64; 2],
    children: Option<[usize; 4]>,
    points: Vec<usize>,
}

struct QuadTree {
    cells: Vec<Cell>,
}

impl QuadTree {
    fn build(pos: &[[f64; 2]]) -> QuadTree {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in pos {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let half = 0.5 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(MIN_DISTANCE) * (1.0 + 1e-9);
        let mut tree = QuadTree { cells: Vec::new() };
        let all: Vec<usize> = (0..pos.len()).collect();
        tree.insert(
            pos,
            all,
            0.5 * (lo[0] + hi[0]),
            0.5 * (lo[1] + hi[1]),
            half,
            0,
        );
        tree
    }

    fn insert(
        &mut self,
        pos: &[[f64; 2]],
        idx: Vec<usize>,
        cx: f64,
        cy: f64,
        half: f64,
        depth: usize,
    ) -> usize {
        let mass = idx.len() as f64;
        let com = [
            idx.iter().map(|&i| pos[i][0]).sum::<f64>() / mass,
            idx.iter().map(|&i| pos[i][1]).sum::<f64>() / mass,
        ];
        let id = self.cells.len();
        self.cells.push(Cell {
            cx,
            cy,
            half,
            mass,
            com,
            children: None,
            points: Vec::new(),
        });
        if idx.len() <= 1 || depth >= MAX_DEPTH {
            self.cells[id].points = idx;
            return id;
        }
        let mut quads: [Vec<usize>; 4] = Default::default();
        for i in idx {
            let q = usize::from(pos[i][0] >= cx) + 2 * usize::from(pos[i][1] >= cy);
            quads[q].push(i);
        }
        let h = 0.5 * half;
        let mut children = [usize::MAX; 4];
        for (q, members) in quads.into_iter().enumerate() {
            if !members.is_empty() {
                let ox = if q & 1 == 1 { h } else { -h };
                let oy = if q & 2 == 2 { h } else { -h };
                children[q] = self.insert(pos, members, cx + ox, cy + oy, h, depth + 1);
            }
        }
        self.cells[id].children = Some(children);
        id
    }

    fn force_on(&self, pos: &[[f64; 2]], i: usize, k2: f64, theta: f64) -> [f64; 2] {
        let mut f = [0.0; 2];
        let mut stack = vec![0usize];
        let [x, y] = pos[i];
        while let Some(c) = stack.pop() {
            let cell = &self.cells[c];
            let inside = (x - cell.cx).abs() <= cell.half && (y - cell.cy).abs() <= cell.half;
            match cell.children {
                Some(children) => {
                    let dx = x - cell.com[0];
                    let dy = y - cell.com[1];
                    let d = (dx * dx + dy * dy).sqrt();
                    if !inside && d > 0.0 && 2.0 * cell.half / d < theta {
                        let s = cell.mass * k2 / (d * d);
                        f[0] += dx * s;
                        f[1] += dy * s;
                    } else {
                        stack.extend(children.iter().rev().filter(|&&ch| ch != usize::MAX));
                    }
                }
                None => {
                    for &j in &cell.points {
                        if j != i {
                            let (dx, dy, d) = separation(pos, i, j);
                            let s = k2 / (d * d);
                            f[0] += dx * s;
                            f[1] += dy * s;
                        }
                    }
                }
            }
        }
        f
    }
}
