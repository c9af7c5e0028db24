//! SVG export of a graph or summary drawing.
//!
//! Summary nodes get a radius proportional to the square root of their size
//! (area ∝ size), edges a stroke width proportional to their weight, and a
//! fill from the lens colormap evaluated at the node's mean lens value.

use std::fmt::Write as _;

use crate::graph::WeightedGraph;
use crate::lens::LensKind;
use crate::mapper::MogSummaryJson;

/// Sequential colormap of a lens: darker colours mean lower values.
pub fn lens_color(kind: Option<LensKind>, t: f64) -> [u8; 3] {
    let base: [f64; 3] = match kind {
        Some(LensKind::Agd) => [215.0, 38.0, 31.0],
        Some(LensKind::Density) => [35.0, 160.0, 60.0],
        Some(LensKind::LaplacianL2) | Some(LensKind::LaplacianL3) => [128.0, 50.0, 170.0],
        Some(LensKind::PagerankLog) => [40.0, 100.0, 200.0],
        None => [120.0, 120.0, 120.0],
    };
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.5
    };
    let mut out = [0u8; 3];
    for c in 0..3 {
        let dark = base[c] * 0.25;
        let light = base[c] + (255.0 - base[c]) * 0.55;
        out[c] = (dark + (light - dark) * t).round() as u8;
    }
    out
}

fn hex([r, g, b]: [u8; 3]) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

pub struct DrawNode {
    pub position: [f64; 2],
    pub radius: f64,
    pub value: f64,
    pub title: String,
}

pub struct DrawEdge {
    pub source: usize,
    pub target: usize,
    pub width: f64,
}

pub const CANVAS: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// Writes nodes and edges into an 800×800 SVG, scaling positions to fit.
pub fn draw_svg(nodes: &[DrawNode], edges: &[DrawEdge], lens: Option<LensKind>) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for n in nodes {
        for a in 0..2 {
            lo[a] = lo[a].min(n.position[a]);
            hi[a] = hi[a].max(n.position[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let scale = if span > 0.0 {
        (CANVAS - 2.0 * MARGIN) / span
    } else {
        1.0
    };
    let screen = |p: [f64; 2]| {
        if span > 0.0 {
            [
                MARGIN + (p[0] - lo[0]) * scale,
                MARGIN + (p[1] - lo[1]) * scale,
            ]
        } else {
            [CANVAS / 2.0, CANVAS / 2.0]
        }
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r##"<g stroke="#888888" stroke-opacity="0.7">"##);
    for e in edges {
        let (a, b) = (
            screen(nodes[e.source].position),
            screen(nodes[e.target].position),
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-width="{:.2}"/>"#,
            a[0], a[1], b[0], b[1], e.width
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r##"<g stroke="#333333" stroke-width="0.5">"##);
    for n in nodes {
        let p = screen(n.position);
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{}"><title>{}</title></circle>"#,
            p[0],
            p[1],
            n.radius,
            hex(lens_color(lens, n.value)),
            escape(&n.title)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Summary drawing; `positions` are aligned with `summary.nodes`.
pub fn render_summary_svg(summary: &MogSummaryJson, positions: &[[f64; 2]]) -> String {
    let max_size = summary
        .nodes
        .iter()
        .map(|n| n.size)
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let max_weight = summary
        .edges
        .iter()
        .map(|e| e.weight)
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let index: std::collections::HashMap<usize, usize> = summary
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id, i))
        .collect();
    let nodes: Vec<DrawNode> = summary
        .nodes
        .iter()
        .zip(positions)
        .map(|(n, &p)| DrawNode {
            position: p,
            radius: 4.0 + 20.0 * (n.size as f64 / max_size).sqrt(),
            value: n.mean_lens,
            title: format!("node {} (interval {}, size {})", n.id, n.interval, n.size),
        })
        .collect();
    let edges: Vec<DrawEdge> = summary
        .edges
        .iter()
        .filter_map(|e| {
            Some(DrawEdge {
                source: *index.get(&e.source)?,
                target: *index.get(&e.target)?,
                width: 1.0 + 7.0 * e.weight as f64 / max_weight,
            })
        })
        .collect();
    draw_svg(&nodes, &edges, summary.meta.lens)
}

/// Original-graph drawing coloured by normalized lens values (if any).
pub fn render_graph_svg(
    g: &WeightedGraph,
    positions: &[[f64; 2]],
    lens: Option<(LensKind, &[f64])>,
) -> String {
    let max_weight = g
        .edges()
        .iter()
        .map(|e| e.weight)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let nodes: Vec<DrawNode> = (0..g.node_count())
        .map(|v| DrawNode {
            position: positions[v],
            radius: 4.0,
            value: lens.map_or(0.5, |(_, vals)| vals[v]),
            title: g.label(v).to_owned(),
        })
        .collect();
    let edges: Vec<DrawEdge> = g
        .edges()
        .iter()
        .map(|e| DrawEdge {
            source: e.u,
            target: e.v,
            width: 0.5 + 2.5 * e.weight / max_weight,
        })
        .collect();
    draw_svg(&nodes, &edges, lens.map(|(k, _)| k))
}
