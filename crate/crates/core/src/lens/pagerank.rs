use rayon::prelude::*;

use super::{LensDiagnostics, LensError, LensField, LensKind, LensParams};
use crate::graph::WeightedGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankScores {
    pub scores: Vec<f64>,
    pub iterations: usize,
    /// L1 change of the final iteration.
    pub residual: f64,
}

/// Undirected PageRank by fixed-point iteration from the uniform vector:
/// `R(v) = (1 − d)/|V| + d Σ_{u ∈ N(v)} R(u)/|N(u)|`.
///
/// Edge weights are ignored; only neighbour counts enter the recurrence.
pub fn pagerank_scores(
    g: &WeightedGraph,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PageRankScores, LensError> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(LensError::InvalidParameter(format!(
            "damping must lie in (0, 1), got {damping}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(LensError::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(LensError::EmptyGraph);
    }
    if let Some(v) = (0..n).find(|&v| g.degree(v) == 0) {
        return Err(LensError::IsolatedNode {
            node: g.label(v).to_owned(),
        });
    }
    let teleport = (1.0 - damping) / n as f64;
    let inv_degree: Vec<f64> = (0..n).map(|v| 1.0 / g.degree(v) as f64).collect();
    let mut rank = vec![1.0 / n as f64; n];
    let mut share = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        share
            .par_iter_mut()
            .zip(rank.par_iter().zip(inv_degree.par_iter()))
            .for_each(|(s, (r, inv))| *s = r * inv);
        // pull formulation: every node sums its neighbours in a fixed order
        next.par_iter_mut().enumerate().for_each(|(v, out)| {
            let pulled: f64 = g.neighbor_indices(v).iter().map(|&u| share[u]).sum();
            *out = teleport + damping * pulled;
        });
        residual = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if residual <= tol {
            return Ok(PageRankScores {
                scores: rank,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(LensError::NotConverged {
        lens: LensKind::PagerankLog,
        iterations: max_iter,
        residual,
    })
}

/// PageRank lens: `f(v) = ln R(v)`, then min-max normalized.
pub fn compute_pagerank(
    g: &WeightedGraph,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<LensField, LensError> {
    let pr = pagerank_scores(g, damping, tol, max_iter)?;
    let raw = pr.scores.iter().map(|r| r.ln()).collect();
    let params = LensParams {
        damping,
        pagerank_tol: tol,
        max_iter,
        ..LensParams::default()
    };
    let mut field = LensField::from_raw(LensKind::PagerankLog, params, raw)?;
    field.diagnostics = LensDiagnostics {
        residual: Some(pr.residual),
        iterations: Some(pr.iterations),
        scores: Some(pr.scores),
        ..LensDiagnostics::default()
    };
    Ok(field)
}
