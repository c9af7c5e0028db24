use rayon::prelude::*;

use super::{LensError, LensField, LensKind, LensParams};
use crate::graph::{connected_components, sssp, WeightedGraph};

fn require_connected(g: &WeightedGraph, lens: LensKind) -> Result<(), LensError> {
    if g.is_empty() {
        return Err(LensError::EmptyGraph);
    }
    let components = connected_components(g, None).len();
    if components > 1 {
        return Err(LensError::Disconnected { lens, components });
    }
    Ok(())
}

/// Applies `reduce` to the distance row of every source, in parallel.
///
/// Rows are sorted before reduction, so results depend only on the distance
/// multiset: they are independent of thread count and node numbering.
fn per_source<F>(g: &WeightedGraph, reduce: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..g.node_count())
        .into_par_iter()
        .map(|s| {
            let mut row = sssp(g, s);
            row.sort_unstable_by(f64::total_cmp);
            reduce(&row)
        })
        .collect()
}

/// Average geodesic distance: `AGD(v) = (1/|V|) Σ_u d(v, u)`, including `u = v`.
pub fn compute_agd(g: &WeightedGraph) -> Result<LensField, LensError> {
    require_connected(g, LensKind::Agd)?;
    let n = g.node_count() as f64;
    let raw = per_source(g, |row| row.iter().sum::<f64>() / n);
    LensField::from_raw(LensKind::Agd, LensParams::default(), raw)
}

/// Gaussian density estimate: `D(v) = Σ_u exp(−d(u, v)² / δ)`.
pub fn compute_density(g: &WeightedGraph, delta: f64) -> Result<LensField, LensError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(LensError::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    require_connected(g, LensKind::Density)?;
    // descending distance = ascending term size
    let raw = per_source(g, |row| {
        row.iter().rev().map(|d| (-d * d / delta).exp()).sum()
    });
    let params = LensParams {
        delta,
        ..LensParams::default()
    };
    LensField::from_raw(LensKind::Density, params, raw)
}
