use serde::{Deserialize, Serialize};

use super::LensField;

/// Uniform bins over `[0, 1]` of the normalized lens values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LensHistogram {
    pub bin_count: usize,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub const DEFAULT_BIN_COUNT: usize = 50;

/// Bins are half-open `[e_i, e_{i+1})` except the last, which includes 1.
///
/// A `bin_count` of zero is treated as one bin.
pub fn histogram(field: &LensField, bin_count: usize) -> LensHistogram {
    let bins = bin_count.max(1);
    let bin_edges: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    let mut counts = vec![0usize; bins];
    for &x in &field.normalized {
        let mut idx = ((x * bins as f64).floor().max(0.0) as usize).min(bins - 1);
        while idx > 0 && x < bin_edges[idx] {
            idx -= 1;
        }
        while idx + 1 < bins && x >= bin_edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }
    LensHistogram {
        bin_count: bins,
        bin_edges,
        counts,
    }
}
