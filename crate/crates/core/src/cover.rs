//! Interval covers of the normalized lens range `[0, 1]`.
//!
//! Intervals are open, with one closure rule so that no node is orphaned by
//! the cover's own construction:
//!
//! * a value strictly inside `(lo, hi)` belongs to that interval;
//! * the extreme values 0 and 1 also belong to every interval whose closure
//!   `[lo, hi]` contains them;
//! * a value lying in no open interval belongs to every interval whose closure
//!   contains it (this is the shared breakpoint of abutting intervals when the
//!   overlap is zero).
//!
//! Under this rule exactly the open gaps reported by [`Cover::gaps`] are
//! uncovered.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeSet;
use crate::lens::LensField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    #[error("resolution must be at least 1, got {0}")]
    Resolution(usize),
    #[error("overlap must lie in [0, 1), got {0}")]
    Overlap(f64),
    #[error("no interval with id {0}")]
    UnknownInterval(usize),
    #[error("interval bounds must satisfy lo < hi and be finite, got ({lo}, {hi})")]
    InvertedBounds { lo: f64, hi: f64 },
    #[error("duplicate interval id {0}")]
    DuplicateId(usize),
    #[error("a cover needs at least one interval")]
    Empty,
    #[error("invalid cover json: {0}")]
    Json(String),
}

/// An open interval `(lo, hi)` of lens values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub id: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains_open(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Uniform { n: usize, epsilon: f64 },
    Manual,
}

/// An ordered list of intervals, sorted by midpoint with stable ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    intervals: Vec<Interval>,
    provenance: Provenance,
}

/// Wire form: `{"provenance":"uniform","n":5,"epsilon":0.1,"intervals":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverJson {
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub intervals: Vec<Interval>,
}

/// Nodes assigned to each interval, aligned with [`Cover::intervals`].
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub preimages: Vec<NodeSet>,
    pub uncovered: NodeSet,
}

/// Result of editing one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Modified {
    pub cover: Cover,
    /// Uncovered open sub-ranges of `[0, 1]` after the edit.
    pub gaps: Vec<(f64, f64)>,
}

/// `n` intervals `(c_i − ε, c_{i+1} + ε)` over breakpoints `c_i = i/n`.
pub fn uniform_cover(n: usize, epsilon: f64) -> Result<Cover, CoverError> {
    if n < 1 {
        return Err(CoverError::Resolution(n));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(CoverError::Overlap(epsilon));
    }
    let c = |i: usize| i as f64 / n as f64;
    let intervals = (0..n)
        .map(|i| Interval {
            id: i,
            lo: c(i) - epsilon,
            hi: c(i + 1) + epsilon,
        })
        .collect();
    Ok(Cover {
        intervals,
        provenance: Provenance::Uniform { n, epsilon },
    })
}

impl Cover {
    /// A manual cover from arbitrary intervals.
    pub fn from_intervals(intervals: Vec<Interval>) -> Result<Cover, CoverError> {
        Self::validated(intervals, Provenance::Manual)
    }

    fn validated(
        mut intervals: Vec<Interval>,
        provenance: Provenance,
    ) -> Result<Cover, CoverError> {
        if intervals.is_empty() {
            return Err(CoverError::Empty);
        }
        let mut ids: Vec<usize> = intervals.iter().map(|i| i.id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(CoverError::DuplicateId(w[0]));
        }
        if let Some(bad) = intervals
            .iter()
            .find(|i| !(i.lo.is_finite() && i.hi.is_finite() && i.lo < i.hi))
        {
            return Err(CoverError::InvertedBounds {
                lo: bad.lo,
                hi: bad.hi,
            });
        }
        intervals.sort_by(|a, b| a.midpoint().total_cmp(&b.midpoint()).then(a.id.cmp(&b.id)));
        Ok(Cover {
            intervals,
            provenance,
        })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Interval> {
        self.intervals.iter().find(|i| i.id == id)
    }

    /// Replaces interval `id` with `(new_lo, new_hi)`; the result is manual.
    pub fn modify_interval(
        &self,
        id: usize,
        new_lo: f64,
        new_hi: f64,
    ) -> Result<Modified, CoverError> {
        if !(new_lo.is_finite() && new_hi.is_finite() && new_lo < new_hi) {
            return Err(CoverError::InvertedBounds {
                lo: new_lo,
                hi: new_hi,
            });
        }
        let mut intervals = self.intervals.clone();
        let target = intervals
            .iter_mut()
            .find(|i| i.id == id)
            .ok_or(CoverError::UnknownInterval(id))?;
        target.lo = new_lo;
        target.hi = new_hi;
        let cover = Self::validated(intervals, Provenance::Manual)?;
        let gaps = cover.gaps();
        Ok(Modified { cover, gaps })
    }

    /// Open sub-ranges of `[0, 1]` covered by no interval closure.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let mut sorted = self.intervals.clone();
        sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut gaps = Vec::new();
        let mut reach = 0.0f64;
        let mut started = false;
        for iv in sorted {
            if iv.hi < 0.0 || iv.lo > 1.0 {
                continue;
            }
            let covered_from = iv.lo.max(0.0);
            if (!started && covered_from > 0.0) || (started && covered_from > reach) {
                gaps.push((if started { reach } else { 0.0 }, covered_from.min(1.0)));
            }
            reach = if started { reach.max(iv.hi) } else { iv.hi };
            started = true;
        }
        if !started {
            return vec![(0.0, 1.0)];
        }
        if reach < 1.0 {
            gaps.push((reach, 1.0));
        }
        gaps
    }

    /// Whether every value in `[0, 1]` belongs to some interval.
    pub fn is_total(&self) -> bool {
        self.gaps().is_empty()
    }

    /// Indices (into [`Cover::intervals`]) of the intervals that own `x`.
    pub fn owners(&self, x: f64) -> Vec<usize> {
        let open: Vec<usize> = (0..self.intervals.len())
            .filter(|&i| self.intervals[i].contains_open(x))
            .collect();
        let extreme = x == 0.0 || x == 1.0;
        if open.is_empty() || extreme {
            (0..self.intervals.len())
                .filter(|&i| self.intervals[i].contains_closed(x))
                .collect()
        } else {
            open
        }
    }

    /// Preimage of each interval under the normalized lens.
    pub fn assign_nodes(&self, field: &LensField) -> Assignment {
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); self.intervals.len()];
        let mut uncovered = Vec::new();
        for (v, &x) in field.normalized.iter().enumerate() {
            let owners = self.owners(x);
            if owners.is_empty() {
                uncovered.push(v);
            }
            for i in owners {
                buckets[i].push(v);
            }
        }
        Assignment {
            preimages: buckets.into_iter().map(NodeSet::from_sorted).collect(),
            uncovered: NodeSet::from_sorted(uncovered),
        }
    }

    pub fn to_json(&self) -> CoverJson {
        let (provenance, n, epsilon) = match self.provenance {
            Provenance::Uniform { n, epsilon } => ("uniform", Some(n), Some(epsilon)),
            Provenance::Manual => ("manual", None, None),
        };
        CoverJson {
            provenance: provenance.to_owned(),
            n,
            epsilon,
            intervals: self.intervals.clone(),
        }
    }

    /// Accepts explicit intervals, or just `n`/`epsilon` for a uniform cover.
    pub fn from_json(doc: &CoverJson) -> Result<Cover, CoverError> {
        match (doc.provenance.as_str(), doc.n, doc.epsilon) {
            ("uniform", Some(n), Some(eps)) if doc.intervals.is_empty() => uniform_cover(n, eps),
            ("uniform", Some(n), Some(epsilon)) => {
                Self::validated(doc.intervals.clone(), Provenance::Uniform { n, epsilon })
            }
            ("uniform", _, _) | ("manual", _, _) => Self::from_intervals(doc.intervals.clone()),
            (other, _, _) => Err(CoverError::Json(format!("unknown provenance `{other}`"))),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Cover, CoverError> {
        let doc: CoverJson =
            serde_json::from_str(s).map_err(|e| CoverError::Json(e.to_string()))?;
        Self::from_json(&doc)
    }
}

impl Serialize for Cover {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cover {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = CoverJson::deserialize(d)?;
        Cover::from_json(&doc).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lens::LensKind;
    use proptest::prelude::*;

    fn bounds(c: &Cover) -> Vec<(f64, f64)> {
        c.intervals().iter().map(|i| (i.lo, i.hi)).collect()
    }

    fn field(values: Vec<f64>) -> LensField {
        LensField::from_normalized(LensKind::Agd, values).unwrap()
    }

    fn close(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(x, y)| (x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12)
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(bounds(&uniform_cover(1, 0.0).unwrap()), vec![(0.0, 1.0)]);
        assert!(close(
            &bounds(&uniform_cover(2, 0.1).unwrap()),
            &[(-0.1, 0.6), (0.4, 1.1)]
        ));
        assert!(close(
            &bounds(&uniform_cover(4, 0.1).unwrap()),
            &[(-0.1, 0.35), (0.15, 0.6), (0.4, 0.85), (0.65, 1.1)]
        ));
    }

    #[test]
    fn uniform_parameter_errors() {
        assert_eq!(
            uniform_cover(0, 0.1).unwrap_err(),
            CoverError::Resolution(0)
        );
        assert_eq!(uniform_cover(3, 1.0).unwrap_err(), CoverError::Overlap(1.0));
        assert!(uniform_cover(3, -0.1).is_err());
        assert!(uniform_cover(3, f64::NAN).is_err());
    }

    #[test]
    fn modify_shift() {
        let c = uniform_cover(2, 0.1).unwrap();
        let m = c.modify_interval(1, 0.5, 1.2).unwrap();
        assert_eq!(
            m.cover.get(1).unwrap(),
            &Interval {
                id: 1,
                lo: 0.5,
                hi: 1.2
            }
        );
        assert_eq!(m.cover.get(0), c.get(0));
        assert_eq!(m.cover.provenance(), Provenance::Manual);
        assert!(m.gaps.is_empty());
    }

    #[test]
    fn modify_shrink_keeps_overlap() {
        let c = uniform_cover(2, 0.1).unwrap();
        let m = c.modify_interval(0, 0.0, 0.5).unwrap();
        assert!(m.gaps.is_empty());
    }

    #[test]
    fn modify_shrink_flags_gap() {
        let c = uniform_cover(2, 0.1).unwrap();
        let m = c.modify_interval(0, 0.0, 0.3).unwrap();
        assert_eq!(m.gaps.len(), 1);
        let (lo, hi) = m.gaps[0];
        assert_eq!(lo, 0.3);
        assert!((hi - 0.4).abs() < 1e-12);
        assert!(!m.cover.is_total());
    }

    #[test]
    fn modify_errors() {
        let c = uniform_cover(2, 0.1).unwrap();
        assert_eq!(
            c.modify_interval(7, 0.0, 0.5).unwrap_err(),
            CoverError::UnknownInterval(7)
        );
        assert!(matches!(
            c.modify_interval(0, 0.5, 0.5),
            Err(CoverError::InvertedBounds { .. })
        ));
        assert!(matches!(
            c.modify_interval(0, 0.6, 0.5),
            Err(CoverError::InvertedBounds { .. })
        ));
    }

    #[test]
    fn modify_resorts_but_keeps_ids() {
        let c = uniform_cover(3, 0.0).unwrap();
        let m = c.modify_interval(0, 0.8, 1.5).unwrap();
        let ids: Vec<usize> = m.cover.intervals().iter().map(|i| i.id).collect();
        assert_eq!(ids, vec![1, 2, 0]);
    }

    #[test]
    fn assignment_examples() {
        let f = field(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        let a = uniform_cover(2, 0.1).unwrap().assign_nodes(&f);
        assert_eq!(a.preimages[0].as_slice(), &[0, 1]);
        assert_eq!(a.preimages[1].as_slice(), &[2, 3]);
        let b = uniform_cover(2, 0.2).unwrap().assign_nodes(&f);
        assert_eq!(b.preimages[0].as_slice(), &[0, 1, 2]);
        assert_eq!(b.preimages[1].as_slice(), &[1, 2, 3]);
        let whole = uniform_cover(1, 0.0).unwrap().assign_nodes(&f);
        assert_eq!(whole.preimages[0].len(), 4);
        assert!(whole.uncovered.is_empty());
    }

    #[test]
    fn zero_overlap_breakpoints_shared() {
        let f = field(vec![0.0, 0.5, 1.0]);
        let a = uniform_cover(2, 0.0).unwrap().assign_nodes(&f);
        assert_eq!(a.preimages[0].as_slice(), &[0, 1]);
        assert_eq!(a.preimages[1].as_slice(), &[1, 2]);
    }

    #[test]
    fn extremes_join_every_closing_interval() {
        let c = Cover::from_intervals(vec![
            Interval {
                id: 0,
                lo: 0.0,
                hi: 0.6,
            },
            Interval {
                id: 1,
                lo: 0.5,
                hi: 1.0,
            },
            Interval {
                id: 2,
                lo: 0.8,
                hi: 1.2,
            },
        ])
        .unwrap();
        assert_eq!(c.owners(1.0), vec![1, 2]);
        assert_eq!(c.owners(0.0), vec![0]);
        assert_eq!(c.owners(0.55), vec![0, 1]);
    }

    #[test]
    fn gap_nodes_are_uncovered() {
        let c = uniform_cover(2, 0.1)
            .unwrap()
            .modify_interval(0, 0.0, 0.3)
            .unwrap()
            .cover;
        let a = c.assign_nodes(&field(vec![0.0, 0.3, 0.35, 0.4, 1.0]));
        assert_eq!(a.uncovered.as_slice(), &[2]);
        assert_eq!(a.preimages[0].as_slice(), &[0, 1]);
        assert_eq!(a.preimages[1].as_slice(), &[3, 4]);
    }

    #[test]
    fn json_round_trip_and_shapes() {
        let c = uniform_cover(5, 0.1).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.starts_with(r#"{"provenance":"uniform","n":5,"epsilon":0.1,"intervals":[{"id":0,"lo":-0.1,"hi":0.30000000000000004}"#), "{s}");
        assert_eq!(Cover::from_json_str(&s).unwrap(), c);
        let short =
            Cover::from_json_str(r#"{"provenance":"uniform","n":5,"epsilon":0.1,"intervals":[]}"#)
                .unwrap();
        assert_eq!(short, c);
        let m = c.modify_interval(2, 0.3, 0.7).unwrap().cover;
        let ms = serde_json::to_string(&m).unwrap();
        assert!(ms.starts_with(r#"{"provenance":"manual","intervals":"#));
        assert_eq!(Cover::from_json_str(&ms).unwrap(), m);
        assert!(Cover::from_json_str(
            r#"{"provenance":"adaptive","intervals":[{"id":0,"lo":0,"hi":1}]}"#
        )
        .is_err());
        assert!(Cover::from_json_str(r#"{"provenance":"manual","intervals":[]}"#).is_err());
        assert!(Cover::from_json_str(r#"{"provenance":"manual","intervals":[{"id":0,"lo":0,"hi":1},{"id":0,"lo":0.5,"hi":1}]}"#).is_err());
    }

    proptest! {
        #[test]
        fn uniform_lengths_and_overlaps(n in 1usize..30, eps in 0.0f64..0.5) {
            let c = uniform_cover(n, eps).unwrap();
            let expected = 1.0 / n as f64 + 2.0 * eps;
            for w in c.intervals().windows(2) {
                prop_assert!((w[0].hi - w[1].lo - 2.0 * eps).abs() < 1e-12);
            }
            for i in c.intervals() {
                prop_assert!((i.length() - expected).abs() < 1e-12);
            }
            prop_assert!(c.is_total());
        }

        #[test]
        fn every_value_is_covered_by_uniform(n in 1usize..20, eps in 0.0f64..0.5, values in proptest::collection::vec(0.0f64..=1.0, 1..50), k in 0usize..20) {
            // include exact breakpoints
            let mut values = values;
            values.push((k % (n + 1)) as f64 / n as f64);
            values.push(0.0);
            values.push(1.0);
            let a = uniform_cover(n, eps).unwrap().assign_nodes(&field(values));
            prop_assert!(a.uncovered.is_empty());
        }

        #[test]
        fn enlarging_never_removes(values in proptest::collection::vec(0.0f64..=1.0, 1..40), id in 0usize..4, grow_lo in 0.0f64..0.3, grow_hi in 0.0f64..0.3) {
            let c = uniform_cover(4, 0.05).unwrap();
            let iv = *c.get(id).unwrap();
            let bigger = c.modify_interval(id, iv.lo - grow_lo, iv.hi + grow_hi).unwrap().cover;
            let f = field(values);
            let pos = |cov: &Cover| cov.intervals().iter().position(|i| i.id == id).unwrap();
            let before = &c.assign_nodes(&f).preimages[pos(&c)];
            let after = &bigger.assign_nodes(&f).preimages[pos(&bigger)];
            for v in before.iter() {
                prop_assert!(after.contains(v));
            }
        }
    }
}
