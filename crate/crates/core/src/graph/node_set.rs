use super::GraphError;

/// A sorted, duplicate-free set of node indices over one graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Checks every index against `node_count`.
    pub fn checked(
        indices: impl IntoIterator<Item = usize>,
        node_count: usize,
    ) -> Result<Self, GraphError> {
        let set: NodeSet = indices.into_iter().collect();
        if let Some(&last) = set.0.last() {
            if last >= node_count {
                return Err(GraphError::IndexOutOfRange {
                    index: last,
                    len: node_count,
                });
            }
        }
        Ok(set)
    }

    /// Wraps an already sorted, deduplicated vector.
    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self(indices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        NodeSet(out)
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        self.0.iter().chain(other.0.iter()).copied().collect()
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        NodeSet(
            self.0
                .iter()
                .copied()
                .filter(|&v| !other.contains(v))
                .collect(),
        )
    }

    /// Maps every index through `map` (e.g. subgraph → parent graph indices).
    pub fn mapped(&self, map: &[usize]) -> NodeSet {
        self.0.iter().map(|&v| map[v]).collect()
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a: NodeSet = [4, 1, 2, 2].into_iter().collect();
        let b: NodeSet = [2, 3, 4].into_iter().collect();
        assert_eq!(a.as_slice(), &[1, 2, 4]);
        assert_eq!(a.intersection(&b).as_slice(), &[2, 4]);
        assert_eq!(a.union(&b).as_slice(), &[1, 2, 3, 4]);
        assert_eq!(a.difference(&b).as_slice(), &[1]);
    }

    #[test]
    fn checked_rejects_out_of_range() {
        assert!(NodeSet::checked([0, 5], 5).is_err());
        assert!(NodeSet::checked([0, 4], 5).is_ok());
    }
}
