use serde::Serialize;

/// A partition of `N` observations into at most `n_clusters` groups, with
/// labels in `0..n_clusters`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Labeling {
    labels: Vec<usize>,
    n_clusters: usize,
}

impl Labeling {
    /// Panics if a label is out of range.
    pub fn new(labels: Vec<usize>, n_clusters: usize) -> Self {
        assert!(labels.iter().all(|&l| l < n_clusters), "label out of range 0..{n_clusters}");
        Self { labels, n_clusters }
    }

    /// Renumbers labels in order of first appearance.
    pub fn canonical(labels: &[usize], n_clusters: usize) -> Self {
        let mut map = std::collections::HashMap::new();
        let relabeled = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self::new(relabeled, n_clusters.max(map.len()))
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Members of each cluster, in index order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_clusters];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// True if both labelings induce the same partition.
    pub fn same_partition(&self, other: &[usize]) -> bool {
        if other.len() != self.labels.len() {
            return false;
        }
        let a = Self::canonical(&self.labels, 0);
        let b = Self::canonical(other, 0);
        a.labels == b.labels
    }
}
