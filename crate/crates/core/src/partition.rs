use crate::error::{Error, Result};

/// Assignment of `n` elements to `k` clusters. Labels are arbitrary up to
/// permutation; compare partitions through [`Partition::canonical`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Checks every label is `< k`. Unused cluster indices are allowed here;
    /// see [`Partition::is_canonical`].
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPartition("k must be at least 1".into()));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::InvalidPartition(format!(
                "label {l} at position {i} is not below k={k}"
            )));
        }
        Ok(Partition { labels, k })
    }

    /// Builds a partition with `k = max(label) + 1`.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let k = labels.iter().max().map_or(1, |&m| m + 1);
        Partition { labels, k }
    }

    /// Maps arbitrary hashable tokens (class names, raw labels read from a
    /// file) to cluster indices in order of first appearance.
    pub fn from_tokens<T: Eq + std::hash::Hash>(tokens: impl IntoIterator<Item = T>) -> Self {
        let mut seen = std::collections::HashMap::new();
        let labels: Vec<usize> = tokens
            .into_iter()
            .map(|t| {
                let next = seen.len();
                *seen.entry(t).or_insert(next)
            })
            .collect();
        let k = seen.len().max(1);
        Partition { labels, k }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Relabels clusters in order of first appearance and drops unused
    /// indices, so that equal groupings compare equal.
    pub fn canonical(&self) -> Partition {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Partition {
            labels,
            k: next.max(1),
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Whether both partitions group elements identically.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.canonical() == other.canonical()
    }
}
