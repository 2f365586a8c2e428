use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ClassicalError;

/// Assignment of `N` points to `k` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self, ClassicalError> {
        let mut seen = vec![false; k];
        for (i, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(ClassicalError::LabelOutOfRange { index: i, label: l, k });
            }
            seen[l] = true;
        }
        if let Some(cluster) = seen.iter().position(|s| !s) {
            return Err(ClassicalError::EmptyCluster { cluster });
        }
        Ok(Self { labels, k })
    }

    /// Builds a partition from arbitrary labels, renumbering them by first
    /// appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let (k, labels) = relabel(labels);
        Self { labels, k }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
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

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    /// Same clustering with labels renumbered by first appearance.
    pub fn canonical(&self) -> Self {
        Self::from_labels(&self.labels)
    }

    /// True when both partitions group the points identically.
    pub fn same_clusters(&self, other: &Partition) -> bool {
        self.canonical().labels == other.canonical().labels
    }

    /// One label per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for l in &self.labels {
            writeln!(out, "{l}")?;
        }
        Ok(())
    }
}

fn relabel(labels: &[usize]) -> (usize, Vec<usize>) {
    let mut map = std::collections::HashMap::new();
    let out = labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect();
    (map.len(), out)
}
