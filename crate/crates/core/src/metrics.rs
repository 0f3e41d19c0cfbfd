//! External clustering scores: contingency tables, entropy, mutual
//! information, NMI and purity, plus the k-means objective.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::{squared_euclidean, FeatureMatrix};
use crate::partition::Partition;

/// `counts[i][j]` = number of elements in predicted cluster `i` and true
/// class `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    k_pred: usize,
    k_true: usize,
    counts: Vec<usize>,
    n: usize,
}

impl ContingencyTable {
    pub fn get(&self, pred: usize, truth: usize) -> usize {
        self.counts[pred * self.k_true + truth]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.k_pred, self.k_true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts
            .chunks_exact(self.k_true)
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.k_true];
        for row in self.counts.chunks_exact(self.k_true) {
            for (s, &c) in sums.iter_mut().zip(row) {
                *s += c;
            }
        }
        sums
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.counts.chunks_exact(self.k_true)
    }
}

fn check_lengths(pred: &Partition, truth: &Partition) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    Ok(())
}

pub fn contingency(pred: &Partition, truth: &Partition) -> Result<ContingencyTable> {
    check_lengths(pred, truth)?;
    let (k_pred, k_true) = (pred.k(), truth.k());
    let mut counts = vec![0; k_pred * k_true];
    for (&p, &t) in pred.labels().iter().zip(truth.labels()) {
        counts[p * k_true + t] += 1;
    }
    Ok(ContingencyTable {
        k_pred,
        k_true,
        counts,
        n: pred.len(),
    })
}

/// How the mutual information is normalized by the two entropies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NmiNormalization {
    /// `MI / sqrt(H(pred) * H(truth))`
    #[default]
    Geometric,
    /// `MI / ((H(pred) + H(truth)) / 2)`
    Arithmetic,
}

impl fmt::Display for NmiNormalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NmiNormalization::Geometric => "geometric",
            NmiNormalization::Arithmetic => "arithmetic",
        })
    }
}

impl FromStr for NmiNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(NmiNormalization::Geometric),
            "arithmetic" => Ok(NmiNormalization::Arithmetic),
            other => Err(Error::InvalidParameter(format!(
                "unknown NMI normalization {other:?}"
            ))),
        }
    }
}

fn entropy_of_counts(counts: impl IntoIterator<Item = usize>, n: f64) -> f64 {
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Shannon entropy of a partition in nats.
pub fn entropy(p: &Partition) -> f64 {
    entropy_of_counts(p.cluster_sizes(), p.len() as f64)
}

/// Mutual information in nats, from a contingency table.
pub fn mutual_information(table: &ContingencyTable) -> f64 {
    let n = table.n as f64;
    let rows = table.row_sums();
    let cols = table.col_sums();
    let mut mi = 0.0;
    for (i, row) in table.rows().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            // c/n * ln(c*n / (a_i * b_j))
            mi += c / n * (c * n / (rows[i] as f64 * cols[j] as f64)).ln();
        }
    }
    mi.max(0.0)
}

/// Normalized mutual information in `[0, 1]`.
///
/// When both partitions are single-cluster the score is 1; when exactly one
/// of them is, it is 0.
pub fn nmi(pred: &Partition, truth: &Partition, norm: NmiNormalization) -> Result<f64> {
    let table = contingency(pred, truth)?;
    if table.n == 0 {
        return Err(Error::InvalidParameter("NMI of empty partitions".into()));
    }
    let n = table.n as f64;
    let h_pred = entropy_of_counts(table.row_sums(), n);
    let h_true = entropy_of_counts(table.col_sums(), n);
    match (h_pred == 0.0, h_true == 0.0) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let mi = mutual_information(&table);
    let denom = match norm {
        NmiNormalization::Geometric => (h_pred * h_true).sqrt(),
        NmiNormalization::Arithmetic => 0.5 * (h_pred + h_true),
    };
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Fraction of elements that belong to the majority true class of their
/// predicted cluster.
pub fn purity(pred: &Partition, truth: &Partition) -> Result<f64> {
    let table = contingency(pred, truth)?;
    if table.n == 0 {
        return Err(Error::InvalidParameter("purity of empty partitions".into()));
    }
    let majority: usize = table
        .rows()
        .map(|r| r.iter().copied().max().unwrap_or(0))
        .sum();
    Ok(majority as f64 / table.n as f64)
}

/// Per-cluster means of `m` under `p`. Fails if any cluster in `[0, k)` has
/// no member.
pub fn centroids(m: &FeatureMatrix, p: &Partition) -> Result<Vec<f64>> {
    if p.len() != m.rows() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: m.rows(),
        });
    }
    let d = m.dims();
    let mut sums = vec![0.0; p.k() * d];
    let sizes = p.cluster_sizes();
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster(empty));
    }
    for (row, &l) in m.iter_rows().zip(p.labels()) {
        for (s, v) in sums[l * d..(l + 1) * d].iter_mut().zip(row) {
            *s += v;
        }
    }
    for (c, chunk) in sums.chunks_exact_mut(d).enumerate() {
        let size = sizes[c] as f64;
        chunk.iter_mut().for_each(|s| *s /= size);
    }
    Ok(sums)
}

/// Sum of squared distances of each row to the mean of its cluster.
pub fn inertia(m: &FeatureMatrix, p: &Partition) -> Result<f64> {
    let c = centroids(m, p)?;
    let d = m.dims();
    Ok(m
        .iter_rows()
        .zip(p.labels())
        .map(|(row, &l)| squared_euclidean(row, &c[l * d..(l + 1) * d]))
        .sum())
}
