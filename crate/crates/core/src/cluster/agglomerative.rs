//! Bottom-up hierarchical clustering with Lance–Williams distance updates.
//!
//! At each step the closest pair of active clusters is merged; ties go to
//! the lexicographically smallest `(i, j)` where a cluster is identified by
//! its smallest member. Cutting the dendrogram at `k` undoes the last
//! `k - 1` merges.

use std::fmt;
use std::str::FromStr;

use crate::distance::{pairwise_euclidean, pairwise_squared_euclidean, DistanceMatrix};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::partition::Partition;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LinkageKind {
    /// Minimum increase of within-cluster variance. Euclidean features only.
    #[default]
    Ward,
    Average,
    Complete,
}

impl fmt::Display for LinkageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkageKind::Ward => "ward",
            LinkageKind::Average => "average",
            LinkageKind::Complete => "complete",
        })
    }
}

impl FromStr for LinkageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ward" => Ok(LinkageKind::Ward),
            "average" => Ok(LinkageKind::Average),
            "complete" => Ok(LinkageKind::Complete),
            other => Err(Error::InvalidParameter(format!("unknown linkage {other:?}"))),
        }
    }
}

/// One merge step. Leaves are clusters `0..n`; the cluster created by step
/// `s` gets id `n + s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub cluster_a: usize,
    pub cluster_b: usize,
    pub height: f64,
    pub new_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram {
    n_leaves: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Canonical `k`-cluster partition obtained by applying the first
    /// `n - k` merges.
    pub fn cut(&self, k: usize) -> Result<Partition> {
        let n = self.n_leaves;
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if k > n {
            return Err(Error::TooManyClusters { k, n });
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        // Representative leaf of every cluster id.
        let mut leaf: Vec<usize> = (0..n).collect();
        for m in &self.merges[..n - k] {
            let a = find(&mut parent, leaf[m.cluster_a]);
            let b = find(&mut parent, leaf[m.cluster_b]);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
            leaf.push(lo);
        }
        let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        Ok(Partition::from_labels(roots).canonical())
    }
}

/// Lance–Williams agglomeration over a dense dissimilarity matrix. For ward
/// the matrix holds squared euclidean distances and heights are reported
/// as their square roots.
fn agglomerate(n: usize, mut dist: Vec<f64>, linkage: LinkageKind) -> Dendrogram {
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut id: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best = (usize::MAX, usize::MAX);
        let mut best_d = f64::INFINITY;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let row = &dist[i * n..(i + 1) * n];
            for j in i + 1..n {
                if active[j] && row[j] < best_d {
                    best_d = row[j];
                    best = (i, j);
                }
            }
        }
        let (i, j) = best;
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let (dki, dkj) = (dist[k * n + i], dist[k * n + j]);
            let updated = match linkage {
                LinkageKind::Average => (ni * dki + nj * dkj) / (ni + nj),
                LinkageKind::Complete => dki.max(dkj),
                LinkageKind::Ward => {
                    let nk = size[k] as f64;
                    (((ni + nk) * dki + (nj + nk) * dkj - nk * best_d) / (ni + nj + nk)).max(0.0)
                }
            };
            dist[k * n + i] = updated;
            dist[i * n + k] = updated;
        }
        let height = match linkage {
            LinkageKind::Ward => best_d.sqrt(),
            _ => best_d,
        };
        let (a, b) = (id[i].min(id[j]), id[i].max(id[j]));
        size[i] += size[j];
        merges.push(Merge {
            cluster_a: a,
            cluster_b: b,
            height,
            new_size: size[i],
        });
        active[j] = false;
        id[i] = n + step;
    }
    Dendrogram { n_leaves: n, merges }
}

/// Full dendrogram over euclidean distances between feature rows.
pub fn linkage_features(m: &FeatureMatrix, linkage: LinkageKind) -> Dendrogram {
    let dist = match linkage {
        LinkageKind::Ward => pairwise_squared_euclidean(m),
        _ => pairwise_euclidean(m).values().to_vec(),
    };
    agglomerate(m.rows(), dist, linkage)
}

/// Full dendrogram over a precomputed distance matrix. Ward is rejected
/// because its update assumes euclidean geometry.
pub fn linkage_distance(d: &DistanceMatrix, linkage: LinkageKind) -> Result<Dendrogram> {
    if linkage == LinkageKind::Ward {
        return Err(Error::WardOnDistance);
    }
    Ok(agglomerate(d.size(), d.values().to_vec(), linkage))
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::TooManyClusters { k, n });
    }
    Ok(())
}

pub fn agglomerative_fit_features(m: &FeatureMatrix, k: usize, linkage: LinkageKind) -> Result<Partition> {
    check_k(k, m.rows())?;
    linkage_features(m, linkage).cut(k)
}

pub fn agglomerative_fit_distance(d: &DistanceMatrix, k: usize, linkage: LinkageKind) -> Result<Partition> {
    check_k(k, d.size())?;
    linkage_distance(d, linkage)?.cut(k)
}
