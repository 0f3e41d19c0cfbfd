//! Clustering algorithms: k-means and agglomerative clustering, plus the
//! [`Pipeline`] wrapper used by the benchmark harness and the ensemble.

mod agglomerative;
mod kmeans;

use std::fmt;

pub use agglomerative::{
    agglomerative_fit_distance, agglomerative_fit_features, linkage_distance, linkage_features, Dendrogram,
    LinkageKind, Merge,
};
pub use kmeans::{kmeans_fit, kmeanspp_init, lloyd, KMeansConfig, KMeansFit, LloydRun};

use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::partition::Partition;

/// Which clustering algorithm to run on a feature matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    KMeans { n_init: usize, max_iter: usize, tol: f64 },
    Agglomerative { linkage: LinkageKind },
}

impl Algorithm {
    pub fn kmeans() -> Self {
        let d = KMeansConfig::new(1);
        Algorithm::KMeans {
            n_init: d.n_init,
            max_iter: d.max_iter,
            tol: d.tol,
        }
    }

    pub fn agglomerative(linkage: LinkageKind) -> Self {
        Algorithm::Agglomerative { linkage }
    }

    /// Short name used in report rows: `KM` or `AC`.
    pub fn short_name(&self) -> &'static str {
        match self {
            Algorithm::KMeans { .. } => "KM",
            Algorithm::Agglomerative { .. } => "AC",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Algorithm::KMeans { .. })
    }
}

/// A clustering algorithm plus feature preprocessing.
#[derive(Clone, Debug, PartialEq)]
pub struct Pipeline {
    pub algorithm: Algorithm,
    /// Scale every row to unit L2 norm before clustering.
    pub normalize_features: bool,
}

impl Pipeline {
    pub fn new(algorithm: Algorithm) -> Self {
        Pipeline {
            algorithm,
            normalize_features: false,
        }
    }

    pub fn with_normalization(mut self, on: bool) -> Self {
        self.normalize_features = on;
        self
    }

    /// Clusters `m` into `k` groups. `seed` only matters for k-means.
    pub fn fit(&self, m: &FeatureMatrix, k: usize, seed: u64) -> Result<Partition> {
        let normalized;
        let m = if self.normalize_features {
            normalized = m.l2_normalized();
            &normalized
        } else {
            m
        };
        match self.algorithm {
            Algorithm::KMeans { n_init, max_iter, tol } => {
                let cfg = KMeansConfig {
                    k,
                    n_init,
                    max_iter,
                    tol,
                    seed,
                };
                Ok(kmeans_fit(m, &cfg)?.partition)
            }
            Algorithm::Agglomerative { linkage } => agglomerative_fit_features(m, k, linkage),
        }
    }
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline::new(Algorithm::agglomerative(LinkageKind::Ward))
    }
}

/// Compact `key=value;...` description, free of commas so it fits a CSV
/// cell.
impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.algorithm {
            Algorithm::KMeans { n_init, max_iter, tol } => {
                write!(f, "kmeans++;n_init={n_init};max_iter={max_iter};tol={tol}")?
            }
            Algorithm::Agglomerative { linkage } => write!(f, "linkage={linkage}")?,
        }
        write!(f, ";l2={}", if self.normalize_features { "on" } else { "off" })
    }
}
