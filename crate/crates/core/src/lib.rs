//! Multi-view ensemble clustering of image embeddings.
//!
//! The crate clusters sets of feature vectors (one per image) with k-means
//! or agglomerative clustering, scores partitions with NMI and purity,
//! benchmarks clustering pipelines over many sampled problems, and combines
//! several views of each object through a co-association consensus.
//!
//! Runnable walkthroughs live in `examples/`; the `mvec` binary exposes the
//! same functionality on the command line.

pub mod bench;
pub mod cli;
pub mod cluster;
pub mod distance;
pub mod ensemble;
pub mod error;
pub mod features;
pub mod manifest;
pub mod metrics;
mod parallel;
pub mod partition;
pub mod rng;
pub mod synth;

pub use cluster::{Algorithm, KMeansConfig, LinkageKind, Pipeline};
pub use distance::{pairwise_euclidean, DistanceMatrix};
pub use ensemble::{CoAssociationMatrix, MvecConfig};
pub use error::{Error, Result};
pub use features::{load_features, save_features, FeatureFormat, FeatureMatrix};
pub use manifest::{load_manifest, MultiViewDataset};
pub use metrics::NmiNormalization;
pub use partition::Partition;
