//! Multi-view ensemble clustering.
//!
//! Each object of a [`MultiViewDataset`] has several views. One run draws a
//! single view per object uniformly at random, clusters the resulting
//! matrix with the base [`Pipeline`], and repeats `N` times. The co-association
//! matrix counts how often every pair of objects landed in the same cluster;
//! the consensus partition is an agglomerative clustering of that matrix read
//! as a similarity, with distance `1 - CA`.
//!
//! Average linkage is the default consensus rule: complete linkage on
//! co-association values is brittle because a single base partition that
//! separates two objects caps how close they can ever get.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::cluster::{agglomerative_fit_distance, LinkageKind, Pipeline};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::manifest::MultiViewDataset;
use crate::metrics::{nmi, purity, NmiNormalization};
use crate::parallel;
use crate::partition::Partition;
use crate::rng::substream;

/// Integer tallies of pairwise co-membership over `N` partitions. Real
/// values `counts / N` are only formed on read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoAssociationMatrix {
    n: usize,
    n_partitions: u64,
    counts: Vec<u64>,
}

impl CoAssociationMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_partitions(&self) -> u64 {
        self.n_partitions
    }

    pub fn count(&self, p: usize, q: usize) -> u64 {
        self.counts[p * self.n + q]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn value(&self, p: usize, q: usize) -> f64 {
        self.count(p, q) as f64 / self.n_partitions as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let total = self.n_partitions as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// `1 - CA`, computed as `(N - count) / N` so that equal counts give
    /// bit-identical distances.
    pub fn to_distance(&self) -> DistanceMatrix {
        let total = self.n_partitions as f64;
        let values = self
            .counts
            .iter()
            .map(|&c| (self.n_partitions - c) as f64 / total)
            .collect();
        DistanceMatrix::from_trusted(self.n, values)
    }

    /// Writes the matrix of values as CSV followed by a final line `N=<N>`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        for row in self.values().chunks_exact(self.n) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(",")).map_err(io)?;
        }
        writeln!(out, "N={}", self.n_partitions).map_err(io)?;
        out.flush().map_err(io)
    }

    /// Reads a dump produced by [`CoAssociationMatrix::write_csv`].
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, reason: String| Error::Parse {
            path: path.into(),
            line,
            reason,
        };
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let (last, rows) = lines
            .split_last()
            .ok_or_else(|| parse_err(1, "empty co-association dump".into()))?;
        let n_partitions: u64 = last
            .trim()
            .strip_prefix("N=")
            .and_then(|v| v.parse().ok())
            .filter(|&v| v > 0)
            .ok_or_else(|| parse_err(lines.len(), format!("expected `N=<N>`, got {last:?}")))?;
        let n = rows.len();
        let mut counts = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let before = counts.len();
            for field in row.split(',') {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(i + 1, format!("not a number: {field:?}")))?;
                let c = (v * n_partitions as f64).round();
                if !(0.0..=n_partitions as f64).contains(&c) {
                    return Err(parse_err(i + 1, format!("value {v} outside [0, 1]")));
                }
                counts.push(c as u64);
            }
            if counts.len() - before != n {
                return Err(parse_err(i + 1, format!("expected {n} values")));
            }
        }
        let ca = CoAssociationMatrix {
            n,
            n_partitions,
            counts,
        };
        ca.check()?;
        Ok(ca)
    }

    fn check(&self) -> Result<()> {
        for p in 0..self.n {
            if self.count(p, p) != self.n_partitions {
                return Err(Error::InvalidParameter(format!("diagonal entry {p} is not 1")));
            }
            for q in 0..p {
                if self.count(p, q) != self.count(q, p) {
                    return Err(Error::InvalidParameter(format!("asymmetric at ({p},{q})")));
                }
            }
        }
        Ok(())
    }
}

/// Tallies pairwise co-membership across `partitions`. The reduction is a
/// commutative integer sum, so the result does not depend on partition
/// order or thread count.
pub fn accumulate_coassociation(partitions: &[Partition]) -> Result<CoAssociationMatrix> {
    let first = partitions
        .first()
        .ok_or_else(|| Error::InvalidParameter("no partitions to accumulate".into()))?;
    let n = first.len();
    if let Some(bad) = partitions.iter().find(|p| p.len() != n) {
        return Err(Error::LengthMismatch {
            left: n,
            right: bad.len(),
        });
    }
    let counts = partitions
        .par_iter()
        .fold(
            || vec![0u64; n * n],
            |mut acc, part| {
                let labels = part.labels();
                for p in 0..n {
                    acc[p * n + p] += 1;
                    for q in p + 1..n {
                        if labels[p] == labels[q] {
                            acc[p * n + q] += 1;
                            acc[q * n + p] += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n * n],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(CoAssociationMatrix {
        n,
        n_partitions: partitions.len() as u64,
        counts,
    })
}

/// Agglomerative clustering of `1 - CA` into `k` groups.
pub fn consensus(ca: &CoAssociationMatrix, k: usize, linkage: LinkageKind) -> Result<Partition> {
    agglomerative_fit_distance(&ca.to_distance(), k, linkage)
}

/// Independent uniform choice of one view per object.
pub fn sample_view_assignment<R: Rng + ?Sized>(ds: &MultiViewDataset, rng: &mut R) -> Result<Vec<usize>> {
    ds.objects()
        .iter()
        .map(|obj| match obj.views.len() {
            0 => Err(Error::EmptyViews(obj.object_id.clone())),
            m => Ok(rng.random_range(0..m)),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MvecConfig {
    /// Number of base partitions `N`.
    pub n_partitions: usize,
    pub k: usize,
    pub base: Pipeline,
    pub consensus_linkage: LinkageKind,
    pub seed: u64,
    pub nmi_normalization: NmiNormalization,
    /// Thread count for partition generation; `None` uses the global pool.
    /// Results do not depend on it.
    pub workers: Option<usize>,
}

impl MvecConfig {
    pub fn new(k: usize) -> Self {
        MvecConfig {
            n_partitions: 1000,
            k,
            base: Pipeline::default(),
            consensus_linkage: LinkageKind::Average,
            seed: 0,
            nmi_normalization: NmiNormalization::default(),
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_partitions == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.consensus_linkage == LinkageKind::Ward {
            return Err(Error::WardOnDistance);
        }
        Ok(())
    }
}

/// Base partitions `P_0 .. P_{N-1}`; partition `t` uses only substream
/// `(seed, t)`, both for view sampling and for the base pipeline's own
/// seed.
pub fn generate_partitions(ds: &MultiViewDataset, cfg: &MvecConfig) -> Result<Vec<Partition>> {
    cfg.validate()?;
    if cfg.k > ds.n_objects() {
        return Err(Error::TooManyClusters {
            k: cfg.k,
            n: ds.n_objects(),
        });
    }
    parallel::install(cfg.workers, || {
        (0..cfg.n_partitions)
            .into_par_iter()
            .map(|t| {
                let mut rng = substream(cfg.seed, t as u64);
                let choice = sample_view_assignment(ds, &mut rng)?;
                let base_seed = rng.next_u64();
                let m = ds.assemble(&choice)?;
                cfg.base.fit(&m, cfg.k, base_seed)
            })
            .collect::<Result<Vec<_>>>()
    })?
}

#[derive(Clone, Debug)]
pub struct MvecDiagnostics {
    /// Description of the base pipeline, as in report rows.
    pub base: String,
    pub consensus_linkage: LinkageKind,
    pub nmi_normalization: NmiNormalization,
    pub n_partitions: usize,
    /// Per-partition scores against ground truth; empty without labels.
    pub partition_nmi: Vec<f64>,
    pub partition_purity: Vec<f64>,
    pub consensus_nmi: Option<f64>,
    pub consensus_purity: Option<f64>,
}

impl MvecDiagnostics {
    pub fn mean_partition_nmi(&self) -> Option<f64> {
        mean(&self.partition_nmi)
    }

    pub fn mean_partition_purity(&self) -> Option<f64> {
        mean(&self.partition_purity)
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

#[derive(Clone, Debug)]
pub struct MvecOutcome {
    pub consensus: Partition,
    pub coassociation: CoAssociationMatrix,
    pub partitions: Vec<Partition>,
    pub diagnostics: MvecDiagnostics,
}

/// Generates the base partitions, accumulates their co-association matrix
/// and extracts the consensus. Scores against ground truth when the dataset
/// carries class labels.
pub fn mvec_run(ds: &MultiViewDataset, cfg: &MvecConfig) -> Result<MvecOutcome> {
    let partitions = generate_partitions(ds, cfg)?;
    let coassociation = accumulate_coassociation(&partitions)?;
    let consensus_partition = consensus(&coassociation, cfg.k, cfg.consensus_linkage)?;

    let mut diagnostics = MvecDiagnostics {
        base: cfg.base.to_string(),
        consensus_linkage: cfg.consensus_linkage,
        nmi_normalization: cfg.nmi_normalization,
        n_partitions: cfg.n_partitions,
        partition_nmi: Vec::new(),
        partition_purity: Vec::new(),
        consensus_nmi: None,
        consensus_purity: None,
    };
    if let Some(truth) = ds.ground_truth() {
        for p in &partitions {
            diagnostics.partition_nmi.push(nmi(p, &truth, cfg.nmi_normalization)?);
            diagnostics.partition_purity.push(purity(p, &truth)?);
        }
        diagnostics.consensus_nmi = Some(nmi(&consensus_partition, &truth, cfg.nmi_normalization)?);
        diagnostics.consensus_purity = Some(purity(&consensus_partition, &truth)?);
    }
    Ok(MvecOutcome {
        consensus: consensus_partition,
        coassociation,
        partitions,
        diagnostics,
    })
}
