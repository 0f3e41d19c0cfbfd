//! k-means with k-means++ seeding and best-of-`n_init` restarts.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::features::{squared_euclidean, FeatureMatrix};
use crate::metrics;
use crate::partition::Partition;
use crate::rng::substream;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub n_init: usize,
    pub max_iter: usize,
    /// Stop once the total squared centroid shift falls to `tol` times the
    /// mean per-feature variance of the data.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        KMeansConfig {
            k,
            n_init: 10,
            max_iter: 300,
            tol: 1e-4,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_init(mut self, n_init: usize) -> Self {
        self.n_init = n_init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n_init == 0 || self.max_iter == 0 {
            return Err(Error::InvalidParameter(format!(
                "k, n_init and max_iter must be positive (k={}, n_init={}, max_iter={})",
                self.k, self.n_init, self.max_iter
            )));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::InvalidParameter(format!("tol must be >= 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Picks `k` initial centroids by D² sampling: the first uniformly, each
/// next one with probability proportional to its squared distance to the
/// nearest centroid already chosen.
pub fn kmeanspp_init<R: Rng + ?Sized>(m: &FeatureMatrix, k: usize, rng: &mut R) -> Result<FeatureMatrix> {
    let n = m.rows();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::TooManyClusters { k, n });
    }
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut nearest: Vec<f64> = m
        .iter_rows()
        .map(|row| squared_euclidean(row, m.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        // Zero mass means every row coincides with a centroid already
        // picked, so a duplicate is unavoidable.
        let next = if total > 0.0 {
            WeightedIndex::new(&nearest)
                .expect("non-negative finite weights with positive mass")
                .sample(rng)
        } else {
            rng.random_range(0..n)
        };
        chosen.push(next);
        let c = m.row(next);
        for (d, row) in nearest.iter_mut().zip(m.iter_rows()) {
            let dist = squared_euclidean(row, c);
            if dist < *d {
                *d = dist;
            }
        }
    }
    m.select_rows(&chosen)
}

/// Outcome of one Lloyd descent.
#[derive(Clone, Debug)]
pub struct LloydRun {
    pub labels: Vec<usize>,
    /// `k x d` centroids, row-major.
    pub centroids: Vec<f64>,
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia of the partition after each iteration, with centroids
    /// recomputed from that partition. Non-increasing.
    pub trace: Vec<f64>,
}

/// Nearest-centroid assignment; ties go to the lowest cluster index.
/// Empty clusters are refilled with the point farthest from its centroid.
fn assign(m: &FeatureMatrix, centroids: &mut [f64], k: usize, labels: &mut [usize]) {
    let d = m.dims();
    let mut dist = vec![0.0; m.rows()];
    let mut sizes = vec![0usize; k];
    for (i, row) in m.iter_rows().enumerate() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, cent) in centroids.chunks_exact(d).enumerate() {
            let dd = squared_euclidean(row, cent);
            if dd < best_d {
                best_d = dd;
                best = c;
            }
        }
        labels[i] = best;
        dist[i] = best_d;
        sizes[best] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        // n >= k guarantees some cluster holds two or more points.
        let mut donor = None;
        let mut far = f64::NEG_INFINITY;
        for (i, &dd) in dist.iter().enumerate() {
            if sizes[labels[i]] > 1 && dd > far {
                far = dd;
                donor = Some(i);
            }
        }
        let i = donor.expect("some cluster has at least two points");
        sizes[labels[i]] -= 1;
        labels[i] = empty;
        sizes[empty] = 1;
        dist[i] = 0.0;
        centroids[empty * d..(empty + 1) * d].copy_from_slice(m.row(i));
    }
}

fn mean_variance(m: &FeatureMatrix) -> f64 {
    let n = m.rows() as f64;
    let d = m.dims();
    let mut total = 0.0;
    for j in 0..d {
        let mean = m.iter_rows().map(|r| r[j]).sum::<f64>() / n;
        total += m.iter_rows().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<f64>() / n;
    }
    total / d as f64
}

/// Lloyd iterations from the given initial centroids.
pub fn lloyd(m: &FeatureMatrix, init: &FeatureMatrix, max_iter: usize, tol: f64) -> Result<LloydRun> {
    let k = init.rows();
    let n = m.rows();
    if init.dims() != m.dims() {
        return Err(Error::LengthMismatch {
            left: init.dims(),
            right: m.dims(),
        });
    }
    if k > n {
        return Err(Error::TooManyClusters { k, n });
    }
    let tol_abs = tol * mean_variance(m);
    let mut centroids = init.data().to_vec();
    let mut labels = vec![0usize; n];
    let mut previous: Option<Vec<usize>> = None;
    let mut trace = Vec::new();
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        assign(m, &mut centroids, k, &mut labels);
        let part = Partition::new(labels.clone(), k)?;
        let updated = metrics::centroids(m, &part)?;
        trace.push(metrics::inertia(m, &part)?);
        let shift: f64 = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        centroids = updated;
        if previous.as_deref() == Some(&labels[..]) || shift <= tol_abs {
            break;
        }
        previous = Some(labels.clone());
    }

    // Final E-step so labels agree with the returned centroids.
    let before = labels.clone();
    assign(m, &mut centroids, k, &mut labels);
    let part = Partition::new(labels.clone(), k)?;
    let inertia = metrics::inertia(m, &part)?;
    if labels != before {
        centroids = metrics::centroids(m, &part)?;
        trace.push(inertia);
    }
    Ok(LloydRun {
        labels,
        centroids,
        inertia,
        iterations,
        trace,
    })
}

#[derive(Clone, Debug)]
pub struct KMeansFit {
    /// Canonical partition of the best restart.
    pub partition: Partition,
    pub inertia: f64,
    /// Centroids of the best restart, rows ordered by canonical label.
    pub centroids: FeatureMatrix,
    pub iterations: usize,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Runs `n_init` seeded restarts and keeps the one with the lowest inertia
/// (ties go to the earliest restart). Restart `r` draws from substream
/// `(seed, r)`.
pub fn kmeans_fit(m: &FeatureMatrix, cfg: &KMeansConfig) -> Result<KMeansFit> {
    cfg.validate()?;
    if cfg.k > m.rows() {
        return Err(Error::TooManyClusters { k: cfg.k, n: m.rows() });
    }
    let mut best: Option<(usize, LloydRun)> = None;
    for r in 0..cfg.n_init {
        let mut rng = substream(cfg.seed, r as u64);
        let init = kmeanspp_init(m, cfg.k, &mut rng)?;
        let run = lloyd(m, &init, cfg.max_iter, cfg.tol)?;
        if best.as_ref().is_none_or(|(_, b)| run.inertia < b.inertia) {
            best = Some((r, run));
        }
    }
    let (restart, run) = best.expect("n_init >= 1");
    let raw = Partition::new(run.labels, cfg.k)?;
    let partition = raw.canonical();

    let d = m.dims();
    let mut order = vec![0usize; cfg.k];
    for (&old, &new) in raw.labels().iter().zip(partition.labels()) {
        order[new] = old;
    }
    let mut data = Vec::with_capacity(cfg.k * d);
    for &old in &order {
        data.extend_from_slice(&run.centroids[old * d..(old + 1) * d]);
    }
    Ok(KMeansFit {
        partition,
        inertia: run.inertia,
        centroids: FeatureMatrix::new(cfg.k, d, data)?,
        iterations: run.iterations,
        restart,
    })
}
