//! Synthetic data for examples, tests and desk-scale experiments.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::manifest::{MultiViewDataset, ObjectRecord, ViewRef};
use crate::partition::Partition;
use crate::rng::substream;

fn normal(std: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, std).map_err(|e| Error::InvalidParameter(format!("normal std {std}: {e}")))
}

/// Isotropic gaussian blobs, `per_cluster` points around each center,
/// ordered cluster by cluster. Returns the points and their true labels.
pub fn gaussian_blobs(centers: &[Vec<f64>], per_cluster: usize, std: f64, seed: u64) -> Result<(FeatureMatrix, Partition)> {
    let dims = centers.first().map_or(0, Vec::len);
    let noise = normal(std)?;
    let mut rng = substream(seed, 0);
    let mut data = Vec::with_capacity(centers.len() * per_cluster * dims);
    let mut labels = Vec::with_capacity(centers.len() * per_cluster);
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..per_cluster {
            data.extend(center.iter().map(|&x| x + noise.sample(&mut rng)));
            labels.push(c);
        }
    }
    let m = FeatureMatrix::new(labels.len(), dims, data)?;
    Ok((m, Partition::from_labels(labels)))
}

/// Shape of a synthetic multi-view dataset.
#[derive(Clone, Debug)]
pub struct MultiViewSpec {
    pub n_classes: usize,
    pub objects_per_class: usize,
    pub dims: usize,
    /// Spread of class centers around the origin.
    pub class_spread: f64,
    /// Spread of object prototypes around their class center.
    pub object_spread: f64,
    /// `(condition tag, per-view noise std)`.
    pub conditions: Vec<(String, f64)>,
    pub views_per_condition: usize,
    pub seed: u64,
}

impl Default for MultiViewSpec {
    fn default() -> Self {
        MultiViewSpec {
            n_classes: 4,
            objects_per_class: 6,
            dims: 8,
            class_spread: 3.0,
            object_spread: 0.5,
            conditions: vec![("clean".into(), 0.5), ("noisy".into(), 2.0)],
            views_per_condition: 4,
            seed: 0,
        }
    }
}

/// Builds an in-memory dataset: each object gets a prototype near its class
/// center, and each view is the prototype plus condition-dependent noise.
/// All rows live in one feature file named `synthetic`.
pub fn multiview_dataset(spec: &MultiViewSpec) -> Result<MultiViewDataset> {
    if spec.n_classes == 0 || spec.objects_per_class == 0 || spec.dims == 0 || spec.views_per_condition == 0 {
        return Err(Error::InvalidParameter("synthetic dataset needs positive sizes".into()));
    }
    let mut rng = substream(spec.seed, 0);
    let class_noise = normal(spec.class_spread)?;
    let object_noise = normal(spec.object_spread)?;
    let view_noise = spec
        .conditions
        .iter()
        .map(|(_, s)| normal(*s))
        .collect::<Result<Vec<_>>>()?;

    let centers: Vec<Vec<f64>> = (0..spec.n_classes)
        .map(|_| (0..spec.dims).map(|_| class_noise.sample(&mut rng)).collect())
        .collect();

    let mut data = Vec::new();
    let mut objects = Vec::new();
    let mut row = 0;
    for (c, center) in centers.iter().enumerate() {
        for o in 0..spec.objects_per_class {
            let prototype: Vec<f64> = center.iter().map(|&x| x + object_noise.sample(&mut rng)).collect();
            let mut views = Vec::new();
            for ((tag, _), noise) in spec.conditions.iter().zip(&view_noise) {
                for pose in 0..spec.views_per_condition {
                    data.extend(prototype.iter().map(|&x| x + noise.sample(&mut rng)));
                    views.push(ViewRef {
                        file: "synthetic".into(),
                        row,
                        condition: tag.clone(),
                        pose: pose as i64,
                    });
                    row += 1;
                }
            }
            objects.push(ObjectRecord {
                object_id: format!("obj-{c}-{o}"),
                class_label: Some(format!("class-{c}")),
                views,
            });
        }
    }
    // Shuffle object order so classes are interleaved.
    for i in (1..objects.len()).rev() {
        let j = rng.random_range(0..=i);
        objects.swap(i, j);
    }
    let matrix = FeatureMatrix::new(row, spec.dims, data)?;
    MultiViewDataset::new(
        spec.conditions.iter().map(|(t, _)| t.clone()).collect(),
        BTreeMap::from([("synthetic".to_string(), Arc::new(matrix))]),
        objects,
    )
}
