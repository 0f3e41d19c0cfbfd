use crate::error::{Error, Result};
use crate::features::{squared_euclidean, FeatureMatrix};

/// Symmetric `n x n` matrix of non-negative finite distances with a zero
/// diagonal, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(size: usize, values: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidDistance("empty matrix".into()));
        }
        if values.len() != size * size {
            return Err(Error::InvalidDistance(format!(
                "expected {} entries for size {size}, got {}",
                size * size,
                values.len()
            )));
        }
        for i in 0..size {
            if values[i * size + i] != 0.0 {
                return Err(Error::InvalidDistance(format!("non-zero diagonal at {i}")));
            }
            for j in 0..size {
                let v = values[i * size + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDistance(format!(
                        "entry ({i},{j}) = {v} is not a finite non-negative distance"
                    )));
                }
                if v != values[j * size + i] {
                    return Err(Error::InvalidDistance(format!(
                        "asymmetric at ({i},{j}): {v} vs {}",
                        values[j * size + i]
                    )));
                }
            }
        }
        Ok(DistanceMatrix { size, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let size = rows.len();
        let mut values = Vec::with_capacity(size * size);
        for row in rows {
            values.extend_from_slice(row.as_ref());
        }
        DistanceMatrix::new(size, values)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_trusted(size: usize, values: Vec<f64>) -> Self {
        DistanceMatrix { size, values }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Euclidean distances between all rows of `m`.
pub fn pairwise_euclidean(m: &FeatureMatrix) -> DistanceMatrix {
    let mut d = pairwise_squared_euclidean(m);
    d.iter_mut().for_each(|v| *v = v.sqrt());
    DistanceMatrix::from_trusted(m.rows(), d)
}

pub(crate) fn pairwise_squared_euclidean(m: &FeatureMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = squared_euclidean(m.row(i), m.row(j));
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}
