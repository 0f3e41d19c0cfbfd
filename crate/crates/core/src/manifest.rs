//! Multi-view dataset manifests.
//!
//! A manifest is a JSON document listing the declared acquisition conditions,
//! a registry of feature files and the objects, each with one or more views
//! pointing at a row of a feature file:
//!
//! ```json
//! {
//!   "conditions": ["BLC1", "BLC2"],
//!   "feature_files": {"xception": "features/xception.fvec"},
//!   "objects": [
//!     {"id": "hammer-01", "class": "hammer",
//!      "views": [{"file": "xception", "row": 0, "condition": "BLC1", "pose": 0}]}
//!   ]
//! }
//! ```
//!
//! Relative feature paths resolve against the manifest's directory. Object
//! order in the file is the row order of every matrix assembled from it.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{load_features, save_features, FeatureFormat, FeatureMatrix};
use crate::partition::Partition;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewRef {
    pub file: String,
    pub row: usize,
    pub condition: String,
    pub pose: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectRecord {
    #[serde(rename = "id")]
    pub object_id: String,
    #[serde(rename = "class", default, skip_serializing_if = "Option::is_none")]
    pub class_label: Option<String>,
    pub views: Vec<ViewRef>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestDocument {
    conditions: Vec<String>,
    feature_files: BTreeMap<String, String>,
    objects: Vec<ObjectRecord>,
}

/// Validated set of objects, their views and the feature files backing them.
#[derive(Clone, Debug)]
pub struct MultiViewDataset {
    conditions: Vec<String>,
    feature_files: BTreeMap<String, Arc<FeatureMatrix>>,
    objects: Vec<ObjectRecord>,
    dims: usize,
}

impl MultiViewDataset {
    pub fn new(
        conditions: Vec<String>,
        feature_files: BTreeMap<String, Arc<FeatureMatrix>>,
        objects: Vec<ObjectRecord>,
    ) -> Result<Self> {
        if objects.is_empty() {
            return Err(Error::Manifest("no objects".into()));
        }
        let declared: HashSet<&str> = conditions.iter().map(String::as_str).collect();
        if declared.len() != conditions.len() {
            return Err(Error::Manifest("duplicate condition tags".into()));
        }

        let mut ids = HashSet::new();
        let mut dims = None;
        for obj in &objects {
            if !ids.insert(obj.object_id.as_str()) {
                return Err(Error::DuplicateObject(obj.object_id.clone()));
            }
            if obj.views.is_empty() {
                return Err(Error::EmptyViews(obj.object_id.clone()));
            }
            for view in &obj.views {
                let matrix = feature_files.get(&view.file).ok_or_else(|| {
                    Error::Manifest(format!(
                        "object {:?} references unregistered feature file {:?}",
                        obj.object_id, view.file
                    ))
                })?;
                if view.row >= matrix.rows() {
                    return Err(Error::DanglingReference {
                        object: obj.object_id.clone(),
                        file: view.file.clone(),
                        row: view.row,
                        rows: matrix.rows(),
                    });
                }
                if !declared.contains(view.condition.as_str()) {
                    return Err(Error::Manifest(format!(
                        "object {:?} uses undeclared condition {:?}",
                        obj.object_id, view.condition
                    )));
                }
                match dims {
                    None => dims = Some(matrix.dims()),
                    Some(d) if d != matrix.dims() => {
                        return Err(Error::Manifest(format!(
                            "feature file {:?} has {} dims, others have {d}",
                            view.file,
                            matrix.dims()
                        )))
                    }
                    _ => {}
                }
            }
        }

        let labelled = objects.iter().filter(|o| o.class_label.is_some()).count();
        if labelled != 0 && labelled != objects.len() {
            return Err(Error::MixedClassLabels);
        }

        Ok(MultiViewDataset {
            conditions,
            feature_files,
            objects,
            dims: dims.expect("at least one view"),
        })
    }

    pub fn conditions(&self) -> &[String] {
        &self.conditions
    }

    pub fn objects(&self) -> &[ObjectRecord] {
        &self.objects
    }

    pub fn feature_files(&self) -> &BTreeMap<String, Arc<FeatureMatrix>> {
        &self.feature_files
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn has_ground_truth(&self) -> bool {
        self.objects[0].class_label.is_some()
    }

    /// Ground-truth partition in object order, clusters numbered by first
    /// appearance of each class.
    pub fn ground_truth(&self) -> Option<Partition> {
        if !self.has_ground_truth() {
            return None;
        }
        Some(Partition::from_tokens(
            self.objects.iter().map(|o| o.class_label.as_deref().unwrap()),
        ))
    }

    pub fn n_classes(&self) -> Option<usize> {
        self.ground_truth().map(|p| p.k())
    }

    fn check_condition(&self, condition: &str) -> Result<()> {
        if self.conditions.iter().any(|c| c == condition) {
            Ok(())
        } else {
            Err(Error::UnknownCondition(condition.to_string()))
        }
    }

    /// Copy of the dataset keeping only views taken under `condition`.
    pub fn restrict_to_condition(&self, condition: &str) -> Result<MultiViewDataset> {
        self.check_condition(condition)?;
        let objects = self
            .objects
            .iter()
            .map(|obj| {
                let views: Vec<ViewRef> = obj
                    .views
                    .iter()
                    .filter(|v| v.condition == condition)
                    .cloned()
                    .collect();
                if views.is_empty() {
                    return Err(Error::MissingCondition {
                        object: obj.object_id.clone(),
                        condition: condition.to_string(),
                    });
                }
                Ok(ObjectRecord {
                    object_id: obj.object_id.clone(),
                    class_label: obj.class_label.clone(),
                    views,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiViewDataset {
            conditions: vec![condition.to_string()],
            feature_files: self.feature_files.clone(),
            objects,
            dims: self.dims,
        })
    }

    fn view_row(&self, view: &ViewRef) -> &[f64] {
        self.feature_files[&view.file].row(view.row)
    }

    /// One row per object, taking view `choice[i]` of object `i`.
    pub fn assemble(&self, choice: &[usize]) -> Result<FeatureMatrix> {
        if choice.len() != self.objects.len() {
            return Err(Error::LengthMismatch {
                left: choice.len(),
                right: self.objects.len(),
            });
        }
        let mut data = Vec::with_capacity(choice.len() * self.dims);
        for (obj, &c) in self.objects.iter().zip(choice) {
            let view = obj.views.get(c).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "view index {c} out of range for object {:?} with {} views",
                    obj.object_id,
                    obj.views.len()
                ))
            })?;
            data.extend_from_slice(self.view_row(view));
        }
        FeatureMatrix::new(choice.len(), self.dims, data)
    }

    /// Builds the clustering problem for one condition: `pose_choice[i]`
    /// indexes the views of object `i` taken under `condition`, in manifest
    /// order. Returns the feature matrix and, when labels exist, the ground
    /// truth.
    pub fn select_views(
        &self,
        condition: &str,
        pose_choice: &[usize],
    ) -> Result<(FeatureMatrix, Option<Partition>)> {
        let restricted = self.restrict_to_condition(condition)?;
        let m = restricted.assemble(pose_choice)?;
        Ok((m, self.ground_truth()))
    }
}

/// Loads and validates a manifest together with every feature file it
/// registers.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<MultiViewDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: ManifestDocument = serde_json::from_str(&text)
        .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let mut files = BTreeMap::new();
    for (id, rel) in &doc.feature_files {
        let resolved = base.join(rel);
        files.insert(id.clone(), Arc::new(load_features(&resolved)?));
    }
    MultiViewDataset::new(doc.conditions, files, doc.objects)
}

/// Writes the dataset as `<dir>/<manifest_name>` plus one FVEC file per
/// registered feature file, named `<id>.fvec`. Creates `dir` if needed.
/// Returns the manifest path.
pub fn save_dataset(ds: &MultiViewDataset, dir: impl AsRef<Path>, manifest_name: &str) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut feature_files = BTreeMap::new();
    for (id, m) in &ds.feature_files {
        let name = format!("{id}.fvec");
        save_features(m, dir.join(&name), FeatureFormat::Fvec)?;
        feature_files.insert(id.clone(), name);
    }
    let doc = ManifestDocument {
        conditions: ds.conditions.clone(),
        feature_files,
        objects: ds.objects.clone(),
    };
    let path = dir.join(manifest_name);
    let text = serde_json::to_string_pretty(&doc).expect("manifest serializes");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
