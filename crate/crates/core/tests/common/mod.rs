#![allow(dead_code)]

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use mvec::features::{save_features, FeatureFormat, FeatureMatrix};
use serde_json::json;

/// Textbook NMI and purity evaluated straight from joint and marginal label
/// frequencies, sharing no code with the library.
pub fn brute_force_scores(pred: &[usize], truth: &[usize], geometric: bool) -> (f64, f64) {
    let n = pred.len() as f64;
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut ca: HashMap<usize, usize> = HashMap::new();
    let mut cb: HashMap<usize, usize> = HashMap::new();
    for (&a, &b) in pred.iter().zip(truth) {
        *joint.entry((a, b)).or_default() += 1;
        *ca.entry(a).or_default() += 1;
        *cb.entry(b).or_default() += 1;
    }
    let prob = |m: HashMap<usize, usize>| -> HashMap<usize, f64> {
        m.into_iter().map(|(k, c)| (k, c as f64 / n)).collect()
    };
    let joint: HashMap<(usize, usize), f64> = joint.into_iter().map(|(k, c)| (k, c as f64 / n)).collect();
    let (pa, pb) = (prob(ca), prob(cb));
    let h = |m: &HashMap<usize, f64>| -> f64 { m.values().map(|p| -p * p.log2()).sum() };
    let (ha, hb) = (h(&pa), h(&pb));
    let mi: f64 = joint
        .iter()
        .map(|(&(a, b), &p)| p * (p / (pa[&a] * pb[&b])).log2())
        .sum();
    let nmi = if ha == 0.0 && hb == 0.0 {
        1.0
    } else if ha == 0.0 || hb == 0.0 {
        0.0
    } else if geometric {
        mi / (ha * hb).sqrt()
    } else {
        2.0 * mi / (ha + hb)
    };

    let mut majority = 0usize;
    let clusters: std::collections::BTreeSet<usize> = pred.iter().copied().collect();
    for c in clusters {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for (&a, &b) in pred.iter().zip(truth) {
            if a == c {
                *counts.entry(b).or_default() += 1;
            }
        }
        majority += counts.values().max().copied().unwrap_or(0);
    }
    (nmi, majority as f64 / n)
}

/// Minimal inertia over every 2-partition of the rows, by enumeration.
pub fn enumerate_best_two_inertia(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let d = rows[0].len();
    let mut best = f64::INFINITY;
    // Fix element 0 in cluster A to skip mirrored assignments.
    for mask in 0u32..(1 << (n - 1)) {
        let full = mask << 1;
        let mut cost = 0.0;
        for side in [0u32, 1] {
            let members: Vec<&Vec<f64>> = (0..n).filter(|&i| (full >> i) & 1 == side).map(|i| &rows[i]).collect();
            if members.is_empty() {
                cost = f64::INFINITY;
                break;
            }
            for j in 0..d {
                let mean = members.iter().map(|r| r[j]).sum::<f64>() / members.len() as f64;
                cost += members.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>();
            }
        }
        best = best.min(cost);
    }
    best
}

/// Writes a manifest of `n_objects` objects split across `n_classes`
/// classes with `conditions x poses` views each. View features are a class
/// center plus a small deterministic offset. Returns the manifest path.
pub fn write_grid_manifest(
    dir: &Path,
    n_objects: usize,
    n_classes: usize,
    conditions: &[&str],
    poses: usize,
) -> PathBuf {
    let dims = 4;
    let mut data = Vec::new();
    let mut objects = Vec::new();
    let mut row = 0;
    for o in 0..n_objects {
        let class = o % n_classes;
        let mut views = Vec::new();
        for (ci, cond) in conditions.iter().enumerate() {
            for pose in 0..poses {
                for j in 0..dims {
                    let center = if j == class % dims { 10.0 * (1 + class / dims) as f64 } else { 0.0 };
                    data.push(center + 0.01 * ((o * 7 + ci * 3 + pose * 5 + j) % 11) as f64);
                }
                views.push(json!({"file": "feat", "row": row, "condition": cond, "pose": pose}));
                row += 1;
            }
        }
        objects.push(json!({"id": format!("obj{o:03}"), "class": format!("c{class}"), "views": views}));
    }
    let m = FeatureMatrix::new(row, dims, data).unwrap();
    save_features(&m, dir.join("feat.fvec"), FeatureFormat::Fvec).unwrap();
    let doc = json!({
        "conditions": conditions,
        "feature_files": {"feat": "feat.fvec"},
        "objects": objects,
    });
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path
}
