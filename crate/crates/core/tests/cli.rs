mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use mvec::cli::{run, EXIT_INPUT, EXIT_OK, EXIT_PARAM};
use mvec::features::{save_features, FeatureFormat, FeatureMatrix};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn mvec(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("mvec").chain(args.iter().copied()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_line_features(dir: &Path) -> std::path::PathBuf {
    let m = FeatureMatrix::from_rows(&[[0.0], [1.0], [10.0], [11.0]]).unwrap();
    let path = dir.join("line.fvec");
    save_features(&m, &path, FeatureFormat::Fvec).unwrap();
    path
}

#[test]
fn cluster_kmeans_two_groups() {
    let dir = tempfile::tempdir().unwrap();
    let features = write_line_features(dir.path());
    let labels = dir.path().join("labels.txt");
    let o = mvec(&["cluster", p(&features), "-k", "2", "--algorithm", "kmeans", "--out", p(&labels)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(fs::read_to_string(&labels).unwrap(), "0\n0\n1\n1\n");
    assert!(o.stderr.contains("inertia=1"));

    let o = mvec(&["cluster", p(&features), "-k", "2"]);
    assert_eq!(o.stdout, "0\n0\n1\n1\n");
    assert!(o.stderr.contains("linkage=ward"));

    let o = mvec(&["cluster", p(&features), "-k", "1", "--algorithm", "kmeans"]);
    assert_eq!(o.stdout, "0\n0\n0\n0\n");
}

#[test]
fn cluster_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = mvec(&["cluster", p(&dir.path().join("missing.fvec")), "-k", "2"]);
    assert_eq!(o.code, EXIT_INPUT);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "# n=2 d=3\n1,2,3,4\n").unwrap();
    assert_eq!(mvec(&["cluster", p(&bad), "-k", "1"]).code, EXIT_INPUT);

    let features = write_line_features(dir.path());
    assert_eq!(mvec(&["cluster", p(&features), "-k", "9"]).code, EXIT_PARAM);
    assert_eq!(mvec(&["cluster", p(&features), "-k", "0"]).code, EXIT_PARAM);
    assert_eq!(mvec(&["cluster", p(&features)]).code, EXIT_PARAM);
    assert_eq!(mvec(&["--help"]).code, EXIT_OK);
}

#[test]
fn evaluate_prints_four_decimals() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    fs::write(&a, "0\n0\n1\n1\n").unwrap();
    fs::write(&b, "0\n1\n1\n1\n").unwrap();

    let o = mvec(&["evaluate", p(&a), p(&a)]);
    assert_eq!((o.code, o.stdout.as_str()), (EXIT_OK, "nmi=1.0000 purity=1.0000\n"));

    let o = mvec(&["evaluate", p(&a), p(&b)]);
    assert_eq!(o.stdout, "nmi=0.3456 purity=0.7500\n");
    let o = mvec(&["--nmi-norm", "arithmetic", "evaluate", p(&a), p(&b)]);
    assert_eq!(o.stdout, "nmi=0.3437 purity=0.7500\n");

    // class names are accepted as labels
    let names = dir.path().join("names.txt");
    fs::write(&names, "cat\ncat\ndog\ndog\n").unwrap();
    assert_eq!(mvec(&["evaluate", p(&a), p(&names)]).stdout, "nmi=1.0000 purity=1.0000\n");
}

#[test]
fn evaluate_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let empty = dir.path().join("e.txt");
    fs::write(&a, "0\n0\n1\n").unwrap();
    fs::write(&b, "0\n1\n").unwrap();
    fs::write(&empty, "").unwrap();
    assert_eq!(mvec(&["evaluate", p(&a), p(&b)]).code, EXIT_PARAM);
    assert_eq!(mvec(&["evaluate", p(&empty), p(&empty)]).code, EXIT_PARAM);
    assert_eq!(mvec(&["evaluate", p(&a), p(&dir.path().join("nope"))]).code, EXIT_INPUT);
}

#[test]
fn benchmark_is_reproducible_and_consistent_with_dump() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = common::write_grid_manifest(dir.path(), 12, 3, &["BLC1", "BLC2"], 4);
    let dump = dir.path().join("per_problem.csv");
    let md = dir.path().join("report.md");
    let args = [
        "--seed", "7", "--per-problem", p(&dump), "benchmark", p(&manifest), "--n-problems", "2", "--km-repeats", "3",
        "--out-md", p(&md),
    ];
    let first = mvec(&args);
    assert_eq!(first.code, EXIT_OK, "{}", first.stderr);
    let second = mvec(&args);
    assert_eq!(first.stdout, second.stdout);

    let lines: Vec<&str> = first.stdout.lines().collect();
    assert_eq!(lines[0], "condition,algorithm,config,nmi_mean,purity_mean,n_problems,km_repeats");
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[1].starts_with("BLC1,AC,linkage=ward;l2=off;nmi=geometric,"));
    assert!(lines[2].starts_with("BLC1,KM,kmeans++;"));
    assert!(lines[2].ends_with(",2,3"));
    assert!(fs::read_to_string(&md).unwrap().contains("| BLC2 | KM |"));

    // Report means are the means of the dumped per-problem scores.
    let dump_text = fs::read_to_string(&dump).unwrap();
    for row in &lines[1..] {
        let f: Vec<&str> = row.split(',').collect();
        let scores: Vec<f64> = dump_text
            .lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|d| d[0] == f[0] && d[1] == f[1])
            .map(|d| d[4].parse().unwrap())
            .collect();
        assert_eq!(scores.len(), 2);
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        assert_eq!(format!("{mean:.4}"), f[3]);
    }

    let conditions = mvec(&["benchmark", p(&manifest), "--n-problems", "1", "--conditions", "BLC2", "--algorithms", "agglomerative"]);
    assert_eq!(conditions.stdout.lines().count(), 2);
}

#[test]
fn benchmark_with_identical_views_has_no_sampling_variance() {
    let dir = tempfile::tempdir().unwrap();
    // Every view of an object is the same row.
    let m = FeatureMatrix::from_rows(&[[0.0, 0.0], [0.5, 0.0], [9.0, 9.0], [9.0, 9.5], [4.6, 4.4], [4.0, 5.0]]).unwrap();
    save_features(&m, dir.path().join("f.fvec"), FeatureFormat::Fvec).unwrap();
    let objects: Vec<_> = (0..6)
        .map(|i| {
            let views: Vec<_> = (0..4)
                .map(|pose| serde_json::json!({"file": "f", "row": i, "condition": "A", "pose": pose}))
                .collect();
            serde_json::json!({"id": format!("o{i}"), "class": format!("c{}", i % 2), "views": views})
        })
        .collect();
    let manifest = dir.path().join("m.json");
    let doc = serde_json::json!({"conditions": ["A"], "feature_files": {"f": "f.fvec"}, "objects": objects});
    fs::write(&manifest, doc.to_string()).unwrap();

    let dump = dir.path().join("dump.csv");
    let o = mvec(&["--per-problem", p(&dump), "benchmark", p(&manifest), "--n-problems", "25", "--algorithms", "agglomerative"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let scores: Vec<String> = fs::read_to_string(&dump)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().to_string())
        .collect();
    assert_eq!(scores.len(), 25);
    assert!(scores.iter().all(|s| s == &scores[0]));
}

#[test]
fn benchmark_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m = FeatureMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
    save_features(&m, dir.path().join("f.fvec"), FeatureFormat::Fvec).unwrap();
    let doc = serde_json::json!({
        "conditions": ["A"], "feature_files": {"f": "f.fvec"},
        "objects": [
            {"id": "a", "views": [{"file": "f", "row": 0, "condition": "A", "pose": 0}]},
            {"id": "b", "views": [{"file": "f", "row": 1, "condition": "A", "pose": 0}]}
        ]
    });
    let manifest = dir.path().join("m.json");
    fs::write(&manifest, doc.to_string()).unwrap();
    assert_eq!(mvec(&["benchmark", p(&manifest)]).code, EXIT_PARAM);
    assert_eq!(mvec(&["benchmark", p(&dir.path().join("none.json"))]).code, EXIT_INPUT);

    let labelled = common::write_grid_manifest(dir.path(), 4, 2, &["A"], 1);
    assert_eq!(mvec(&["benchmark", p(&labelled), "--conditions", "Z"]).code, EXIT_PARAM);
}

#[test]
fn mvec_writes_labels_dump_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = common::write_grid_manifest(dir.path(), 12, 3, &["BLC1"], 4);
    let labels = dir.path().join("labels.txt");
    let ca = dir.path().join("ca.csv");
    let report = dir.path().join("report.csv");
    let args = [
        "--seed", "3", "mvec", p(&manifest), "--condition", "BLC1", "-N", "50", "--out-labels", p(&labels), "--ca-out",
        p(&ca), "--report", p(&report), "--workers", "2",
    ];
    let o = mvec(&args);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(fs::read_to_string(&labels).unwrap().lines().count(), 12);
    let ca_text = fs::read_to_string(&ca).unwrap();
    assert!(ca_text.ends_with("N=50\n"));
    assert_eq!(ca_text.lines().count(), 13);
    let rep = fs::read_to_string(&report).unwrap();
    let row = rep.lines().nth(1).unwrap();
    assert!(row.starts_with("BLC1,AC,linkage=ward;l2=off;consensus=average;nmi=geometric,50,1.0000,1.0000,"));
    assert!(row.ends_with("1.00 (1.00)"));

    let first_labels = fs::read_to_string(&labels).unwrap();
    assert_eq!(mvec(&args).code, EXIT_OK);
    assert_eq!(fs::read_to_string(&labels).unwrap(), first_labels);
}

#[test]
fn mvec_single_view_matches_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = common::write_grid_manifest(dir.path(), 9, 3, &["A"], 1);
    let o = mvec(&["mvec", p(&manifest), "--condition", "A", "-N", "5"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    // All nine views live in one file, in object order.
    let c = mvec(&["cluster", p(&dir.path().join("feat.fvec")), "-k", "3"]);
    assert_eq!(o.stdout, c.stdout);
}

#[test]
fn mvec_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = common::write_grid_manifest(dir.path(), 6, 2, &["A"], 2);
    assert_eq!(mvec(&["mvec", p(&manifest), "--condition", "A", "-N", "0"]).code, EXIT_PARAM);
    assert_eq!(mvec(&["mvec", p(&manifest), "--condition", "B"]).code, EXIT_PARAM);
    assert_eq!(mvec(&["mvec", p(&manifest), "--condition", "A", "-k", "7"]).code, EXIT_PARAM);
    assert_eq!(
        mvec(&["mvec", p(&manifest), "--condition", "A", "--consensus-linkage", "ward"]).code,
        EXIT_PARAM
    );
}

#[test]
fn binary_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let features = write_line_features(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_mvec"))
        .args(["cluster", p(&features), "-k", "2", "--algorithm", "kmeans"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0\n0\n1\n1\n");

    let out = Command::new(env!("CARGO_BIN_EXE_mvec"))
        .args(["cluster", "/nonexistent.fvec", "-k", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
}
