//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.
//!
//! Run with `cargo test -p mvec --test acceptance -- --nocapture` to see
//! the lines.

mod common;

use std::time::{Duration, Instant};

use mvec::cluster::{kmeans_fit, kmeanspp_init, lloyd, Algorithm, KMeansConfig, LinkageKind, Pipeline};
use mvec::ensemble::{accumulate_coassociation, consensus, mvec_run, MvecConfig};
use mvec::features::FeatureMatrix;
use mvec::manifest::{load_manifest, save_dataset};
use mvec::metrics::{nmi, purity, NmiNormalization};
use mvec::partition::Partition;
use mvec::rng::substream;
use mvec::synth::{gaussian_blobs, multiview_dataset, MultiViewSpec};
use rand::Rng;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    time_limit: Option<Duration>,
    check: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn metric_oracle_equivalence() -> Outcome {
    let mut rng = substream(2024, 0);
    let mut worst = 0.0f64;
    for pair in 0..200 {
        let n = rng.random_range(1..=50);
        let (ka, kb) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..ka)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..kb)).collect();
        let (pa, pb) = (Partition::from_labels(a.clone()), Partition::from_labels(b.clone()));
        for (norm, geometric) in [(NmiNormalization::Geometric, true), (NmiNormalization::Arithmetic, false)] {
            let (want_nmi, want_purity) = common::brute_force_scores(&a, &b, geometric);
            let got_nmi = nmi(&pa, &pb, norm).map_err(|e| e.to_string())?;
            let got_purity = purity(&pa, &pb).map_err(|e| e.to_string())?;
            let err = (got_nmi - want_nmi).abs().max((got_purity - want_purity).abs());
            worst = worst.max(err);
            ensure(err <= 1e-10, || format!("pair {pair}: error {err:e}"))?;
        }
    }
    Ok(format!("200 pairs, max abs error {worst:.2e}"))
}

fn kmeans_sanity() -> Outcome {
    let std = 1.0;
    // Pairwise center distance 20 = 20 standard deviations.
    let centers = vec![vec![0.0, 0.0], vec![20.0, 0.0], vec![10.0, 17.320508]];
    let mut lowest = 1.0f64;
    for seed in 0..20u64 {
        let (m, truth) = gaussian_blobs(&centers, 50, std, seed).map_err(|e| e.to_string())?;
        let fit = kmeans_fit(&m, &KMeansConfig::new(3).with_seed(seed)).map_err(|e| e.to_string())?;
        let score = nmi(&fit.partition, &truth, NmiNormalization::Geometric).map_err(|e| e.to_string())?;
        lowest = lowest.min(score);
        ensure(score >= 0.99, || format!("seed {seed}: NMI {score:.4}"))?;
    }
    Ok(format!("20 seeds, min NMI {lowest:.4}"))
}

fn kmeans_optimality() -> Outcome {
    let mut hits = 0;
    for inst in 0..100u64 {
        let mut rng = substream(77, inst);
        let n = rng.random_range(2..=8);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..2).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let best = common::enumerate_best_two_inertia(&rows);
        let m = FeatureMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let fit = kmeans_fit(&m, &KMeansConfig::new(2).with_seed(inst)).map_err(|e| e.to_string())?;
        if fit.inertia <= best * (1.0 + 1e-9) + 1e-12 {
            hits += 1;
        }
    }
    ensure(hits >= 95, || format!("optimal on {hits}/100"))?;
    Ok(format!("optimal on {hits}/100"))
}

fn lloyd_monotone_and_deterministic() -> Outcome {
    let mut steps = 0;
    for inst in 0..100u64 {
        let mut rng = substream(4242, inst);
        let n = rng.random_range(5..=60);
        let d = rng.random_range(1..=5);
        let k = rng.random_range(1..=n.min(6));
        let data: Vec<f64> = (0..n * d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let m = FeatureMatrix::new(n, d, data).map_err(|e| e.to_string())?;

        let init = kmeanspp_init(&m, k, &mut substream(inst, 0)).map_err(|e| e.to_string())?;
        let run = lloyd(&m, &init, 300, 0.0).map_err(|e| e.to_string())?;
        for w in run.trace.windows(2) {
            steps += 1;
            ensure(w[1] <= w[0] * (1.0 + 1e-9), || {
                format!("instance {inst}: inertia rose {} -> {}", w[0], w[1])
            })?;
        }

        let cfg = KMeansConfig::new(k).with_seed(inst);
        let a = kmeans_fit(&m, &cfg).map_err(|e| e.to_string())?;
        let b = kmeans_fit(&m, &cfg).map_err(|e| e.to_string())?;
        ensure(
            a.partition == b.partition
                && a.inertia.to_bits() == b.inertia.to_bits()
                && a.centroids.data().iter().zip(b.centroids.data()).all(|(x, y)| x.to_bits() == y.to_bits()),
            || format!("instance {inst}: reruns differ"),
        )?;
    }
    Ok(format!("100 instances, {steps} monotone steps, bitwise reruns"))
}

fn coassociation_invariants() -> Outcome {
    let mut rng = substream(31337, 0);
    for ens in 0..50 {
        let n = rng.random_range(1..=30);
        let total = rng.random_range(1..=200);
        let partitions: Vec<Partition> = (0..total)
            .map(|_| {
                let k = rng.random_range(1..=6);
                Partition::from_labels((0..n).map(|_| rng.random_range(0..k)).collect())
            })
            .collect();
        let ca = accumulate_coassociation(&partitions).map_err(|e| e.to_string())?;
        let big_n = total as u64;
        for p in 0..n {
            ensure(ca.count(p, p) == big_n, || format!("ensemble {ens}: diagonal {p}"))?;
            for q in 0..n {
                ensure(ca.count(p, q) == ca.count(q, p), || format!("ensemble {ens}: asymmetric"))?;
                let v = ca.value(p, q);
                let scaled = v * total as f64;
                ensure(
                    ca.count(p, q) <= big_n && (scaled - scaled.round()).abs() < 1e-9 && scaled.round() as u64 == ca.count(p, q),
                    || format!("ensemble {ens}: ({p},{q}) = {v} is not a multiple of 1/{total}"),
                )?;
            }
        }
        let mut shuffled = partitions.clone();
        for i in (1..shuffled.len()).rev() {
            let j = rng.random_range(0..=i);
            shuffled.swap(i, j);
        }
        let again = accumulate_coassociation(&shuffled).map_err(|e| e.to_string())?;
        ensure(again.counts() == ca.counts(), || format!("ensemble {ens}: order dependent"))?;
    }
    Ok("50 ensembles (n <= 30, N <= 200)".into())
}

fn consensus_recovery() -> Outcome {
    let (n, k, big_n) = (40usize, 4usize, 100usize);
    let truth = Partition::from_labels((0..n).map(|i| i % k).collect());
    let mut above_mean = 0;
    let mut high = 0;
    let mut lines = Vec::new();
    for seed in 0..10u64 {
        let mut rng = substream(seed, 0);
        let partitions: Vec<Partition> = (0..big_n)
            .map(|_| {
                let mut labels = truth.labels().to_vec();
                // resample 20% of the labels uniformly
                let mut idx: Vec<usize> = (0..n).collect();
                for i in 0..n / 5 {
                    let j = rng.random_range(i..n);
                    idx.swap(i, j);
                }
                for &i in &idx[..n / 5] {
                    labels[i] = rng.random_range(0..k);
                }
                Partition::new(labels, k).unwrap()
            })
            .collect();
        let mean = partitions
            .iter()
            .map(|p| nmi(p, &truth, NmiNormalization::Geometric).unwrap())
            .sum::<f64>()
            / big_n as f64;
        let ca = accumulate_coassociation(&partitions).map_err(|e| e.to_string())?;
        let cons = consensus(&ca, k, LinkageKind::Average).map_err(|e| e.to_string())?;
        let score = nmi(&cons, &truth, NmiNormalization::Geometric).map_err(|e| e.to_string())?;
        if score >= mean {
            above_mean += 1;
        }
        if score >= 0.9 {
            high += 1;
        }
        lines.push(format!("{score:.2}/{mean:.2}"));
    }
    let detail = format!("consensus/mean per seed: {}", lines.join(" "));
    ensure(above_mean == 10, || format!("consensus >= mean on {above_mean}/10; {detail}"))?;
    ensure(high >= 8, || format!("consensus >= 0.9 on {high}/10; {detail}"))?;
    Ok(detail)
}

fn mvec_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = MultiViewSpec {
        seed: 8,
        ..MultiViewSpec::default()
    };
    let ds = multiview_dataset(&spec).map_err(|e| e.to_string())?;
    let path = save_dataset(&ds, dir.path(), "manifest.json").map_err(|e| e.to_string())?;
    let ds = load_manifest(&path)
        .and_then(|d| d.restrict_to_condition("noisy"))
        .map_err(|e| e.to_string())?;
    for base in [Pipeline::default(), Pipeline::new(Algorithm::kmeans())] {
        let mut cfg = MvecConfig::new(4);
        cfg.n_partitions = 200;
        cfg.seed = 12345;
        cfg.base = base;
        cfg.workers = Some(1);
        let one = mvec_run(&ds, &cfg).map_err(|e| e.to_string())?;
        cfg.workers = Some(8);
        let eight = mvec_run(&ds, &cfg).map_err(|e| e.to_string())?;
        ensure(one.coassociation.counts() == eight.coassociation.counts(), || {
            format!("{}: CA counts differ", cfg.base)
        })?;
        ensure(one.consensus == eight.consensus, || format!("{}: consensus differs", cfg.base))?;
    }
    Ok("AC and KM bases, workers 1 vs 8".into())
}

fn single_view_degenerate() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = MultiViewSpec {
        conditions: vec![("only".into(), 1.0)],
        views_per_condition: 1,
        seed: 21,
        ..MultiViewSpec::default()
    };
    let path = save_dataset(&multiview_dataset(&spec).map_err(|e| e.to_string())?, dir.path(), "m.json")
        .map_err(|e| e.to_string())?;
    let ds = load_manifest(&path).map_err(|e| e.to_string())?;
    let m = ds.assemble(&vec![0; ds.n_objects()]).map_err(|e| e.to_string())?;
    for linkage in [LinkageKind::Ward, LinkageKind::Average, LinkageKind::Complete] {
        let base = Pipeline::new(Algorithm::agglomerative(linkage));
        let expected = base.fit(&m, 4, 0).map_err(|e| e.to_string())?;
        let mut cfg = MvecConfig::new(4);
        cfg.n_partitions = 50;
        cfg.base = base;
        let out = mvec_run(&ds, &cfg).map_err(|e| e.to_string())?;
        ensure(out.consensus.canonical() == expected.canonical(), || {
            format!("{linkage}: consensus differs from base partition")
        })?;
    }
    Ok("ward, average and complete bases".into())
}

#[test]
fn acceptance_criteria() {
    let criteria = [
        Criterion {
            name: "metric-oracle equivalence",
            time_limit: Some(Duration::from_secs(5)),
            check: metric_oracle_equivalence,
        },
        Criterion {
            name: "k-means sanity",
            time_limit: Some(Duration::from_secs(1)),
            check: kmeans_sanity,
        },
        Criterion {
            name: "k-means optimality statistics",
            time_limit: None,
            check: kmeans_optimality,
        },
        Criterion {
            name: "Lloyd monotonicity and seeded determinism",
            time_limit: None,
            check: lloyd_monotone_and_deterministic,
        },
        Criterion {
            name: "co-association invariants",
            time_limit: None,
            check: coassociation_invariants,
        },
        Criterion {
            name: "consensus recovery",
            time_limit: None,
            check: consensus_recovery,
        },
        Criterion {
            name: "MVEC determinism",
            time_limit: None,
            check: mvec_determinism,
        },
        Criterion {
            name: "degenerate single-view manifest",
            time_limit: None,
            check: single_view_degenerate,
        },
    ];

    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let mut result = (c.check)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&result, c.time_limit) {
            if elapsed > limit {
                result = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match &result {
            Ok(detail) => println!("PASS  {:<42} {detail} [{elapsed:.2?}]", c.name),
            Err(why) => {
                println!("FAIL  {:<42} {why} [{elapsed:.2?}]", c.name);
                failed.push(c.name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
