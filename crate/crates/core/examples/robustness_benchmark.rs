//! Benchmark clustering pipelines across acquisition conditions.
//!
//! Every problem draws one view per object; all pipelines see the same
//! draws, so their scores are directly comparable.

use mvec::bench::{run_benchmark, BenchmarkConfig};
use mvec::synth::{multiview_dataset, MultiViewSpec};
use mvec::{Algorithm, LinkageKind, Pipeline};

fn main() -> mvec::Result<()> {
    let spec = MultiViewSpec {
        conditions: vec![("sharp".into(), 0.3), ("blurred".into(), 1.5), ("dark".into(), 3.0)],
        ..MultiViewSpec::default()
    };
    let ds = multiview_dataset(&spec)?;

    let mut cfg = BenchmarkConfig::new(vec![
        Pipeline::new(Algorithm::agglomerative(LinkageKind::Ward)),
        Pipeline::new(Algorithm::agglomerative(LinkageKind::Average)),
        Pipeline::new(Algorithm::kmeans()),
    ]);
    cfg.n_problems = 100;
    cfg.km_repeats = 3;
    cfg.seed = 42;

    let report = run_benchmark(&ds, &cfg)?;
    print!("{}", report.to_markdown());
    Ok(())
}
