//! Robustness benchmark: for every condition, draw many clustering problems
//! by picking one view per object, cluster each with every pipeline, and
//! average NMI and purity against the ground truth.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;

use crate::cluster::Pipeline;
use crate::ensemble::sample_view_assignment;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::manifest::MultiViewDataset;
use crate::metrics::{nmi, purity, NmiNormalization};
use crate::parallel;
use crate::rng::{derive_seed, substream};

pub const CSV_HEADER: &str = "condition,algorithm,config,nmi_mean,purity_mean,n_problems,km_repeats";

#[derive(Clone, Debug)]
pub struct BenchmarkConfig {
    /// Conditions to evaluate; `None` means every declared condition.
    pub conditions: Option<Vec<String>>,
    pub pipelines: Vec<Pipeline>,
    pub n_problems: usize,
    /// Seeds averaged per problem for stochastic pipelines.
    pub km_repeats: usize,
    pub seed: u64,
    pub nmi_normalization: NmiNormalization,
    pub workers: Option<usize>,
}

impl BenchmarkConfig {
    pub fn new(pipelines: Vec<Pipeline>) -> Self {
        BenchmarkConfig {
            conditions: None,
            pipelines,
            n_problems: 1000,
            km_repeats: 10,
            seed: 0,
            nmi_normalization: NmiNormalization::default(),
            workers: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_problems == 0 || self.km_repeats == 0 {
            return Err(Error::InvalidParameter(
                "n_problems and km_repeats must be positive".into(),
            ));
        }
        if self.pipelines.is_empty() {
            return Err(Error::InvalidParameter("no pipelines to benchmark".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub condition: String,
    pub algorithm: String,
    pub config: String,
    pub nmi_mean: f64,
    pub purity_mean: f64,
    pub n_problems: usize,
    pub km_repeats: usize,
    pub wall_time: f64,
}

/// Score of one pipeline on one problem, averaged over k-means repeats.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemScore {
    pub condition: String,
    pub algorithm: String,
    pub config: String,
    pub problem: usize,
    pub nmi: f64,
    pub purity: f64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchmarkReport {
    pub rows: Vec<ReportRow>,
    pub per_problem: Vec<ProblemScore>,
}

impl BenchmarkReport {
    /// Fixed-column CSV with metrics at four decimals. Wall time is left out
    /// so identical runs give identical bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:.4},{:.4},{},{}",
                r.condition, r.algorithm, r.config, r.nmi_mean, r.purity_mean, r.n_problems, r.km_repeats
            )
            .unwrap();
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from(
            "| condition | algorithm | config | NMI | purity | problems | KM repeats | wall time (s) |\n\
             |---|---|---|---|---|---|---|---|\n",
        );
        for r in &self.rows {
            writeln!(
                out,
                "| {} | {} | `{}` | {:.4} | {:.4} | {} | {} | {:.2} |",
                r.condition, r.algorithm, r.config, r.nmi_mean, r.purity_mean, r.n_problems, r.km_repeats, r.wall_time
            )
            .unwrap();
        }
        out
    }

    /// Full-precision per-problem scores, one line per (condition,
    /// algorithm, problem).
    pub fn per_problem_csv(&self) -> String {
        let mut out = String::from("condition,algorithm,config,problem,nmi,purity\n");
        for s in &self.per_problem {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.condition, s.algorithm, s.config, s.problem, s.nmi, s.purity
            ).unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_csv())
    }

    pub fn write_markdown(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_markdown())
    }

    pub fn write_per_problem(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.per_problem_csv())
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One sampled problem: the assembled matrix and a seed for stochastic
/// pipelines.
struct Problem {
    features: FeatureMatrix,
    seed: u64,
}

/// Runs the benchmark. Problem `p` samples its views from substream
/// `(seed, p)`, so every condition and pipeline sees the same problem
/// indices drawn the same way.
pub fn run_benchmark(ds: &MultiViewDataset, cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let truth = ds.ground_truth().ok_or(Error::MissingGroundTruth)?;
    let k = truth.k();
    let conditions = match &cfg.conditions {
        Some(c) => c.clone(),
        None => ds.conditions().to_vec(),
    };
    let restricted = conditions
        .iter()
        .map(|c| ds.restrict_to_condition(c))
        .collect::<Result<Vec<_>>>()?;

    let mut report = BenchmarkReport::default();
    for (condition, view_set) in conditions.iter().zip(&restricted) {
        let problems = parallel::install(cfg.workers, || {
            (0..cfg.n_problems)
                .into_par_iter()
                .map(|p| {
                    let mut rng = substream(cfg.seed, p as u64);
                    let choice = sample_view_assignment(view_set, &mut rng)?;
                    let seed = rng.next_u64();
                    Ok(Problem {
                        features: view_set.assemble(&choice)?,
                        seed,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })??;

        for pipeline in &cfg.pipelines {
            let repeats = if pipeline.algorithm.is_stochastic() {
                cfg.km_repeats
            } else {
                1
            };
            let start = Instant::now();
            let scores = parallel::install(cfg.workers, || {
                problems
                    .par_iter()
                    .map(|problem| {
                        let (mut nmi_sum, mut purity_sum) = (0.0, 0.0);
                        for r in 0..repeats {
                            let pred = pipeline.fit(&problem.features, k, derive_seed(problem.seed, r as u64))?;
                            nmi_sum += nmi(&pred, &truth, cfg.nmi_normalization)?;
                            purity_sum += purity(&pred, &truth)?;
                        }
                        Ok((nmi_sum / repeats as f64, purity_sum / repeats as f64))
                    })
                    .collect::<Result<Vec<_>>>()
            })??;
            let wall_time = start.elapsed().as_secs_f64();

            let n = scores.len() as f64;
            let algorithm = pipeline.algorithm.short_name().to_string();
            let config = format!("{pipeline};nmi={}", cfg.nmi_normalization);
            report.rows.push(ReportRow {
                condition: condition.clone(),
                algorithm: algorithm.clone(),
                config: config.clone(),
                nmi_mean: scores.iter().map(|s| s.0).sum::<f64>() / n,
                purity_mean: scores.iter().map(|s| s.1).sum::<f64>() / n,
                n_problems: cfg.n_problems,
                km_repeats: repeats,
                wall_time,
            });
            report
                .per_problem
                .extend(scores.into_iter().enumerate().map(|(problem, (nmi, purity))| ProblemScore {
                    condition: condition.clone(),
                    algorithm: algorithm.clone(),
                    config: config.clone(),
                    problem,
                    nmi,
                    purity,
                }));
        }
    }
    Ok(report)
}
