//! Command-line front end.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 invalid
//! parameters or protocol violations, 4 runtime failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_benchmark, BenchmarkConfig};
use crate::cluster::{kmeans_fit, linkage_features, Algorithm, KMeansConfig, LinkageKind, Pipeline};
use crate::ensemble::{mvec_run, MvecConfig};
use crate::error::Error;
use crate::features::load_features;
use crate::manifest::load_manifest;
use crate::metrics::{nmi, purity, NmiNormalization};
use crate::partition::Partition;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PARAM: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "mvec", version, about = "Multi-view ensemble clustering of image embeddings")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Master RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Entropy mean used to normalize mutual information.
    #[arg(long = "nmi-norm", global = true, value_enum, default_value_t = NormArg::Geometric)]
    nmi_norm: NormArg,
    /// Linkage for agglomerative clustering of features.
    #[arg(long, global = true, value_enum, default_value_t = LinkageArg::Ward)]
    linkage: LinkageArg,
    /// Scale feature rows to unit L2 norm before clustering.
    #[arg(long = "normalize-features", global = true)]
    normalize_features: bool,
    /// Write per-problem benchmark scores to this CSV file.
    #[arg(long = "per-problem", global = true)]
    per_problem: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormArg {
    Geometric,
    Arithmetic,
}

impl From<NormArg> for NmiNormalization {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Geometric => NmiNormalization::Geometric,
            NormArg::Arithmetic => NmiNormalization::Arithmetic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LinkageArg {
    Ward,
    Average,
    Complete,
}

impl From<LinkageArg> for LinkageKind {
    fn from(l: LinkageArg) -> Self {
        match l {
            LinkageArg::Ward => LinkageKind::Ward,
            LinkageArg::Average => LinkageKind::Average,
            LinkageArg::Complete => LinkageKind::Complete,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Kmeans,
    Agglomerative,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster the rows of a feature file and write one label per line.
    Cluster {
        features: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Agglomerative)]
        algorithm: AlgorithmArg,
        #[arg(long, default_value_t = 10)]
        n_init: usize,
        #[arg(long, default_value_t = 300)]
        max_iter: usize,
        /// Labels output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a label file against a ground-truth label file.
    Evaluate { labels: PathBuf, truth: PathBuf },
    /// Run the sampled-problem robustness benchmark over a manifest.
    Benchmark {
        manifest: PathBuf,
        /// Comma-separated condition tags; all declared conditions by default.
        #[arg(long, value_delimiter = ',')]
        conditions: Vec<String>,
        #[arg(long, value_delimiter = ',', value_enum, default_values_t = [AlgorithmArg::Agglomerative, AlgorithmArg::Kmeans])]
        algorithms: Vec<AlgorithmArg>,
        #[arg(long, default_value_t = 1000)]
        n_problems: usize,
        #[arg(long, default_value_t = 10)]
        km_repeats: usize,
        #[arg(long)]
        workers: Option<usize>,
        /// CSV report; stdout when omitted.
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_md: Option<PathBuf>,
    },
    /// Multi-view ensemble clustering of one condition of a manifest.
    Mvec {
        manifest: PathBuf,
        #[arg(long)]
        condition: String,
        /// Number of base partitions.
        #[arg(short = 'N', long = "partitions", default_value_t = 1000)]
        n_partitions: usize,
        /// Cluster count; defaults to the number of ground-truth classes.
        #[arg(short)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Agglomerative)]
        base: AlgorithmArg,
        #[arg(long, value_enum, default_value_t = LinkageArg::Average)]
        consensus_linkage: LinkageArg,
        #[arg(long)]
        workers: Option<usize>,
        /// Consensus labels; stdout when omitted.
        #[arg(long)]
        out_labels: Option<PathBuf>,
        /// Co-association dump.
        #[arg(long)]
        ca_out: Option<PathBuf>,
        /// Report CSV.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. }
        | Error::MalformedHeader { .. }
        | Error::DimensionMismatch { .. }
        | Error::NonFinite { .. }
        | Error::Parse { .. }
        | Error::Manifest(_)
        | Error::DanglingReference { .. }
        | Error::DuplicateObject(_)
        | Error::MixedClassLabels
        | Error::EmptyViews(_) => EXIT_INPUT,
        Error::MissingCondition { .. }
        | Error::UnknownCondition(_)
        | Error::MissingGroundTruth
        | Error::LengthMismatch { .. }
        | Error::TooManyClusters { .. }
        | Error::WardOnDistance
        | Error::InvalidParameter(_) => EXIT_PARAM,
        Error::InvalidPartition(_) | Error::EmptyCluster(_) | Error::InvalidDistance(_) => EXIT_RUNTIME,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(exit_code(&e), e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAM } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let g = cli.global;
    match cli.command {
        Command::Cluster {
            features,
            k,
            algorithm,
            n_init,
            max_iter,
            out,
        } => cmd_cluster(&g, &features, k, algorithm, n_init, max_iter, out.as_deref(), stdout, stderr),
        Command::Evaluate { labels, truth } => cmd_evaluate(&g, &labels, &truth, stdout),
        Command::Benchmark {
            manifest,
            conditions,
            algorithms,
            n_problems,
            km_repeats,
            workers,
            out_csv,
            out_md,
        } => {
            let mut cfg = BenchmarkConfig::new(algorithms.iter().map(|&a| pipeline(&g, a)).collect());
            cfg.conditions = (!conditions.is_empty()).then_some(conditions);
            cfg.n_problems = n_problems;
            cfg.km_repeats = km_repeats;
            cfg.seed = g.seed;
            cfg.nmi_normalization = g.nmi_norm.into();
            cfg.workers = workers;
            cmd_benchmark(&g, &manifest, &cfg, out_csv.as_deref(), out_md.as_deref(), stdout, stderr)
        }
        Command::Mvec {
            manifest,
            condition,
            n_partitions,
            k,
            base,
            consensus_linkage,
            workers,
            out_labels,
            ca_out,
            report,
        } => {
            let args = MvecArgs {
                manifest,
                condition,
                n_partitions,
                k,
                base,
                consensus_linkage: consensus_linkage.into(),
                workers,
                out_labels,
                ca_out,
                report,
            };
            cmd_mvec(&g, &args, stdout, stderr)
        }
    }
}

fn pipeline(g: &GlobalOpts, algorithm: AlgorithmArg) -> Pipeline {
    let algorithm = match algorithm {
        AlgorithmArg::Kmeans => Algorithm::kmeans(),
        AlgorithmArg::Agglomerative => Algorithm::agglomerative(g.linkage.into()),
    };
    Pipeline::new(algorithm).with_normalization(g.normalize_features)
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Error::io(path, e).into()
}

fn write_labels(p: &Partition, path: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    let mut text = String::with_capacity(p.len() * 2);
    for l in p.labels() {
        writeln!(text, "{l}").unwrap();
    }
    match path {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string())),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_cluster(
    g: &GlobalOpts,
    features: &Path,
    k: usize,
    algorithm: AlgorithmArg,
    n_init: usize,
    max_iter: usize,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let mut m = load_features(features)?;
    if k == 0 || k > m.rows() {
        return Err(Failure::new(
            EXIT_PARAM,
            format!("k must be in 1..={}, got {k}", m.rows()),
        ));
    }
    if g.normalize_features {
        m = m.l2_normalized();
    }
    let partition = match algorithm {
        AlgorithmArg::Kmeans => {
            let cfg = KMeansConfig {
                k,
                n_init,
                max_iter,
                tol: 1e-4,
                seed: g.seed,
            };
            let fit = kmeans_fit(&m, &cfg)?;
            let _ = writeln!(stderr, "inertia={} iterations={}", fit.inertia, fit.iterations);
            fit.partition
        }
        AlgorithmArg::Agglomerative => {
            let dendro = linkage_features(&m, g.linkage.into());
            let n = m.rows();
            let merges = dendro.merges();
            let last_applied = (n > k).then(|| merges[n - k - 1].height);
            let first_undone = (k > 1).then(|| merges[n - k].height);
            let fmt = |h: Option<f64>| h.map_or("-".to_string(), |h| format!("{h:.6}"));
            let _ = writeln!(
                stderr,
                "linkage={} last_merge_height={} cut_gap_height={}",
                LinkageKind::from(g.linkage),
                fmt(last_applied),
                fmt(first_undone)
            );
            dendro.cut(k)?
        }
    };
    write_labels(&partition, out, stdout)
}

fn read_label_file(path: &Path) -> Result<Partition, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let tokens: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    Ok(Partition::from_tokens(tokens))
}

fn cmd_evaluate(g: &GlobalOpts, labels: &Path, truth: &Path, stdout: &mut dyn Write) -> CmdResult {
    let pred = read_label_file(labels)?;
    let truth = read_label_file(truth)?;
    if pred.is_empty() || truth.is_empty() {
        return Err(Failure::new(EXIT_PARAM, "label files must not be empty"));
    }
    let score = nmi(&pred, &truth, g.nmi_norm.into())?;
    let pur = purity(&pred, &truth)?;
    writeln!(stdout, "nmi={score:.4} purity={pur:.4}").map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string()))
}

fn cmd_benchmark(
    g: &GlobalOpts,
    manifest: &Path,
    cfg: &BenchmarkConfig,
    out_csv: Option<&Path>,
    out_md: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let ds = load_manifest(manifest)?;
    if !ds.has_ground_truth() {
        return Err(Failure::new(EXIT_PARAM, "benchmark requires ground-truth class labels"));
    }
    let report = run_benchmark(&ds, cfg)?;
    for row in &report.rows {
        let _ = writeln!(
            stderr,
            "{} {} nmi={:.4} purity={:.4} wall_time={:.2}s",
            row.condition, row.algorithm, row.nmi_mean, row.purity_mean, row.wall_time
        );
    }
    match out_csv {
        Some(path) => report.write_csv(path)?,
        None => stdout
            .write_all(report.to_csv().as_bytes())
            .map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string()))?,
    }
    if let Some(path) = out_md {
        report.write_markdown(path)?;
    }
    if let Some(path) = &g.per_problem {
        report.write_per_problem(path)?;
    }
    Ok(())
}

struct MvecArgs {
    manifest: PathBuf,
    condition: String,
    n_partitions: usize,
    k: Option<usize>,
    base: AlgorithmArg,
    consensus_linkage: LinkageKind,
    workers: Option<usize>,
    out_labels: Option<PathBuf>,
    ca_out: Option<PathBuf>,
    report: Option<PathBuf>,
}

pub const MVEC_REPORT_HEADER: &str =
    "condition,algorithm,config,n_partitions,nmi,purity,mean_partition_nmi,summary";

fn cmd_mvec(g: &GlobalOpts, a: &MvecArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    if a.n_partitions == 0 {
        return Err(Failure::new(EXIT_PARAM, "N must be at least 1"));
    }
    if a.consensus_linkage == LinkageKind::Ward {
        return Err(Error::WardOnDistance.into());
    }
    let ds = load_manifest(&a.manifest)?.restrict_to_condition(&a.condition)?;
    let k = match (a.k, ds.n_classes()) {
        (Some(k), _) => k,
        (None, Some(k)) => k,
        (None, None) => {
            return Err(Failure::new(EXIT_PARAM, "-k is required for unlabeled manifests"));
        }
    };
    if k == 0 || k > ds.n_objects() {
        return Err(Failure::new(
            EXIT_PARAM,
            format!("k must be in 1..={}, got {k}", ds.n_objects()),
        ));
    }
    let cfg = MvecConfig {
        n_partitions: a.n_partitions,
        k,
        base: pipeline(g, a.base),
        consensus_linkage: a.consensus_linkage,
        seed: g.seed,
        nmi_normalization: g.nmi_norm.into(),
        workers: a.workers,
    };
    let outcome = mvec_run(&ds, &cfg).map_err(|e| Failure::new(EXIT_RUNTIME, e.to_string()))?;

    write_labels(&outcome.consensus, a.out_labels.as_deref(), stdout)?;
    if let Some(path) = &a.ca_out {
        outcome.coassociation.write_csv(path)?;
    }

    let d = &outcome.diagnostics;
    let num = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
    let summary = match (d.consensus_nmi, d.mean_partition_nmi()) {
        (Some(c), Some(m)) => format!("{c:.2} ({m:.2})"),
        _ => "-".to_string(),
    };
    let row = format!(
        "{},{},{};consensus={};nmi={},{},{},{},{},{}",
        a.condition,
        cfg.base.algorithm.short_name(),
        d.base,
        d.consensus_linkage,
        d.nmi_normalization,
        d.n_partitions,
        num(d.consensus_nmi),
        num(d.consensus_purity),
        num(d.mean_partition_nmi()),
        summary
    );
    let _ = writeln!(stderr, "{MVEC_REPORT_HEADER}\n{row}");
    if let Some(path) = &a.report {
        fs::write(path, format!("{MVEC_REPORT_HEADER}\n{row}\n")).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}
