use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use drgg::experiment::{self, ExperimentConfig};
use drgg::fit::{self, FitMethod};
use drgg::io::{self, EdgeListFormat, LabeledEdgeList};
use drgg::stats::{self, PathMode, PathOptions, StatsOptions, StatsReport};
use drgg::theory::{self, TheoryReport};
use drgg::{generate, DiGraph, DrggError, ModelParams};

#[derive(Parser)]
#[command(name = "drgg", version, about = "Directed random geometric graphs on the unit torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and write it as a graph file.
    Generate(GenerateArgs),
    /// Measure a graph file or an edge list.
    Stats(StatsArgs),
    /// Closed-form predictions for (n, alpha, d).
    Theory(TheoryArgs),
    /// Fit beta and z to a graph's degree distributions.
    Fit(FitArgs),
    /// Run a repeated-trial experiment from a TOML config.
    Experiment(ExperimentArgs),
    /// Generate, measure and compare against the predictions in one go.
    Compare(CompareArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long)]
    n: usize,
    /// Pareto exponent; ignored with --fixed-radius.
    #[arg(long, required_unless_present = "fixed_radius")]
    alpha: Option<f64>,
    #[arg(long = "dim", short = 'd')]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Every radius equals r0 (the undirected geometric graph limit).
    #[arg(long)]
    fixed_radius: bool,
}

impl ModelArgs {
    fn params(&self) -> ModelParams {
        match (self.fixed_radius, self.alpha) {
            (false, Some(a)) => ModelParams::new(self.n, a, self.dim, self.seed),
            _ => ModelParams::fixed_radius(self.n, self.dim, self.seed),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Graph file to write.
    #[arg(long)]
    out: PathBuf,
    /// Leave the edge list out of the graph file (it is rebuilt on read).
    #[arg(long)]
    no_edges: bool,
    /// Also export the edges as a TSV/CSV edge list (by extension).
    #[arg(long)]
    edges_out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "input")]
struct InputArgs {
    /// Graph file written by `generate`.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Edge list, one "source<sep>target" per line.
    #[arg(long)]
    edges: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Csv,
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Edge list format; defaults to the file extension.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Flip every edge of an edge list.
    #[arg(long)]
    reverse: bool,
    /// Keep the whole ingested network instead of its largest weakly connected component.
    #[arg(long)]
    whole: bool,
}

struct Loaded {
    graph: DiGraph,
    labels: Option<Vec<String>>,
}

impl IngestArgs {
    fn load(&self) -> drgg::Result<Loaded> {
        if let Some(p) = &self.input.graph {
            let (_, g) = io::read_graph(p)?;
            return Ok(Loaded { graph: g, labels: None });
        }
        let path = self.input.edges.as_ref().expect("clap enforces one input");
        let format = match self.format {
            Some(FormatArg::Tsv) => EdgeListFormat::Tsv,
            Some(FormatArg::Csv) => EdgeListFormat::Csv,
            None => EdgeListFormat::from_path(path),
        };
        let mut list = io::read_edge_list(path, format)?;
        if list.self_loops_dropped + list.duplicates_collapsed > 0 {
            eprintln!(
                "warning: dropped {} self-loop(s) and collapsed {} duplicate edge(s)",
                list.self_loops_dropped, list.duplicates_collapsed
            );
        }
        if self.reverse {
            list = list.reversed();
        }
        let g = list.to_digraph();
        if self.whole {
            return Ok(Loaded { graph: g, labels: Some(list.labels) });
        }
        let keep = g.largest_weak_component();
        if keep.len() < g.vertex_count() {
            eprintln!(
                "note: using the largest weakly connected component ({} of {} vertices)",
                keep.len(),
                g.vertex_count()
            );
        }
        let labels = keep.iter().map(|&i| list.labels[i].clone()).collect();
        Ok(Loaded { graph: g.induced_subgraph(&keep), labels: Some(labels) })
    }
}

#[derive(Args)]
struct PathArgs {
    /// Path statistics on the undirected projection.
    #[arg(long)]
    undirected: bool,
    /// Estimate path statistics from this many sampled sources.
    #[arg(long, value_name = "K")]
    sample_paths: Option<usize>,
    /// Largest graph that gets an all-sources search when --sample-paths is absent.
    #[arg(long, default_value_t = PathOptions::default().exact_threshold)]
    exact_threshold: usize,
    /// Seed for source sampling.
    #[arg(long = "path-seed", default_value_t = 0)]
    path_seed: u64,
}

impl PathArgs {
    fn options(&self) -> PathOptions {
        let mode = if self.undirected { PathMode::UndirectedProjection } else { PathMode::Directed };
        match self.sample_paths {
            Some(k) => PathOptions { mode, exact_threshold: 0, sample_sources: k, seed: self.path_seed },
            None => PathOptions {
                mode,
                exact_threshold: self.exact_threshold,
                seed: self.path_seed,
                ..PathOptions::default()
            },
        }
    }
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    ingest: IngestArgs,
    #[command(flatten)]
    paths: PathArgs,
    /// Number of top-indegree vertices to list.
    #[arg(long, default_value_t = 20)]
    hubs: usize,
    /// Report file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long = "dim", short = 'd')]
    dim: usize,
    /// Largest path length k in the expected path counts.
    #[arg(long, default_value_t = 20)]
    max_path_k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mle,
    Loglog,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    ingest: IngestArgs,
    /// Dimension assumed for alpha = beta d + 1.
    #[arg(long = "dim", short = 'd')]
    dim: usize,
    #[arg(long, value_enum, default_value = "mle")]
    method: MethodArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Override the summary CSV path of the config.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    paths: PathArgs,
    #[arg(long, default_value_t = 20)]
    max_path_k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&Path>) -> drgg::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_generate(a: &GenerateArgs) -> drgg::Result<()> {
    let params = a.model.params();
    let (pts, g) = generate(&params)?;
    io::write_graph(&pts, (!a.no_edges).then_some(&g), &a.out)?;
    if let Some(p) = &a.edges_out {
        io::write_edge_list(&LabeledEdgeList::from_digraph(&g), p, EdgeListFormat::from_path(p))?;
    }
    eprintln!("wrote {} vertices and {} edges to {}", g.vertex_count(), g.edge_count(), a.out.display());
    Ok(())
}

fn cmd_stats(a: &StatsArgs) -> drgg::Result<()> {
    let loaded = a.ingest.load()?;
    let opts = StatsOptions { paths: a.paths.options(), hubs: a.hubs };
    let report = stats::compute_stats(&loaded.graph, loaded.labels.as_deref(), &opts)?;
    emit(&io::report_to_string(&report)?, a.out.as_deref())
}

fn cmd_theory(a: &TheoryArgs) -> drgg::Result<()> {
    let report = theory::theory_report(a.n, a.alpha, a.dim, a.max_path_k)?;
    emit(&io::report_to_string(&report)?, a.out.as_deref())
}

fn cmd_fit(a: &FitArgs) -> drgg::Result<()> {
    let loaded = a.ingest.load()?;
    let (in_hist, out_hist) = stats::degree_histograms(&loaded.graph);
    let method = match a.method {
        MethodArg::Mle => FitMethod::MleTail,
        MethodArg::Loglog => FitMethod::LoglogLs,
    };
    let result = fit::fit_model(&in_hist, &out_hist, loaded.graph.vertex_count(), a.dim, method)?;
    emit(&io::report_to_string(&result)?, a.out.as_deref())
}

fn cmd_experiment(a: &ExperimentArgs) -> drgg::Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(s) = &a.summary {
        cfg.outputs.summary = Some(s.clone());
    }
    let summary = experiment::run_experiment(&cfg)?;
    for w in &summary.skipped {
        eprintln!("warning: skipped {w}");
    }
    experiment::write_outputs(&cfg, &summary)?;
    if cfg.outputs.summary.is_none() {
        print!("{}", experiment::summary_csv(&summary)?);
    }
    Ok(())
}

#[derive(Serialize)]
struct Deviation {
    measured: f64,
    predicted: f64,
    deviation_pct: f64,
}

impl Deviation {
    fn new(measured: f64, predicted: f64) -> Self {
        Deviation { measured, predicted, deviation_pct: 100.0 * (measured / predicted - 1.0) }
    }
}

#[derive(Serialize)]
struct CompareReport {
    params: ModelParams,
    edge_count: Deviation,
    mean_outdegree: Deviation,
    reciprocity: Option<Deviation>,
    clustering_in: Option<Deviation>,
    stats: StatsReport,
    theory: TheoryReport,
}

fn cmd_compare(a: &CompareArgs) -> drgg::Result<()> {
    let params = a.model.params();
    let (_, g) = generate(&params)?;
    let opts = StatsOptions { paths: a.paths.options(), ..StatsOptions::default() };
    let stats = stats::compute_stats(&g, None, &opts)?;
    // fixed-radius graphs are compared with the alpha → ∞ end of the Pareto formulas
    let alpha = if params.alpha.is_finite() { params.alpha } else { 1e6 };
    let theory = theory::theory_report(params.n, alpha, params.d, a.max_path_k)?;
    let report = CompareReport {
        params,
        edge_count: Deviation::new(stats.edge_count as f64, theory.expected_edges),
        mean_outdegree: Deviation::new(stats.out_hist.mean(), theory.z_exact * (params.n - 1) as f64),
        reciprocity: stats.reciprocity.map(|r| Deviation::new(r, theory.reciprocity_limit)),
        clustering_in: theory.clustering_constant.map(|c| Deviation::new(stats.clustering_in_excl, c)),
        stats,
        theory,
    };
    emit(&io::report_to_string(&report)?, a.out.as_deref())
}

fn exit_code(e: &DrggError) -> u8 {
    match e {
        DrggError::InvalidInput(_) | DrggError::Domain(_) => 2,
        DrggError::Infeasible { .. } => 3,
        DrggError::InsufficientData(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Theory(a) => cmd_theory(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("drgg: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
