//! Repeated-trial experiments: many seeds per `(n, α, d)`, averaged statistics
//! next to the closed-form predictions.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DrggError, Result};
use crate::generator::{generate, ModelParams};
use crate::stats::{
    clustering_in, clustering_undirected, count_triangles, degree_histograms, reciprocity, shortest_path_stats,
    DegreeHistogram, PathMode, PathOptions,
};
use crate::theory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub n: usize,
    pub alpha: f64,
    pub d: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentOutputs {
    /// CSV table, one row per run.
    pub summary: Option<PathBuf>,
    /// Directory for per-run degree distribution series.
    pub series_dir: Option<PathBuf>,
    /// JSON document with the full summary.
    pub report: Option<PathBuf>,
}

fn default_threshold() -> usize {
    PathOptions::default().exact_threshold
}

fn default_sources() -> usize {
    PathOptions::default().sample_sources
}

fn default_mode() -> PathMode {
    PathMode::UndirectedProjection
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub runs: Vec<RunSpec>,
    pub trials: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_mode")]
    pub path_mode: PathMode,
    #[serde(default = "default_threshold")]
    pub exact_path_threshold: usize,
    #[serde(default = "default_sources")]
    pub sample_sources: usize,
    #[serde(default)]
    pub outputs: ExperimentOutputs,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| DrggError::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_owned(),
        })?;
        if cfg.trials == 0 {
            return Err(DrggError::invalid("trials must be at least 1"));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn path_options(&self, seed: u64) -> PathOptions {
        PathOptions {
            mode: self.path_mode,
            exact_threshold: self.exact_path_threshold,
            sample_sources: self.sample_sources,
            seed,
        }
    }
}

/// Everything measured on one trial graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub seed: u64,
    pub edge_count: usize,
    pub clustering_undirected: f64,
    pub clustering_in_excl: f64,
    pub reciprocity: Option<f64>,
    pub diameter: Option<u32>,
    pub avg_path_length: Option<f64>,
    pub type1_labeled: u64,
    pub type2_labeled: u64,
    #[serde(skip)]
    pub in_hist: DegreeHistogram,
    #[serde(skip)]
    pub out_hist: DegreeHistogram,
}

pub fn run_trial(params: &ModelParams, paths: &PathOptions) -> Result<TrialStats> {
    let (_, g) = generate(params)?;
    let (in_hist, out_hist) = degree_histograms(&g);
    let tri = count_triangles(&g);
    let p = match shortest_path_stats(&g, paths) {
        Ok(p) => Some(p),
        Err(DrggError::UndefinedStatistic(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(TrialStats {
        seed: params.seed,
        edge_count: g.edge_count(),
        clustering_undirected: clustering_undirected(&g),
        clustering_in_excl: clustering_in(&g).excl,
        reciprocity: reciprocity(&g).ok(),
        diameter: p.map(|p| p.diameter),
        avg_path_length: p.map(|p| p.avg_path_length),
        type1_labeled: tri.type1_labeled,
        type2_labeled: tri.type2_labeled,
        in_hist,
        out_hist,
    })
}

/// Mean and twice the sample standard deviation; the spread needs two or more values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub two_sigma: Option<f64>,
    pub count: usize,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let two_sigma = (values.len() > 1)
            .then(|| 2.0 * (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt());
        Some(Estimate { mean, two_sigma, count: values.len() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub alpha: f64,
    pub d: usize,
    pub trials: usize,
    pub first_seed: u64,
    pub clustering_undirected: Estimate,
    pub clustering_in_excl: Estimate,
    pub diameter: Option<Estimate>,
    pub avg_path_length: Option<Estimate>,
    pub edge_count: Estimate,
    pub reciprocity: Option<Estimate>,
    /// `type1_labeled / (n ln² n)`.
    pub triangle_ratio: Estimate,
    pub theory_expected_edges: f64,
    pub theory_reciprocity: f64,
    pub theory_clustering_in: Option<f64>,
    pub edge_count_dev_pct: f64,
    pub reciprocity_dev_pct: Option<f64>,
    pub clustering_in_dev_pct: Option<f64>,
    #[serde(skip)]
    pub trial_stats: Vec<TrialStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub rows: Vec<SummaryRow>,
    /// Runs left out, with the reason.
    pub skipped: Vec<String>,
}

fn pct(measured: f64, predicted: f64) -> f64 {
    100.0 * (measured / predicted - 1.0)
}

fn summarize(spec: &RunSpec, first_seed: u64, trials: Vec<TrialStats>) -> Result<SummaryRow> {
    let col = |f: &dyn Fn(&TrialStats) -> Option<f64>| -> Vec<f64> { trials.iter().filter_map(f).collect() };
    let nf = spec.n as f64;
    let ln2 = nf.ln().powi(2);
    let edge_count = Estimate::from_values(&col(&|t| Some(t.edge_count as f64))).expect("trials >= 1");
    let reciprocity = Estimate::from_values(&col(&|t| t.reciprocity));
    let clustering_in_excl = Estimate::from_values(&col(&|t| Some(t.clustering_in_excl))).expect("trials >= 1");
    let theory_expected_edges = theory::expected_edges(spec.n, spec.alpha, spec.d)?;
    let theory_reciprocity = theory::reciprocity_limit(spec.alpha, spec.d)?;
    let theory_clustering_in = theory::clustering_constant(spec.alpha, spec.d).ok();
    Ok(SummaryRow {
        n: spec.n,
        alpha: spec.alpha,
        d: spec.d,
        trials: trials.len(),
        first_seed,
        clustering_undirected: Estimate::from_values(&col(&|t| Some(t.clustering_undirected))).expect("trials >= 1"),
        clustering_in_excl,
        diameter: Estimate::from_values(&col(&|t| t.diameter.map(f64::from))),
        avg_path_length: Estimate::from_values(&col(&|t| t.avg_path_length)),
        edge_count,
        reciprocity,
        triangle_ratio: Estimate::from_values(&col(&|t| Some(t.type1_labeled as f64 / (nf * ln2))))
            .expect("trials >= 1"),
        theory_expected_edges,
        theory_reciprocity,
        theory_clustering_in,
        edge_count_dev_pct: pct(edge_count.mean, theory_expected_edges),
        reciprocity_dev_pct: reciprocity.map(|r| pct(r.mean, theory_reciprocity)),
        clustering_in_dev_pct: theory_clustering_in.map(|c| pct(clustering_in_excl.mean, c)),
        trial_stats: trials,
    })
}

/// Runs every configuration; infeasible ones are skipped and listed.
/// Trial `i` of every run uses seed `seed_base + i`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    if cfg.trials == 0 {
        return Err(DrggError::invalid("trials must be at least 1"));
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for spec in &cfg.runs {
        let base = ModelParams::new(spec.n, spec.alpha, spec.d, cfg.seed_base);
        if let Err(e) = base.validate() {
            skipped.push(format!("n = {}, alpha = {}, d = {}: {e}", spec.n, spec.alpha, spec.d));
            continue;
        }
        let trials: Vec<TrialStats> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|i| {
                let seed = cfg.seed_base.wrapping_add(i);
                run_trial(&ModelParams { seed, ..base }, &cfg.path_options(seed))
            })
            .collect::<Result<_>>()?;
        rows.push(summarize(spec, cfg.seed_base, trials)?);
    }
    Ok(ExperimentSummary { rows, skipped })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_owned(), |v| v.to_string())
}

/// CSV table with one row per run; absent values are written as `NA`.
pub fn summary_csv(summary: &ExperimentSummary) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let metrics = [
        "clustering_undirected",
        "clustering_in_excl",
        "diameter",
        "avg_path_length",
        "edge_count",
        "reciprocity",
        "triangle_ratio",
    ];
    let mut header: Vec<String> = ["n", "alpha", "d", "trials", "first_seed"].map(String::from).to_vec();
    for m in metrics {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_2sigma"));
    }
    header.extend(
        [
            "theory_expected_edges",
            "theory_reciprocity",
            "theory_clustering_in",
            "edge_count_dev_pct",
            "reciprocity_dev_pct",
            "clustering_in_dev_pct",
        ]
        .map(String::from),
    );
    w.write_record(&header).map_err(csv_err)?;
    for r in &summary.rows {
        let mut rec =
            vec![r.n.to_string(), r.alpha.to_string(), r.d.to_string(), r.trials.to_string(), r.first_seed.to_string()];
        for e in [
            Some(r.clustering_undirected),
            Some(r.clustering_in_excl),
            r.diameter,
            r.avg_path_length,
            Some(r.edge_count),
            r.reciprocity,
            Some(r.triangle_ratio),
        ] {
            rec.push(opt(e.map(|e| e.mean)));
            rec.push(opt(e.and_then(|e| e.two_sigma)));
        }
        rec.push(r.theory_expected_edges.to_string());
        rec.push(r.theory_reciprocity.to_string());
        rec.push(opt(r.theory_clustering_in));
        rec.push(r.edge_count_dev_pct.to_string());
        rec.push(opt(r.reciprocity_dev_pct));
        rec.push(opt(r.clustering_in_dev_pct));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| DrggError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Degree distribution series `(kind, k, p, sigma)`: the mean over trials of the
/// fraction of vertices with degree `k`, and the standard deviation across trials.
pub fn degree_series_csv(row: &SummaryRow) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "k", "p", "sigma"]).map_err(csv_err)?;
    for (kind, pick) in [("in", true), ("out", false)] {
        let hists: Vec<&DegreeHistogram> =
            row.trial_stats.iter().map(|t| if pick { &t.in_hist } else { &t.out_hist }).collect();
        let max = hists.iter().filter_map(|h| h.max_degree()).max().unwrap_or(0);
        for k in 0..=max {
            let fr: Vec<f64> = hists.iter().map(|h| h.count(k) as f64 / h.total().max(1) as f64).collect();
            if fr.iter().all(|&f| f == 0.0) {
                continue;
            }
            let e = Estimate::from_values(&fr).expect("at least one trial");
            w.write_record([kind.to_owned(), k.to_string(), e.mean.to_string(), opt(e.two_sigma.map(|s| s / 2.0))])
                .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| DrggError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_err(e: csv::Error) -> DrggError {
    DrggError::Io(std::io::Error::other(e))
}

/// File name of a run's series inside `series_dir`.
pub fn series_file_name(row: &SummaryRow) -> String {
    format!("degree_n{}_alpha{}_d{}.csv", row.n, row.alpha, row.d)
}

/// Writes whatever outputs the config names.
pub fn write_outputs(cfg: &ExperimentConfig, summary: &ExperimentSummary) -> Result<()> {
    if let Some(p) = &cfg.outputs.summary {
        std::fs::write(p, summary_csv(summary)?)?;
    }
    if let Some(p) = &cfg.outputs.report {
        crate::io::write_report(summary, p)?;
    }
    if let Some(dir) = &cfg.outputs.series_dir {
        std::fs::create_dir_all(dir)?;
        for row in &summary.rows {
            std::fs::write(dir.join(series_file_name(row)), degree_series_csv(row)?)?;
        }
    }
    Ok(())
}
