//! Graph files, edge lists and reports.
//!
//! A graph file is a JSON document:
//!
//! ```text
//! {
//!   "version": "drgg-graph/1",
//!   "params": {"n": .., "alpha": .., "d": .., "seed": .., "radius_mode": "pareto"},
//!   "dim": ..,
//!   "positions": [[x0, y0, ..], ..],
//!   "radii": [r0, ..],
//!   "edges": [[u, v], ..]
//! }
//! ```
//!
//! `params` is `null` for point sets not drawn from the model, `alpha` is `null`
//! in fixed-radius mode and `edges` is optional. Numbers are written in shortest
//! round-trip form so the same graph always yields the same bytes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DrggError, Result};
use crate::generator::{build_edges_grid, ModelParams, RadiusMode, TorusPointSet};
use crate::graph::DiGraph;

pub const GRAPH_VERSION: &str = "drgg-graph/1";

fn num(x: f64) -> String {
    // Debug keeps a trailing ".0" on integral values and uses exponents when shorter
    format!("{x:?}")
}

/// Serializes a point set and, optionally, its edges in canonical form.
pub fn graph_to_string(pts: &TorusPointSet, g: Option<&DiGraph>) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"version\": \"{GRAPH_VERSION}\",");
    match pts.params() {
        Some(p) => {
            let alpha = if p.alpha.is_finite() { num(p.alpha) } else { "null".into() };
            let mode = match p.radius_mode {
                RadiusMode::Pareto => "pareto",
                RadiusMode::FixedR0 => "fixed_r0",
            };
            let _ = writeln!(
                s,
                "  \"params\": {{\"n\": {}, \"alpha\": {alpha}, \"d\": {}, \"seed\": {}, \"radius_mode\": \"{mode}\"}},",
                p.n, p.d, p.seed
            );
        }
        None => s.push_str("  \"params\": null,\n"),
    }
    let _ = writeln!(s, "  \"dim\": {},", pts.dim());
    s.push_str("  \"positions\": [");
    for i in 0..pts.len() {
        let row: Vec<String> = pts.point(i).iter().map(|&x| num(x)).collect();
        let _ = write!(s, "{}\n    [{}]", if i == 0 { "" } else { "," }, row.join(", "));
    }
    s.push_str(if pts.is_empty() { "],\n" } else { "\n  ],\n" });
    let radii: Vec<String> = pts.radii().iter().map(|&r| num(r)).collect();
    let _ = write!(s, "  \"radii\": [{}]", radii.join(", "));
    if let Some(g) = g {
        let pairs: Vec<String> = g.edges().map(|(u, v)| format!("[{u}, {v}]")).collect();
        let lines: Vec<String> = pairs.chunks(8).map(|c| c.join(", ")).collect();
        if lines.is_empty() {
            s.push_str(",\n  \"edges\": []");
        } else {
            let _ = write!(s, ",\n  \"edges\": [\n    {}\n  ]", lines.join(",\n    "));
        }
    }
    s.push_str("\n}\n");
    s
}

pub fn write_graph(pts: &TorusPointSet, g: Option<&DiGraph>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, graph_to_string(pts, g))?;
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    n: usize,
    alpha: Option<f64>,
    d: usize,
    seed: u64,
    radius_mode: RadiusMode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraphFile {
    version: String,
    params: Option<RawParams>,
    dim: usize,
    positions: Vec<Vec<f64>>,
    radii: Vec<f64>,
    edges: Option<Vec<(usize, usize)>>,
}

fn integrity(e: DrggError) -> DrggError {
    match e {
        DrggError::InvalidInput(m) => DrggError::Integrity(m),
        DrggError::Infeasible { message, .. } => DrggError::Integrity(message),
        other => other,
    }
}

/// Parses and validates a graph file. Edges are always rebuilt from the
/// geometry; a stored edge list must agree with them.
pub fn graph_from_str(text: &str) -> Result<(TorusPointSet, DiGraph)> {
    let raw: RawGraphFile = serde_json::from_str(text)
        .map_err(|e| DrggError::Parse { line: e.line(), message: format!("column {}: {e}", e.column()) })?;
    if raw.version != GRAPH_VERSION {
        return Err(DrggError::Parse { line: 0, message: format!("unsupported version {:?}", raw.version) });
    }
    if let Some(i) = raw.positions.iter().position(|row| row.len() != raw.dim) {
        return Err(DrggError::Integrity(format!("position row {i} does not have {} coordinates", raw.dim)));
    }
    let positions: Vec<f64> = raw.positions.into_iter().flatten().collect();
    let pts = match raw.params {
        Some(p) => {
            let alpha = match (p.alpha, p.radius_mode) {
                (Some(a), _) => a,
                (None, RadiusMode::FixedR0) => f64::INFINITY,
                (None, RadiusMode::Pareto) => {
                    return Err(DrggError::Integrity("pareto mode requires a numeric alpha".into()))
                }
            };
            let params = ModelParams { n: p.n, alpha, d: p.d, seed: p.seed, radius_mode: p.radius_mode };
            if params.d != raw.dim {
                return Err(DrggError::Integrity(format!("params.d = {} but dim = {}", params.d, raw.dim)));
            }
            TorusPointSet::new(params, positions, raw.radii).map_err(integrity)?
        }
        None => TorusPointSet::custom(raw.dim, positions, raw.radii).map_err(integrity)?,
    };
    let g = build_edges_grid(&pts);
    if let Some(stored) = raw.edges {
        if !stored.iter().copied().eq(g.edges()) {
            return Err(DrggError::Integrity(
                "stored edges differ from the edges implied by positions and radii".into(),
            ));
        }
    }
    Ok((pts, g))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<(TorusPointSet, DiGraph)> {
    graph_from_str(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeListFormat {
    Tsv,
    Csv,
}

impl EdgeListFormat {
    fn delimiter(self) -> u8 {
        match self {
            EdgeListFormat::Tsv => b'\t',
            EdgeListFormat::Csv => b',',
        }
    }

    /// `.csv` is comma separated; anything else is read as TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => EdgeListFormat::Csv,
            _ => EdgeListFormat::Tsv,
        }
    }
}

/// An ingested network: `edges[i] = (s, t)` means `labels[s] ↝ labels[t]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledEdgeList {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

impl LabeledEdgeList {
    /// Builds from labeled pairs, interning labels in first-appearance order.
    /// Self-loops and repeats are dropped and counted; a label seen only on a
    /// self-loop does not become a vertex.
    pub fn from_pairs<S: AsRef<str>>(pairs: impl IntoIterator<Item = (S, S)>) -> Self {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut seen = std::collections::HashSet::new();
        let mut out = LabeledEdgeList::default();
        for (s, t) in pairs {
            let (s, t) = (s.as_ref(), t.as_ref());
            if s == t {
                out.self_loops_dropped += 1;
                continue;
            }
            let mut intern = |l: &str| {
                *index.entry(l.to_owned()).or_insert_with(|| {
                    out.labels.push(l.to_owned());
                    out.labels.len() - 1
                })
            };
            let e = (intern(s), intern(t));
            if seen.insert(e) {
                out.edges.push(e);
            } else {
                out.duplicates_collapsed += 1;
            }
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn to_digraph(&self) -> DiGraph {
        DiGraph::from_edges(self.labels.len(), self.edges.iter().copied())
            .expect("ingested edges are in range, loop-free and distinct")
    }

    /// Every edge flipped.
    pub fn reversed(&self) -> Self {
        LabeledEdgeList { edges: self.edges.iter().map(|&(s, t)| (t, s)).collect(), ..self.clone() }
    }

    /// Attaches labels and reading-order edges to an existing graph (`"0"`, `"1"`, ...).
    pub fn from_digraph(g: &DiGraph) -> Self {
        LabeledEdgeList {
            labels: (0..g.vertex_count()).map(|i| i.to_string()).collect(),
            edges: g.edges().collect(),
            ..Default::default()
        }
    }
}

pub fn edge_list_from_reader(reader: impl std::io::Read, format: EdgeListFormat) -> Result<LabeledEdgeList> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut pairs = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| DrggError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 || rec[0].is_empty() || rec[1].is_empty() {
            return Err(DrggError::Parse {
                line,
                message: format!("expected \"source<sep>target\", found {} field(s)", rec.len()),
            });
        }
        pairs.push((rec[0].to_owned(), rec[1].to_owned()));
    }
    if pairs.is_empty() {
        return Err(DrggError::EmptyInput("edge list contains no edges".into()));
    }
    Ok(LabeledEdgeList::from_pairs(pairs))
}

pub fn read_edge_list(path: impl AsRef<Path>, format: EdgeListFormat) -> Result<LabeledEdgeList> {
    edge_list_from_reader(fs::File::open(path)?, format)
}

pub fn write_edge_list(list: &LabeledEdgeList, path: impl AsRef<Path>, format: EdgeListFormat) -> Result<()> {
    let mut w =
        csv::WriterBuilder::new().delimiter(format.delimiter()).has_headers(false).from_path(path).map_err(csv_io)?;
    for &(s, t) in &list.edges {
        w.write_record([&list.labels[s], &list.labels[t]]).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> DrggError {
    DrggError::Io(std::io::Error::other(e))
}

/// Pretty JSON with the struct's field order and a trailing newline.
pub fn report_to_string<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| DrggError::invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_report<T: Serialize>(report: &T, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, report_to_string(report)?)?;
    Ok(())
}
