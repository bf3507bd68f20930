use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn drgg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drgg")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = drgg(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_writes_a_valid_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let tsv = dir.path().join("g.tsv");
    let out = drgg(&[
        "generate",
        "--n",
        "1000",
        "--alpha",
        "8",
        "--dim",
        "3",
        "--seed",
        "7",
        "--out",
        p(&g),
        "--edges-out",
        p(&tsv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (pts, graph) = drgg::io::read_graph(&g).unwrap();
    assert_eq!(pts.len(), 1000);
    let list = drgg::io::read_edge_list(&tsv, drgg::io::EdgeListFormat::Tsv).unwrap();
    assert_eq!(list.edges.len(), graph.edge_count());

    // same flags, same bytes
    let g2 = dir.path().join("g2.json");
    drgg(&["generate", "--n", "1000", "--alpha", "8", "--dim", "3", "--seed", "7", "--out", p(&g2)]);
    assert_eq!(std::fs::read(&g).unwrap(), std::fs::read(&g2).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    // r0 >= 1/2
    assert_eq!(drgg(&["generate", "--n", "3", "--alpha", "8", "--dim", "4", "--out", p(&g)]).status.code(), Some(3));
    let out = drgg(&["generate", "--n", "3", "--alpha", "8", "--dim", "4", "--out", p(&g)]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("n >= 6"));
    // alpha <= d + 1
    assert_eq!(drgg(&["generate", "--n", "100", "--alpha", "3", "--dim", "3", "--out", p(&g)]).status.code(), Some(2));
    assert_eq!(drgg(&["generate", "--alpha", "8", "--dim", "3", "--out", p(&g)]).status.code(), Some(2));
    assert_eq!(drgg(&["stats"]).status.code(), Some(2));
    assert_eq!(drgg(&["bogus"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(drgg(&["stats", "--graph", p(&missing)]).status.code(), Some(1));
}

#[test]
fn fixed_radius_graphs_are_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("rgg.json");
    assert!(drgg(&["generate", "--n", "2000", "--dim", "2", "--fixed-radius", "--seed", "3", "--out", p(&g)])
        .status
        .success());
    let r = ok_json(&["stats", "--graph", p(&g)]);
    assert_eq!(r["reciprocity"].as_f64(), Some(1.0));
}

#[test]
fn stats_on_the_star_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("star.tsv");
    std::fs::write(&e, "B\tA\nC\tA\nB\tC\n").unwrap();
    let r = ok_json(&["stats", "--edges", p(&e)]);
    assert_eq!(r["edge_count"], 3);
    assert_eq!(r["clustering_in_excl"].as_f64(), Some(0.5));
    assert_eq!(r["hubs"][0]["label"], "A");
    assert_eq!(r["in_hist"], serde_json::json!([[0, 1], [1, 1], [2, 1]]));
}

#[test]
fn undirected_paths_on_a_desk_size_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert!(drgg(&[
        "generate",
        "--n",
        "10000",
        "--alpha",
        "8",
        "--dim",
        "3",
        "--seed",
        "1",
        "--no-edges",
        "--out",
        p(&g)
    ])
    .status
    .success());
    let r = ok_json(&["stats", "--graph", p(&g), "--undirected"]);
    let paths = &r["paths"];
    assert_eq!(paths["mode"], "undirected_projection");
    assert!(paths["diameter"].as_u64().unwrap() > 0);
    assert!(paths["avg_path_length"].as_f64().unwrap().is_finite());
    let sampled = ok_json(&["stats", "--graph", p(&g), "--undirected", "--sample-paths", "64"]);
    assert_eq!(sampled["paths"]["exact"], false);
    assert_eq!(sampled["paths"]["sources"], 64);
}

#[test]
fn hubs_match_a_brute_force_sort() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("net.csv");
    // deterministic pseudo-random labeled network
    let mut lines = String::from("# source,target\n");
    let mut x: u64 = 12345;
    let mut pairs = Vec::new();
    for _ in 0..3000 {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let s = (x >> 33) % 400;
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let t = ((x >> 33) % 400).min((x >> 40) % 400);
        lines.push_str(&format!("w{s},w{t}\n"));
        pairs.push((format!("w{s}"), format!("w{t}")));
    }
    std::fs::write(&e, lines).unwrap();
    let r = ok_json(&["stats", "--edges", p(&e), "--whole", "--hubs", "15"]);

    let mut edges: Vec<(String, String)> = pairs.into_iter().filter(|(s, t)| s != t).collect();
    edges.sort();
    edges.dedup();
    let mut indeg = std::collections::HashMap::<String, usize>::new();
    let mut order = Vec::new();
    for (s, t) in &edges {
        for l in [s, t] {
            if !indeg.contains_key(l) {
                order.push(l.clone());
                indeg.insert(l.clone(), 0);
            }
        }
    }
    for (_, t) in &edges {
        *indeg.get_mut(t).unwrap() += 1;
    }
    let mut expected: Vec<(usize, String)> = indeg.into_iter().map(|(l, d)| (d, l)).collect();
    expected.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let got: Vec<(usize, String)> = r["hubs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| (h["indegree"].as_u64().unwrap() as usize, h["label"].as_str().unwrap().to_owned()))
        .collect();
    // ranks by indegree; equal indegrees may come in either label order
    let degrees: Vec<usize> = got.iter().map(|h| h.0).collect();
    assert_eq!(degrees, expected.iter().take(15).map(|h| h.0).collect::<Vec<_>>());
    let cutoff = *degrees.last().unwrap();
    for (d, l) in &got {
        assert!(expected.contains(&(*d, l.clone())));
        assert!(*d >= cutoff);
    }
}

#[test]
fn theory_reports() {
    let r = ok_json(&["theory", "--n", "10000", "--alpha", "8", "--dim", "3"]);
    assert!((r["clustering_constant"].as_f64().unwrap() - 0.648111).abs() < 1e-6);
    assert!((r["reciprocity_limit"].as_f64().unwrap() - 8.0 / 11.0).abs() < 1e-15);
    assert_eq!(r["expected_paths"].as_object().unwrap().len(), 20);
    let even = ok_json(&["theory", "--n", "10000", "--alpha", "8", "--dim", "2"]);
    assert!(even["clustering_constant"].is_null());
    assert!(even["clustering_note"].as_str().unwrap().contains("not available"));
    assert!(even["clustering_constant_monte_carlo"].as_f64().unwrap() > 0.0);
    assert_eq!(drgg(&["theory", "--n", "100", "--alpha", "2", "--dim", "3"]).status.code(), Some(2));
}

#[test]
fn fit_round_trip_and_rgg_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert!(drgg(&[
        "generate",
        "--n",
        "50000",
        "--alpha",
        "8",
        "--dim",
        "3",
        "--seed",
        "5",
        "--no-edges",
        "--out",
        p(&g)
    ])
    .status
    .success());
    let f = ok_json(&["fit", "--graph", p(&g), "--dim", "3"]);
    let alpha = f["alpha_hat"].as_f64().unwrap();
    assert!((alpha - 8.0).abs() < 1.0, "{f}");
    assert_eq!(f["method"], "mle_tail");

    let rgg = dir.path().join("rgg.json");
    assert!(drgg(&["generate", "--n", "10000", "--dim", "3", "--fixed-radius", "--out", p(&rgg)]).status.success());
    let out = drgg(&["fit", "--graph", p(&rgg), "--dim", "3"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn experiment_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    let series = dir.path().join("series");
    std::fs::write(
        &cfg,
        format!(
            "trials = 2\nseed_base = 4\n\n[outputs]\nseries_dir = {:?}\n\n[[runs]]\nn = 500\nalpha = 8\nd = 3\n\n[[runs]]\nn = 3\nalpha = 8\nd = 4\n",
            p(&series)
        ),
    )
    .unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let out = drgg(&["experiment", "--config", p(&cfg), "--summary", p(&a)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
    drgg(&["experiment", "--config", p(&cfg), "--summary", p(&b)]);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 2);
    assert!(series.join("degree_n500_alpha8_d3.csv").exists());
}

#[test]
fn compare_reports_deviations() {
    let r = ok_json(&["compare", "--n", "2000", "--alpha", "8", "--dim", "3", "--seed", "2"]);
    assert!(r["edge_count"]["deviation_pct"].as_f64().unwrap().abs() < 10.0);
    assert!(r["reciprocity"]["predicted"].as_f64().is_some());
}
