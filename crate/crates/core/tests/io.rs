use drgg::io::{
    graph_from_str, graph_to_string, read_edge_list, read_graph, write_edge_list, write_graph, EdgeListFormat,
    LabeledEdgeList,
};
use drgg::{generate, DrggError, ModelParams};

#[test]
fn graph_files_round_trip_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    for params in [ModelParams::new(700, 5.5, 2, 3), ModelParams::fixed_radius(700, 3, 4)] {
        let (pts, g) = generate(&params).unwrap();
        let path = dir.path().join("g.json");
        write_graph(&pts, Some(&g), &path).unwrap();
        let (pts2, g2) = read_graph(&path).unwrap();
        assert_eq!((&pts, &g), (&pts2, &g2));
        assert_eq!(graph_to_string(&pts2, Some(&g2)), std::fs::read_to_string(&path).unwrap());

        // edges are rebuilt from positions when omitted
        let bare = graph_to_string(&pts, None);
        assert_eq!(graph_from_str(&bare).unwrap().1, g);
    }
}

#[test]
fn a_dropped_edge_fails_the_integrity_check() {
    let (pts, g) = generate(&ModelParams::new(300, 8.0, 3, 1)).unwrap();
    let text = graph_to_string(&pts, Some(&g));
    let cut = text.rfind('[').unwrap();
    let mut broken = text[..cut].trim_end().trim_end_matches(',').to_owned();
    broken.push_str("\n  ]\n}\n");
    assert!(matches!(graph_from_str(&broken), Err(DrggError::Integrity(_))), "{:?}", graph_from_str(&broken).err());
}

#[test]
fn edge_lists_round_trip_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let list = LabeledEdgeList::from_pairs([("a", "b"), ("b", "c"), ("c", "a"), ("a", "b"), ("d", "d"), ("x y", "a")]);
    assert_eq!(list.duplicates_collapsed, 1);
    assert_eq!(list.self_loops_dropped, 1);
    assert_eq!(list.labels, ["a", "b", "c", "x y"]);
    for (name, fmt) in [("l.tsv", EdgeListFormat::Tsv), ("l.csv", EdgeListFormat::Csv)] {
        let path = dir.path().join(name);
        write_edge_list(&list, &path, fmt).unwrap();
        let back = read_edge_list(&path, EdgeListFormat::from_path(&path)).unwrap();
        assert_eq!(back.labels, list.labels);
        assert_eq!(back.edges, list.edges);
    }
}

#[test]
fn empty_and_malformed_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.tsv");
    std::fs::write(&path, "# nothing here\n").unwrap();
    assert!(matches!(read_edge_list(&path, EdgeListFormat::Tsv), Err(DrggError::EmptyInput(_))));
    std::fs::write(&path, "a\tb\nlonely\n").unwrap();
    assert!(matches!(read_edge_list(&path, EdgeListFormat::Tsv), Err(DrggError::Parse { line: 2, .. })));
}
