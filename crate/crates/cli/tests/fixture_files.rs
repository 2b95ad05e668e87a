//! The JSON files under `fixtures/` must match the in-code fixtures. Run
//! with `CAGRES_BLESS=1` to rewrite them.

use std::path::PathBuf;

use cagres::fixtures::{self, Fixture};
use cagres::io::{graph_json, load_dag, load_document, summary_json, write_dot, Document};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn expected() -> Vec<(String, String)> {
    let mut files = Vec::new();
    for (stem, f) in fixtures::all() {
        let text = match &f {
            Fixture::Graph(g) => graph_json(g),
            Fixture::Summary(h) => summary_json(h).unwrap(),
        };
        files.push((format!("{stem}.json"), text));
    }
    files.push(("g1.dot".into(), write_dot(&fixtures::g1())));
    files.push(("redshift.dot".into(), write_dot(&fixtures::redshift())));
    files
}

#[test]
fn fixture_files_are_current() {
    let bless = std::env::var_os("CAGRES_BLESS").is_some();
    for (name, text) in expected() {
        let path = dir().join(&name);
        if bless {
            std::fs::write(&path, &text).unwrap();
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_default();
        assert_eq!(on_disk, text, "{name} is stale; rerun with CAGRES_BLESS=1");
    }
}

#[test]
fn fixture_files_load_back() {
    for (stem, f) in fixtures::all() {
        let loaded = load_document(dir().join(format!("{stem}.json"))).unwrap();
        match (f, loaded) {
            (Fixture::Graph(g), Document::Graph(back)) => assert_eq!(back, g, "{stem}"),
            (Fixture::Summary(h), Document::Summary(back)) => assert_eq!(back, h, "{stem}"),
            _ => panic!("{stem} changed kind"),
        }
    }
    let r = load_dag(dir().join("redshift.dot")).unwrap();
    assert_eq!((r.node_count(), r.edge_count()), (12, 23));
    assert_eq!(load_dag(dir().join("g1.dot")).unwrap(), fixtures::g1());
}
