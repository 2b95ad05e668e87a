//! Reference graphs and summaries used by the tests and shipped as JSON
//! under `fixtures/`.

use cagres_core::{Dag, SummaryDag};

fn five(edges: &[(&str, &str)]) -> Dag {
    Dag::new(["A", "B", "C", "D", "E"], edges.iter().copied()).expect("fixture is a DAG")
}

pub fn g1() -> Dag {
    five(&[("A", "B"), ("A", "C"), ("B", "D"), ("C", "D"), ("D", "E")])
}

pub fn g2() -> Dag {
    five(&[("A", "B"), ("C", "B"), ("C", "D"), ("D", "E")])
}

pub fn g3() -> Dag {
    five(&[("A", "D"), ("C", "D"), ("B", "D"), ("D", "E")])
}

fn partition(g: &Dag, blocks: &[&[&str]]) -> SummaryDag {
    let blocks: Vec<Vec<&str>> = blocks.iter().map(|b| b.to_vec()).collect();
    SummaryDag::from_partition(g, &blocks).expect("fixture partition is a summary")
}

/// `{A}, {B,C}, {D}, {E}` over G1.
pub fn h1() -> SummaryDag {
    partition(&g1(), &[&["A"], &["B", "C"], &["D"], &["E"]])
}

/// `{A}, {B,D}, {C}, {E}` over G1.
pub fn h2() -> SummaryDag {
    partition(&g1(), &[&["A"], &["B", "D"], &["C"], &["E"]])
}

/// `{A,B,C}, {D}, {E}` over G1.
pub fn h3() -> SummaryDag {
    partition(&g1(), &[&["A", "B", "C"], &["D"], &["E"]])
}

/// `{A}, {B,C}, {D,E}` over G1.
pub fn h4() -> SummaryDag {
    partition(&g1(), &[&["A"], &["B", "C"], &["D", "E"]])
}

/// Canonical DAG of [`h3`] under the order A, B, C, D, E.
pub fn h3_canonical() -> Dag {
    five(&[
        ("A", "B"),
        ("A", "C"),
        ("B", "C"),
        ("A", "D"),
        ("B", "D"),
        ("C", "D"),
        ("D", "E"),
    ])
}

pub const REDSHIFT_NODES: [&str; 12] = [
    "QueryTemplate",
    "ReturnedRows",
    "ReturnedBytes",
    "NumJoins",
    "NumTables",
    "NumColumns",
    "ResultCacheHit",
    "CompileTime",
    "PlanTime",
    "LockWaitTime",
    "ExecTime",
    "ElapsedTime",
];

const REDSHIFT_EDGES: [(&str, &str); 23] = [
    ("QueryTemplate", "ReturnedRows"),
    ("QueryTemplate", "ReturnedBytes"),
    ("QueryTemplate", "NumTables"),
    ("QueryTemplate", "NumColumns"),
    ("QueryTemplate", "NumJoins"),
    ("QueryTemplate", "ResultCacheHit"),
    ("ReturnedRows", "ReturnedBytes"),
    ("NumTables", "PlanTime"),
    ("NumTables", "LockWaitTime"),
    ("NumTables", "ExecTime"),
    ("NumJoins", "PlanTime"),
    ("NumJoins", "LockWaitTime"),
    ("NumJoins", "ExecTime"),
    ("NumColumns", "ExecTime"),
    ("NumColumns", "ReturnedBytes"),
    ("ResultCacheHit", "CompileTime"),
    ("ResultCacheHit", "PlanTime"),
    ("ResultCacheHit", "ExecTime"),
    ("ResultCacheHit", "LockWaitTime"),
    ("CompileTime", "ElapsedTime"),
    ("PlanTime", "ElapsedTime"),
    ("ExecTime", "ElapsedTime"),
    ("LockWaitTime", "ElapsedTime"),
];

/// Query performance DAG of a serverless data warehouse: 12 variables,
/// 23 edges.
pub fn redshift() -> Dag {
    Dag::new(REDSHIFT_NODES, REDSHIFT_EDGES).expect("fixture is a DAG")
}

/// [`redshift`] without ResultCacheHit -> LockWaitTime.
pub fn redshift_missing() -> Dag {
    redshift().filter_edges(|t, h| {
        !(REDSHIFT_NODES[t] == "ResultCacheHit" && REDSHIFT_NODES[h] == "LockWaitTime")
    })
}

/// [`redshift`] with five extraneous edges.
pub fn redshift_additions() -> Dag {
    let extra = [
        ("LockWaitTime", "ReturnedRows"),
        ("NumColumns", "LockWaitTime"),
        ("NumColumns", "PlanTime"),
        ("ReturnedBytes", "ExecTime"),
        ("ReturnedBytes", "ElapsedTime"),
    ];
    Dag::new(REDSHIFT_NODES, REDSHIFT_EDGES.iter().chain(&extra).copied())
        .expect("fixture is a DAG")
}

/// The published five-cluster summary of [`redshift`].
pub fn redshift_reference_summary() -> SummaryDag {
    partition(
        &redshift(),
        &[
            &[
                "QueryTemplate",
                "ReturnedRows",
                "ReturnedBytes",
                "NumColumns",
            ],
            &["NumJoins", "NumTables"],
            &["ResultCacheHit", "ExecTime"],
            &["PlanTime", "LockWaitTime"],
            &["CompileTime", "ElapsedTime"],
        ],
    )
}

/// Either kind of shipped fixture.
pub enum Fixture {
    Graph(Dag),
    Summary(SummaryDag),
}

/// Every fixture with its file stem under `fixtures/`.
pub fn all() -> Vec<(&'static str, Fixture)> {
    use Fixture::{Graph, Summary};
    vec![
        ("g1", Graph(g1())),
        ("g2", Graph(g2())),
        ("g3", Graph(g3())),
        ("h1", Summary(h1())),
        ("h2", Summary(h2())),
        ("h3", Summary(h3())),
        ("h4", Summary(h4())),
        ("h3_canonical", Graph(h3_canonical())),
        ("redshift", Graph(redshift())),
        ("redshift_missing", Graph(redshift_missing())),
        ("redshift_additions", Graph(redshift_additions())),
        (
            "redshift_reference_summary",
            Summary(redshift_reference_summary()),
        ),
    ]
}
