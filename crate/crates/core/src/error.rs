use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid node label {0:?}: labels must be non-empty and free of whitespace and `,;|`")]
    InvalidLabel(String),
    #[error("duplicate node {0}")]
    DuplicateNode(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("self-loop on node {0}")]
    SelfLoop(String),
    #[error("duplicate edge {tail} -> {head}")]
    DuplicateEdge { tail: String, head: String },
    #[error("edge {tail} -> {head} closes a directed cycle")]
    Cycle { tail: String, head: String },
    #[error("{0} is not a topological order of the graph")]
    InvalidOrder(String),
    #[error("query sets are not pairwise disjoint (node {0} appears twice)")]
    NotDisjoint(String),
    #[error("query set {0} must not be empty")]
    EmptySet(&'static str),
    #[error("graph has {actual} nodes, limit is {limit}")]
    SizeLimit { limit: usize, actual: usize },
    #[error("unknown cluster {0}")]
    UnknownCluster(String),
    #[error("cannot contract a cluster with itself ({0})")]
    SameCluster(String),
    #[error("contracting {a} and {b} would create a directed cycle")]
    ContractionCycle { a: String, b: String },
    #[error("pair ({a}, {b}) is not a valid contraction")]
    InvalidPair { a: String, b: String },
    #[error("node universes differ: {0}")]
    UniverseMismatch(String),
    #[error("invalid summary: {0}")]
    InvalidSummary(String),
    #[error("k = {k} is infeasible for a graph with {n} nodes")]
    InfeasibleK { k: usize, n: usize },
    #[error("no valid pair left to contract at {clusters} clusters (target k = {k})")]
    Stuck { clusters: usize, k: usize },
    #[error("invalid similarity matrix: {0}")]
    InvalidSimilarity(String),
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("infeasible perturbation: {0}")]
    InfeasiblePerturbation(String),
}
