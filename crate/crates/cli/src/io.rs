//! JSON documents, the DOT subset, similarity matrices and CSV reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cagres_core::{Dag, NodeId, SummaryDag};
use serde::{Deserialize, Serialize};

pub use cagres_core::greedy::SimilarityMatrix;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unsupported document version {0}")]
    Version(u32),
    #[error("unsupported file extension for {0} (expected .json or .dot)")]
    Extension(String),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] cagres_core::Error),
}

pub type IoResult<T> = Result<T, IoError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub version: u32,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl GraphDocument {
    pub fn from_dag(g: &Dag) -> Self {
        GraphDocument {
            version: FORMAT_VERSION,
            nodes: g.nodes().iter().map(|n| n.to_string()).collect(),
            edges: g
                .edges()
                .map(|(t, h)| (t.to_string(), h.to_string()))
                .collect(),
        }
    }

    pub fn to_dag(&self) -> IoResult<Dag> {
        if self.version != FORMAT_VERSION {
            return Err(IoError::Version(self.version));
        }
        Ok(Dag::new(
            &self.nodes,
            self.edges.iter().map(|(t, h)| (t, h)),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryDocument {
    pub version: u32,
    pub base: GraphDocument,
    pub base_order: Vec<String>,
    pub clusters: BTreeMap<String, Vec<String>>,
    pub edges: Vec<(String, String)>,
}

impl SummaryDocument {
    pub fn from_summary(h: &SummaryDag) -> IoResult<Self> {
        if h.is_mutilated() {
            return Err(IoError::Format(
                "mutilated summaries are not serializable".into(),
            ));
        }
        Ok(SummaryDocument {
            version: FORMAT_VERSION,
            base: GraphDocument::from_dag(h.base()),
            base_order: h.base_order().iter().map(|n| n.to_string()).collect(),
            clusters: h
                .clusters()
                .into_iter()
                .map(|(l, m)| (l.to_string(), m.iter().map(|n| n.to_string()).collect()))
                .collect(),
            edges: h
                .quotient()
                .edges()
                .map(|(t, h)| (t.to_string(), h.to_string()))
                .collect(),
        })
    }

    pub fn to_summary(&self) -> IoResult<SummaryDag> {
        if self.version != FORMAT_VERSION {
            return Err(IoError::Version(self.version));
        }
        let base = self.base.to_dag()?;
        let order: Vec<NodeId> = self.base_order.iter().map(NodeId::from).collect();
        let clusters: Vec<(NodeId, Vec<NodeId>)> = self
            .clusters
            .iter()
            .map(|(l, m)| {
                (
                    NodeId::from(l.as_str()),
                    m.iter().map(NodeId::from).collect(),
                )
            })
            .collect();
        let edges: Vec<(NodeId, NodeId)> = self
            .edges
            .iter()
            .map(|(t, h)| (NodeId::from(t.as_str()), NodeId::from(h.as_str())))
            .collect();
        Ok(SummaryDag::from_parts(base, &order, &clusters, &edges)?)
    }
}

/// A loaded `--in` file: plain graph or summary.
#[derive(Debug, Clone)]
pub enum Document {
    Graph(Dag),
    Summary(SummaryDag),
}

fn read(path: &Path) -> IoResult<String> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> IoResult<()> {
    fs::write(path, contents).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

enum Ext {
    Json,
    Dot,
}

fn extension(path: &Path) -> IoResult<Ext> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => Ok(Ext::Json),
        Some(e) if e.eq_ignore_ascii_case("dot") || e.eq_ignore_ascii_case("gv") => Ok(Ext::Dot),
        _ => Err(IoError::Extension(path.display().to_string())),
    }
}

fn to_json<T: Serialize>(value: &T) -> IoResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn load_dag(path: impl AsRef<Path>) -> IoResult<Dag> {
    match load_document(path)? {
        Document::Graph(g) => Ok(g),
        Document::Summary(_) => Err(IoError::Format("expected a graph, found a summary".into())),
    }
}

pub fn save_dag(g: &Dag, path: impl AsRef<Path>) -> IoResult<()> {
    let path = path.as_ref();
    let text = match extension(path)? {
        Ext::Json => to_json(&GraphDocument::from_dag(g))?,
        Ext::Dot => write_dot(g),
    };
    write(path, &text)
}

pub fn load_summary(path: impl AsRef<Path>) -> IoResult<SummaryDag> {
    match load_document(path)? {
        Document::Summary(h) => Ok(h),
        Document::Graph(_) => Err(IoError::Format("expected a summary, found a graph".into())),
    }
}

/// `.json` writes a summary document, `.dot` the cluster-level drawing.
pub fn save_summary(h: &SummaryDag, path: impl AsRef<Path>) -> IoResult<()> {
    let path = path.as_ref();
    let text = match extension(path)? {
        Ext::Json => to_json(&SummaryDocument::from_summary(h)?)?,
        Ext::Dot => write_summary_dot(h),
    };
    write(path, &text)
}

pub fn export_summary_dot(h: &SummaryDag, path: impl AsRef<Path>) -> IoResult<()> {
    write(path.as_ref(), &write_summary_dot(h))
}

/// Graph or summary, told apart by the JSON shape. DOT files are graphs.
pub fn load_document(path: impl AsRef<Path>) -> IoResult<Document> {
    let path = path.as_ref();
    let text = read(path)?;
    match extension(path)? {
        Ext::Dot => Ok(Document::Graph(parse_dot(&text)?)),
        Ext::Json => parse_json_document(&text),
    }
}

pub fn parse_json_document(text: &str) -> IoResult<Document> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("clusters").is_some() {
        let doc: SummaryDocument = serde_json::from_value(value)?;
        Ok(Document::Summary(doc.to_summary()?))
    } else {
        let doc: GraphDocument = serde_json::from_value(value)?;
        Ok(Document::Graph(doc.to_dag()?))
    }
}

pub fn graph_json(g: &Dag) -> String {
    to_json(&GraphDocument::from_dag(g)).expect("graph documents serialize")
}

pub fn summary_json(h: &SummaryDag) -> IoResult<String> {
    to_json(&SummaryDocument::from_summary(h)?)
}

// ---------------------------------------------------------------- DOT

fn dot_id(id: &str) -> String {
    let bare = !id.is_empty()
        && !id.starts_with(|c: char| c.is_ascii_digit())
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(
            id.to_ascii_lowercase().as_str(),
            "node" | "edge" | "graph" | "digraph" | "subgraph" | "strict"
        );
    if bare {
        id.to_string()
    } else {
        format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// Every node is declared before the edges so isolated nodes and node order
/// survive a round trip.
pub fn write_dot(g: &Dag) -> String {
    let mut s = String::from("digraph {\n");
    for n in g.nodes() {
        let _ = writeln!(s, "  {};", dot_id(n.as_str()));
    }
    for (t, h) in g.edges() {
        let _ = writeln!(s, "  {} -> {};", dot_id(t.as_str()), dot_id(h.as_str()));
    }
    s.push_str("}\n");
    s
}

pub fn write_summary_dot(h: &SummaryDag) -> String {
    let mut s = String::from("digraph {\n");
    for (label, members) in h.clusters() {
        let list: Vec<&str> = members.iter().map(NodeId::as_str).collect();
        let _ = writeln!(
            s,
            "  {} [label={}];",
            dot_id(label.as_str()),
            dot_id_quoted(&list.join(","))
        );
    }
    for (t, hd) in h.quotient().edges() {
        let _ = writeln!(s, "  {} -> {};", dot_id(t.as_str()), dot_id(hd.as_str()));
    }
    s.push_str("}\n");
    s
}

fn dot_id_quoted(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    /// Quoted identifier; never a keyword.
    Quoted(String),
    Arrow,
    Undirected,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Equals,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> IoError {
        IoError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> IoResult<Vec<(Tok, usize, usize)>> {
        let mut out = Vec::new();
        let mut line_start = true;
        while let Some(&c) = self.chars.peek() {
            let (line, column) = (self.line, self.column);
            if c == '\n' {
                self.bump();
                line_start = true;
                continue;
            }
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '#' && line_start {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
                continue;
            }
            line_start = false;
            if c == '/' {
                self.bump();
                match self.chars.peek() {
                    Some('/') => {
                        while self.chars.peek().is_some_and(|&c| c != '\n') {
                            self.bump();
                        }
                    }
                    Some('*') => {
                        self.bump();
                        let mut prev = ' ';
                        loop {
                            match self.bump() {
                                Some('/') if prev == '*' => break,
                                Some(c) => prev = c,
                                None => return Err(self.err(line, column, "unterminated comment")),
                            }
                        }
                    }
                    _ => return Err(self.err(line, column, "unexpected '/'")),
                }
                continue;
            }
            let tok = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '=' => Tok::Equals,
                '-' => {
                    self.bump();
                    match self.chars.peek() {
                        Some('>') => {
                            self.bump();
                            out.push((Tok::Arrow, line, column));
                            continue;
                        }
                        Some('-') => {
                            self.bump();
                            out.push((Tok::Undirected, line, column));
                            continue;
                        }
                        Some(d) if d.is_ascii_digit() || *d == '.' => {
                            let mut s = String::from("-");
                            while let Some(&d) = self.chars.peek() {
                                if d.is_ascii_digit() || d == '.' {
                                    s.push(d);
                                    self.bump();
                                } else {
                                    break;
                                }
                            }
                            out.push((Tok::Id(s), line, column));
                            continue;
                        }
                        _ => return Err(self.err(line, column, "expected '->'")),
                    }
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('\\') => match self.bump() {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('\n') => {}
                                Some(o) => {
                                    s.push('\\');
                                    s.push(o);
                                }
                                None => return Err(self.err(line, column, "unterminated string")),
                            },
                            Some('"') => break,
                            Some(o) => s.push(o),
                            None => return Err(self.err(line, column, "unterminated string")),
                        }
                    }
                    out.push((Tok::Quoted(s), line, column));
                    continue;
                }
                c if c.is_alphanumeric() || c == '_' || c == '.' => {
                    let mut s = String::new();
                    while let Some(&d) = self.chars.peek() {
                        if d.is_alphanumeric() || d == '_' || d == '.' {
                            s.push(d);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    out.push((Tok::Id(s), line, column));
                    continue;
                }
                other => {
                    return Err(self.err(line, column, format!("unexpected character {other:?}")))
                }
            };
            self.bump();
            out.push((tok, line, column));
        }
        Ok(out)
    }
}

/// Parses `digraph [name] { stmt* }` where a statement is a node `a`, an
/// edge `a -> b`, or a `graph`/`node`/`edge` attribute default. Attribute
/// lists are accepted and ignored; semicolons are optional.
pub fn parse_dot(text: &str) -> IoResult<Dag> {
    let lexer = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let toks = lexer.tokens()?;
    let end = {
        let (line, column) = text
            .lines()
            .enumerate()
            .last()
            .map_or((1, 1), |(i, l)| (i + 1, l.chars().count() + 1));
        (line, column)
    };
    let mut p = DotParser { toks, at: 0, end };
    p.graph()
}

struct DotParser {
    toks: Vec<(Tok, usize, usize)>,
    at: usize,
    end: (usize, usize),
}

impl DotParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.at).map_or(self.end, |t| (t.1, t.2))
    }

    fn fail<T>(&self, message: impl Into<String>) -> IoResult<T> {
        let (line, column) = self.here();
        Err(IoError::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn id(&mut self) -> IoResult<String> {
        match self.peek() {
            Some(Tok::Id(s) | Tok::Quoted(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.fail("expected an identifier"),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> IoResult<()> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case(word))
    }

    fn graph(&mut self) -> IoResult<Dag> {
        if self.keyword("strict") {
            self.at += 1;
        }
        if !self.keyword("digraph") {
            return self.fail("expected 'digraph'");
        }
        self.at += 1;
        if matches!(self.peek(), Some(Tok::Id(_) | Tok::Quoted(_))) {
            self.at += 1;
        }
        self.expect(Tok::LBrace, "'{'")?;
        let mut nodes: Vec<String> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut edges: Vec<(String, String, usize, usize)> = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.at += 1;
                    break;
                }
                Some(Tok::Semi) => {
                    self.at += 1;
                    continue;
                }
                None => return self.fail("expected '}'"),
                _ => {}
            }
            if self.keyword("graph") || self.keyword("node") || self.keyword("edge") {
                self.at += 1;
                self.attributes()?;
                continue;
            }
            if self.keyword("subgraph") {
                return self.fail("subgraphs are not supported");
            }
            let (line, column) = self.here();
            let tail = self.id()?;
            if self.peek() == Some(&Tok::Equals) {
                // Graph attribute `name = value`.
                self.at += 1;
                self.id()?;
                continue;
            }
            if seen.insert(tail.clone()) {
                nodes.push(tail.clone());
            }
            match self.peek() {
                Some(Tok::Arrow) => {
                    self.at += 1;
                    let head = self.id()?;
                    if seen.insert(head.clone()) {
                        nodes.push(head.clone());
                    }
                    if self.peek() == Some(&Tok::Arrow) {
                        return self.fail("one edge per statement");
                    }
                    edges.push((tail, head, line, column));
                }
                Some(Tok::Undirected) => {
                    return self.fail("undirected edges are not allowed in a digraph")
                }
                _ => {}
            }
            self.attributes()?;
        }
        if self.at != self.toks.len() {
            return self.fail("unexpected content after the graph");
        }
        let pairs: Vec<(&str, &str)> = edges
            .iter()
            .map(|(t, h, _, _)| (t.as_str(), h.as_str()))
            .collect();
        Dag::new(&nodes, pairs).map_err(|e| {
            // Point at the offending edge statement when there is one.
            let located = match &e {
                cagres_core::Error::Cycle { tail, head }
                | cagres_core::Error::DuplicateEdge { tail, head } => edges
                    .iter()
                    .rev()
                    .find(|(t, h, _, _)| t == tail && h == head)
                    .map(|&(_, _, l, c)| (l, c)),
                cagres_core::Error::SelfLoop(v) => edges
                    .iter()
                    .find(|(t, h, _, _)| t == v && h == v)
                    .map(|&(_, _, l, c)| (l, c)),
                _ => None,
            };
            match located {
                Some((line, column)) => IoError::Parse {
                    line,
                    column,
                    message: e.to_string(),
                },
                None => IoError::Core(e),
            }
        })
    }

    fn attributes(&mut self) -> IoResult<()> {
        while self.peek() == Some(&Tok::LBracket) {
            self.at += 1;
            loop {
                match self.peek() {
                    Some(Tok::RBracket) => {
                        self.at += 1;
                        break;
                    }
                    Some(Tok::Comma) | Some(Tok::Semi) => self.at += 1,
                    Some(Tok::Id(_) | Tok::Quoted(_)) => {
                        self.at += 1;
                        self.expect(Tok::Equals, "'='")?;
                        self.id()?;
                    }
                    _ => return self.fail("malformed attribute list"),
                }
            }
        }
        Ok(())
    }
}

// ------------------------------------------------------- similarity, CSV

/// Square CSV: the first row holds an empty cell and the column labels,
/// each following row a label and its values.
pub fn parse_similarity(text: &str, tau: f64) -> IoResult<SimilarityMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();
    let header = rows
        .next()
        .ok_or_else(|| IoError::Format("similarity file is empty".into()))??;
    let labels: Vec<NodeId> = header.iter().skip(1).map(NodeId::from).collect();
    let mut values = vec![Vec::new(); labels.len()];
    let mut filled = vec![false; labels.len()];
    for (r, rec) in rows.enumerate() {
        let rec = rec?;
        let line = r + 2;
        let label = rec.get(0).unwrap_or_default();
        let i = labels
            .iter()
            .position(|l| l.as_str() == label)
            .ok_or_else(|| IoError::Format(format!("line {line}: unknown row label {label:?}")))?;
        if std::mem::replace(&mut filled[i], true) {
            return Err(IoError::Format(format!(
                "line {line}: duplicate row {label}"
            )));
        }
        if rec.len() != labels.len() + 1 {
            return Err(IoError::Format(format!(
                "line {line}: expected {} values, found {}",
                labels.len(),
                rec.len().saturating_sub(1)
            )));
        }
        values[i] = rec
            .iter()
            .skip(1)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| IoError::Format(format!("line {line}: {v:?} is not a number")))
            })
            .collect::<IoResult<_>>()?;
    }
    if let Some(i) = filled.iter().position(|f| !f) {
        return Err(IoError::Format(format!("missing row for {}", labels[i])));
    }
    Ok(SimilarityMatrix::new(labels, values, tau)?)
}

pub fn load_similarity(path: impl AsRef<Path>, tau: f64) -> IoResult<SimilarityMatrix> {
    parse_similarity(&read(path.as_ref())?, tau)
}
