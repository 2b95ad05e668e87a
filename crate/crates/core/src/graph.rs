//! Immutable labeled DAGs and the structural queries every other module uses.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::borrow::Borrow;
use core::fmt;

use crate::{Error, Result};

/// Textual node identity. Nodes of different graphs over the same variables
/// are matched by label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Self {
        NodeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Labels are non-empty and contain no whitespace and none of `,;|`,
    /// which the file formats reserve as separators.
    pub fn is_valid_label(label: &str) -> bool {
        !label.is_empty()
            && !label
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, ',' | ';' | '|'))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<&String> for NodeId {
    fn from(s: &String) -> Self {
        NodeId(s.clone())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<NodeId> for String {
    fn from(id: NodeId) -> Self {
        id.0
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for NodeId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A set of variables, ordered by label.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarSet(BTreeSet<NodeId>);

impl VarSet {
    pub fn new() -> Self {
        VarSet(BTreeSet::new())
    }

    /// Builds a set from anything label-like: `VarSet::of(["A", "B"])`.
    pub fn of<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        labels
            .into_iter()
            .map(|s| NodeId::from(s.as_ref()))
            .collect()
    }

    pub fn insert(&mut self, id: NodeId) -> bool {
        self.0.insert(id)
    }

    pub fn remove(&mut self, label: &str) -> bool {
        self.0.remove(label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.0.iter()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// First label found in both sets.
    pub fn first_common<'a>(&'a self, other: &'a VarSet) -> Option<&'a NodeId> {
        self.0.intersection(&other.0).next()
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, id) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(id.as_str())?;
        }
        Ok(())
    }
}

impl FromIterator<NodeId> for VarSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        VarSet(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a NodeId> for VarSet {
    fn from_iter<I: IntoIterator<Item = &'a NodeId>>(iter: I) -> Self {
        VarSet(iter.into_iter().cloned().collect())
    }
}

impl IntoIterator for VarSet {
    type Item = NodeId;
    type IntoIter = alloc::collections::btree_set::IntoIter<NodeId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a VarSet {
    type Item = &'a NodeId;
    type IntoIter = alloc::collections::btree_set::Iter<'a, NodeId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A labeled directed acyclic graph.
///
/// Nodes keep the order they were declared in; adjacency lists are sorted by
/// node index. Acyclicity, label validity and edge uniqueness are checked at
/// construction, so every `Dag` value is well formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    labels: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Dag {
    /// Builds a DAG from a node list and an edge list.
    ///
    /// Fails on invalid or duplicate labels, unknown endpoints, self-loops,
    /// duplicate edges, and on the first edge (in input order) that closes a
    /// directed cycle.
    pub fn new<N, S, E, A, B>(nodes: N, edges: E) -> Result<Dag>
    where
        N: IntoIterator<Item = S>,
        S: Into<String>,
        E: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let labels: Vec<NodeId> = nodes.into_iter().map(|s| NodeId(s.into())).collect();
        let mut index = BTreeMap::new();
        for (i, id) in labels.iter().enumerate() {
            if !NodeId::is_valid_label(id.as_str()) {
                return Err(Error::InvalidLabel(id.to_string()));
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateNode(id.to_string()));
            }
        }
        let mut pairs = Vec::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let t = *index
                .get(a)
                .ok_or_else(|| Error::UnknownNode(a.to_string()))?;
            let h = *index
                .get(b)
                .ok_or_else(|| Error::UnknownNode(b.to_string()))?;
            pairs.push((t, h));
        }
        Self::assemble(labels, index, &pairs)
    }

    /// Builds a DAG whose node list is the endpoints in first-appearance order.
    pub fn from_edges<E, A, B>(edges: E) -> Result<Dag>
    where
        E: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let edges: Vec<(String, String)> = edges
            .into_iter()
            .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
            .collect();
        let mut seen = BTreeSet::new();
        let mut nodes = Vec::new();
        for (a, b) in &edges {
            for s in [a, b] {
                if seen.insert(s.clone()) {
                    nodes.push(s.clone());
                }
            }
        }
        Dag::new(nodes, edges)
    }

    /// Index-level constructor with full validation of the edge list.
    pub(crate) fn from_index_edges(labels: Vec<NodeId>, edges: &[(usize, usize)]) -> Result<Dag> {
        let mut index = BTreeMap::new();
        for (i, id) in labels.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateNode(id.to_string()));
            }
        }
        Self::assemble(labels, index, edges)
    }

    fn assemble(
        labels: Vec<NodeId>,
        index: BTreeMap<NodeId, usize>,
        edges: &[(usize, usize)],
    ) -> Result<Dag> {
        let n = labels.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(t, h) in edges {
            if t == h {
                return Err(Error::SelfLoop(labels[t].to_string()));
            }
            if !seen.insert((t, h)) {
                return Err(Error::DuplicateEdge {
                    tail: labels[t].to_string(),
                    head: labels[h].to_string(),
                });
            }
            children[t].push(h);
            parents[h].push(t);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Dag {
            labels,
            index,
            parents,
            children,
            edge_count: edges.len(),
        };
        if dag.kahn_order().len() != n {
            return Err(Self::first_cycle_edge(&dag.labels, edges));
        }
        Ok(dag)
    }

    /// Replays the edges in input order and reports the first one whose head
    /// already reaches its tail.
    fn first_cycle_edge(labels: &[NodeId], edges: &[(usize, usize)]) -> Error {
        let mut adj = vec![Vec::new(); labels.len()];
        for &(t, h) in edges {
            let mut seen = vec![false; labels.len()];
            let mut stack = vec![h];
            while let Some(v) = stack.pop() {
                if v == t {
                    return Error::Cycle {
                        tail: labels[t].to_string(),
                        head: labels[h].to_string(),
                    };
                }
                if !core::mem::replace(&mut seen[v], true) {
                    stack.extend(adj[v].iter().copied());
                }
            }
            adj[t].push(h);
        }
        unreachable!("a cyclic edge list has an edge closing a cycle")
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.labels
    }

    pub fn node_set(&self) -> VarSet {
        self.labels.iter().collect()
    }

    /// Edges ordered by tail index, then head index.
    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> + '_ {
        self.index_edges()
            .map(move |(t, h)| (&self.labels[t], &self.labels[h]))
    }

    pub fn index_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(t, hs)| hs.iter().map(move |&h| (t, h)))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub(crate) fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub(crate) fn require_all(&self, set: &VarSet) -> Result<Vec<usize>> {
        set.iter().map(|id| self.require(id.as_str())).collect()
    }

    pub fn label(&self, i: usize) -> &NodeId {
        &self.labels[i]
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn has_edge(&self, tail: &str, head: &str) -> bool {
        match (self.index_of(tail), self.index_of(head)) {
            (Some(t), Some(h)) => self.has_index_edge(t, h),
            _ => false,
        }
    }

    pub fn has_index_edge(&self, t: usize, h: usize) -> bool {
        self.children[t].binary_search(&h).is_ok()
    }

    pub fn parent_indices(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn child_indices(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub(crate) fn to_set(&self, idx: impl IntoIterator<Item = usize>) -> VarSet {
        idx.into_iter().map(|i| self.labels[i].clone()).collect()
    }

    fn mask_to_set(&self, mask: &[bool]) -> VarSet {
        self.to_set(mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i))
    }

    pub fn parents(&self, v: &str) -> Result<VarSet> {
        let i = self.require(v)?;
        Ok(self.to_set(self.parents[i].iter().copied()))
    }

    pub fn children(&self, v: &str) -> Result<VarSet> {
        let i = self.require(v)?;
        Ok(self.to_set(self.children[i].iter().copied()))
    }

    /// All nodes reachable from `s` by directed paths, `s` included.
    pub fn descendants(&self, s: &VarSet) -> Result<VarSet> {
        let idx = self.require_all(s)?;
        Ok(self.mask_to_set(&self.descendant_mask(&idx)))
    }

    /// All nodes with a directed path into `s`. Members of `s` appear only
    /// when they are ancestors of another member.
    pub fn ancestors(&self, s: &VarSet) -> Result<VarSet> {
        let idx = self.require_all(s)?;
        Ok(self.mask_to_set(&self.ancestor_mask(&idx)))
    }

    /// Reflexive descendant closure as a membership mask.
    pub fn descendant_mask(&self, start: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.node_count()];
        let mut stack: Vec<usize> = start.to_vec();
        while let Some(v) = stack.pop() {
            if !core::mem::replace(&mut mask[v], true) {
                stack.extend(self.children[v].iter().copied());
            }
        }
        mask
    }

    /// Strict ancestor closure as a membership mask.
    pub fn ancestor_mask(&self, start: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.node_count()];
        let mut stack: Vec<usize> = start
            .iter()
            .flat_map(|&v| self.parents[v].iter().copied())
            .collect();
        while let Some(v) = stack.pop() {
            if !core::mem::replace(&mut mask[v], true) {
                stack.extend(self.parents[v].iter().copied());
            }
        }
        mask
    }

    /// Kahn's procedure; among ready nodes the lexicographically smallest
    /// label goes first, so the order is reproducible.
    pub fn topological_order(&self) -> Vec<NodeId> {
        self.topological_indices()
            .into_iter()
            .map(|i| self.labels[i].clone())
            .collect()
    }

    pub fn topological_indices(&self) -> Vec<usize> {
        self.kahn_order()
    }

    fn kahn_order(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeMap<&str, usize> = (0..n)
            .filter(|&i| indegree[i] == 0)
            .map(|i| (self.labels[i].as_str(), i))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some((_, v)) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(self.labels[c].as_str(), c);
                }
            }
        }
        order
    }

    /// Maps a label order onto indices, checking that it is a permutation of
    /// the nodes that respects every edge.
    pub fn check_order(&self, order: &[NodeId]) -> Result<Vec<usize>> {
        let invalid = || {
            let mut s = String::from("[");
            for (i, id) in order.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(id.as_str());
            }
            s.push(']');
            Error::InvalidOrder(s)
        };
        if order.len() != self.node_count() {
            return Err(invalid());
        }
        let mut pos = vec![usize::MAX; self.node_count()];
        let mut idx = Vec::with_capacity(order.len());
        for (p, id) in order.iter().enumerate() {
            let i = self.index_of(id.as_str()).ok_or_else(invalid)?;
            if pos[i] != usize::MAX {
                return Err(invalid());
            }
            pos[i] = p;
            idx.push(i);
        }
        if self.index_edges().any(|(t, h)| pos[t] > pos[h]) {
            return Err(invalid());
        }
        Ok(idx)
    }

    pub fn is_topological_order(&self, order: &[NodeId]) -> bool {
        self.check_order(order).is_ok()
    }

    /// True iff a directed path with at least two edges joins `u` and `v` in
    /// either direction. A direct edge alone does not count.
    pub fn has_directed_path_len_ge2(&self, u: &str, v: &str) -> Result<bool> {
        let (u, v) = (self.require(u)?, self.require(v)?);
        Ok(self.long_path_between(u, v))
    }

    pub(crate) fn long_path_between(&self, u: usize, v: usize) -> bool {
        self.long_path_from(u, v) || self.long_path_from(v, u)
    }

    fn long_path_from(&self, u: usize, v: usize) -> bool {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<usize> = self.children[u]
            .iter()
            .copied()
            .filter(|&c| c != v)
            .collect();
        while let Some(w) = stack.pop() {
            if w == v {
                return true;
            }
            if !core::mem::replace(&mut seen[w], true) {
                stack.extend(self.children[w].iter().copied());
            }
        }
        false
    }

    /// Keeps only the edges accepted by `keep`. Removing edges cannot create
    /// a cycle, so the result needs no revalidation.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Dag {
        let n = self.node_count();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (t, h) in self.index_edges() {
            if keep(t, h) {
                children[t].push(h);
                parents[h].push(t);
                edge_count += 1;
            }
        }
        for list in &mut parents {
            list.sort_unstable();
        }
        Dag {
            labels: self.labels.clone(),
            index: self.index.clone(),
            parents,
            children,
            edge_count,
        }
    }

    /// `true` iff every edge of `self` is an edge of `other` and both share
    /// the node set.
    pub fn is_subgraph_of(&self, other: &Dag) -> bool {
        self.node_set() == other.node_set()
            && self
                .edges()
                .all(|(t, h)| other.has_edge(t.as_str(), h.as_str()))
    }
}

/// Reachability along paths of length at least two, precomputed for every
/// node pair with bitsets. Answers the contraction-cycle test in O(1).
#[derive(Debug, Clone)]
pub struct LongPaths {
    words: usize,
    reach2: Vec<u64>,
}

impl LongPaths {
    pub fn new(g: &Dag) -> Self {
        let n = g.node_count();
        let words = n.div_ceil(64).max(1);
        let mut reach1 = vec![0u64; n * words];
        let mut reach2 = vec![0u64; n * words];
        for &u in g.topological_indices().iter().rev() {
            for &c in g.child_indices(u) {
                reach1[u * words + c / 64] |= 1 << (c % 64);
                for w in 0..words {
                    let r = reach1[c * words + w];
                    reach1[u * words + w] |= r;
                    reach2[u * words + w] |= r;
                }
            }
        }
        LongPaths { words, reach2 }
    }

    fn reaches(&self, u: usize, v: usize) -> bool {
        self.reach2[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Same predicate as [`Dag::has_directed_path_len_ge2`], by index.
    pub fn connected(&self, u: usize, v: usize) -> bool {
        self.reaches(u, v) || self.reaches(v, u)
    }
}
