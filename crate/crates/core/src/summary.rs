//! Summary DAGs: partitions of a causal DAG's variables into clusters,
//! contraction, compatibility, the canonical grounding, recursive bases and
//! graph mutilation.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Dag, NodeId, VarSet};
use crate::{Error, Result};

/// A summary DAG `(H, f)` of a base DAG `G`.
///
/// Clusters are the quotient nodes; each one owns a non-empty set of base
/// variables and the sets partition the base. Every base edge either stays
/// inside a cluster or lies on a quotient edge. The base topological order is
/// recorded once and drives the within-cluster edges of the canonical DAG.
///
/// Quotient nodes are kept sorted by the base-order position of their first
/// member, and members are kept in base order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryDag {
    base: Arc<Dag>,
    base_order: Vec<usize>,
    order_pos: Vec<usize>,
    quotient: Dag,
    members: Vec<Vec<usize>>,
    mapping: Vec<usize>,
    mutilated: bool,
}

/// Every variable in its own cluster.
pub fn trivial_summary(g: &Dag) -> SummaryDag {
    SummaryDag::trivial(g)
}

impl SummaryDag {
    pub fn trivial(g: &Dag) -> SummaryDag {
        let base = Arc::new(g.clone());
        let order = base.topological_indices();
        let blocks = order.iter().map(|&v| vec![v]).collect();
        Self::from_blocks(base, order, blocks)
            .expect("the identity partition of a DAG is a summary")
    }

    /// Builds the summary induced by a partition given as label blocks. The
    /// quotient carries exactly the edges induced by base edges.
    pub fn from_partition<S: AsRef<str>>(g: &Dag, blocks: &[Vec<S>]) -> Result<SummaryDag> {
        let mut idx_blocks = Vec::with_capacity(blocks.len());
        for block in blocks {
            let mut b = Vec::with_capacity(block.len());
            for s in block {
                b.push(g.require(s.as_ref())?);
            }
            idx_blocks.push(b);
        }
        let base = Arc::new(g.clone());
        let order = base.topological_indices();
        Self::from_blocks(base, order, idx_blocks)
    }

    /// Induced summary over index blocks with a given base order.
    pub(crate) fn from_blocks(
        base: Arc<Dag>,
        base_order: Vec<usize>,
        blocks: Vec<Vec<usize>>,
    ) -> Result<SummaryDag> {
        let n = base.node_count();
        let order_pos = positions(&base_order, n);
        let mut mapping = vec![usize::MAX; n];
        let mut members = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(Error::InvalidSummary("empty cluster".into()));
            }
            block.sort_by_key(|&v| order_pos[v]);
            for &v in &block {
                if mapping[v] != usize::MAX {
                    return Err(Error::InvalidSummary(alloc::format!(
                        "{} belongs to two clusters",
                        base.label(v)
                    )));
                }
                mapping[v] = 0;
            }
            members.push(block);
        }
        if let Some(v) = mapping.iter().position(|&m| m == usize::MAX) {
            return Err(Error::InvalidSummary(alloc::format!(
                "{} belongs to no cluster",
                base.label(v)
            )));
        }
        members.sort_by_key(|m| order_pos[m[0]]);
        let labels = cluster_labels(&base, &members, &[]);
        Self::assemble(base, base_order, order_pos, members, labels, None)
    }

    /// Builds a summary from explicit parts, as read from a document. The
    /// quotient may carry edges beyond those induced by the base, but must be
    /// acyclic and preserve every base edge.
    pub fn from_parts(
        base: Dag,
        base_order: &[NodeId],
        clusters: &[(NodeId, Vec<NodeId>)],
        edges: &[(NodeId, NodeId)],
    ) -> Result<SummaryDag> {
        let order = base.check_order(base_order)?;
        let n = base.node_count();
        let order_pos = positions(&order, n);
        let mut entries: Vec<(NodeId, Vec<usize>)> = Vec::with_capacity(clusters.len());
        let mut seen = vec![false; n];
        let mut names = BTreeSet::new();
        for (label, list) in clusters {
            if !NodeId::is_valid_label(label.as_str()) {
                return Err(Error::InvalidLabel(label.to_string()));
            }
            if !names.insert(label.clone()) {
                return Err(Error::InvalidSummary(alloc::format!(
                    "duplicate cluster {label}"
                )));
            }
            if list.is_empty() {
                return Err(Error::InvalidSummary(alloc::format!(
                    "cluster {label} is empty"
                )));
            }
            let mut block = Vec::with_capacity(list.len());
            for id in list {
                let v = base.require(id.as_str())?;
                if core::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidSummary(alloc::format!(
                        "{id} belongs to two clusters"
                    )));
                }
                block.push(v);
            }
            block.sort_by_key(|&v| order_pos[v]);
            entries.push((label.clone(), block));
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidSummary(alloc::format!(
                "{} belongs to no cluster",
                base.label(v)
            )));
        }
        entries.sort_by_key(|(_, m)| order_pos[m[0]]);
        let (labels, members): (Vec<NodeId>, Vec<Vec<usize>>) = entries.into_iter().unzip();
        let find = |id: &NodeId| {
            labels
                .iter()
                .position(|l| l == id)
                .ok_or_else(|| Error::UnknownCluster(id.to_string()))
        };
        let mut qedges = Vec::with_capacity(edges.len());
        for (t, h) in edges {
            qedges.push((find(t)?, find(h)?));
        }
        let h = Self::assemble(
            Arc::new(base),
            order,
            order_pos,
            members,
            labels,
            Some(&qedges),
        )?;
        h.check_edge_preservation()?;
        Ok(h)
    }

    fn assemble(
        base: Arc<Dag>,
        base_order: Vec<usize>,
        order_pos: Vec<usize>,
        members: Vec<Vec<usize>>,
        labels: Vec<NodeId>,
        explicit_edges: Option<&[(usize, usize)]>,
    ) -> Result<SummaryDag> {
        let mut mapping = vec![0; base.node_count()];
        for (c, m) in members.iter().enumerate() {
            for &v in m {
                mapping[v] = c;
            }
        }
        let edges: Vec<(usize, usize)> = match explicit_edges {
            Some(e) => e.to_vec(),
            None => {
                let set: BTreeSet<(usize, usize)> = base
                    .index_edges()
                    .map(|(t, h)| (mapping[t], mapping[h]))
                    .filter(|(a, b)| a != b)
                    .collect();
                set.into_iter().collect()
            }
        };
        let quotient = Dag::from_index_edges(labels, &edges).map_err(|e| match e {
            Error::Cycle { tail, head } => Error::InvalidSummary(alloc::format!(
                "quotient edge {tail} -> {head} closes a cycle"
            )),
            other => other,
        })?;
        Ok(SummaryDag {
            base,
            base_order,
            order_pos,
            quotient,
            members,
            mapping,
            mutilated: false,
        })
    }

    fn check_edge_preservation(&self) -> Result<()> {
        for (t, h) in self.base.index_edges() {
            let (a, b) = (self.mapping[t], self.mapping[h]);
            if a != b && !self.quotient.has_index_edge(a, b) {
                return Err(Error::InvalidSummary(alloc::format!(
                    "base edge {} -> {} is not preserved",
                    self.base.label(t),
                    self.base.label(h)
                )));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Dag {
        &self.base
    }

    pub fn quotient(&self) -> &Dag {
        &self.quotient
    }

    pub fn base_order(&self) -> Vec<NodeId> {
        self.base_order
            .iter()
            .map(|&v| self.base.label(v).clone())
            .collect()
    }

    pub(crate) fn base_order_indices(&self) -> &[usize] {
        &self.base_order
    }

    pub fn cluster_count(&self) -> usize {
        self.members.len()
    }

    pub fn is_mutilated(&self) -> bool {
        self.mutilated
    }

    /// `(label, members)` per cluster, members in base order.
    pub fn clusters(&self) -> Vec<(NodeId, Vec<NodeId>)> {
        self.members
            .iter()
            .enumerate()
            .map(|(c, m)| {
                (
                    self.quotient.label(c).clone(),
                    m.iter().map(|&v| self.base.label(v).clone()).collect(),
                )
            })
            .collect()
    }

    pub(crate) fn member_indices(&self, cluster: usize) -> &[usize] {
        &self.members[cluster]
    }

    pub(crate) fn cluster_size(&self, cluster: usize) -> usize {
        self.members[cluster].len()
    }

    pub(crate) fn cluster_index(&self, label: &str) -> Result<usize> {
        self.quotient
            .index_of(label)
            .ok_or_else(|| Error::UnknownCluster(label.to_string()))
    }

    pub(crate) fn cluster_indices(&self, set: &VarSet) -> Result<Vec<usize>> {
        set.iter()
            .map(|id| self.cluster_index(id.as_str()))
            .collect()
    }

    pub fn members_of(&self, cluster: &str) -> Result<VarSet> {
        let c = self.cluster_index(cluster)?;
        Ok(self.base.to_set(self.members[c].iter().copied()))
    }

    pub fn cluster_of(&self, var: &str) -> Result<&NodeId> {
        let v = self.base.require(var)?;
        Ok(self.quotient.label(self.mapping[v]))
    }

    /// `f⁻¹` lifted to sets: the union of the member sets of the clusters.
    pub fn ground(&self, clusters: &VarSet) -> Result<VarSet> {
        let mut out = VarSet::new();
        for c in self.cluster_indices(clusters)? {
            for &v in &self.members[c] {
                out.insert(self.base.label(v).clone());
            }
        }
        Ok(out)
    }

    /// Base variables of `set` listed in base order.
    pub fn in_base_order(&self, set: &VarSet) -> Vec<NodeId> {
        let mut out: Vec<(usize, NodeId)> = set
            .iter()
            .filter_map(|id| {
                self.base
                    .index_of(id.as_str())
                    .map(|v| (self.order_pos[v], id.clone()))
            })
            .collect();
        out.sort();
        out.into_iter().map(|(_, id)| id).collect()
    }

    /// Merges clusters `a` and `b`.
    ///
    /// The merged cluster is labeled by its members' labels concatenated in
    /// base order. Fails with [`Error::ContractionCycle`] exactly when the
    /// quotient has a directed path of two or more edges between `a` and `b`.
    pub fn contract(&self, a: &str, b: &str) -> Result<SummaryDag> {
        let ai = self.cluster_index(a)?;
        let bi = self.cluster_index(b)?;
        if ai == bi {
            return Err(Error::SameCluster(a.to_string()));
        }
        if self.quotient.long_path_between(ai, bi) {
            return Err(Error::ContractionCycle {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        Ok(self.contract_unchecked(ai, bi))
    }

    /// Contraction by cluster index; the caller has ruled out a long path.
    pub(crate) fn contract_unchecked(&self, ai: usize, bi: usize) -> SummaryDag {
        let mut merged: Vec<usize> = self.members[ai]
            .iter()
            .chain(&self.members[bi])
            .copied()
            .collect();
        merged.sort_by_key(|&v| self.order_pos[v]);

        // Old cluster index -> new cluster index.
        let mut survivors: Vec<usize> = (0..self.members.len())
            .filter(|&c| c != ai && c != bi)
            .collect();
        let merged_key = self.order_pos[merged[0]];
        let insert_at = survivors
            .iter()
            .position(|&c| self.order_pos[self.members[c][0]] > merged_key)
            .unwrap_or(survivors.len());
        let mut remap = vec![0; self.members.len()];
        let mut members = Vec::with_capacity(survivors.len() + 1);
        let mut labels = Vec::with_capacity(survivors.len() + 1);
        for (slot, &c) in survivors.iter().enumerate() {
            let new = if slot < insert_at { slot } else { slot + 1 };
            remap[c] = new;
        }
        remap[ai] = insert_at;
        remap[bi] = insert_at;
        survivors.insert(insert_at, usize::MAX);
        for &c in &survivors {
            if c == usize::MAX {
                members.push(merged.clone());
                labels.push(NodeId::new("")); // filled below
            } else {
                members.push(self.members[c].clone());
                labels.push(self.quotient.label(c).clone());
            }
        }
        let taken: Vec<&str> = labels
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != insert_at)
            .map(|(_, l)| l.as_str())
            .collect();
        let merged_label = unique_label(&self.base, &merged, &taken);
        labels[insert_at] = merged_label;

        let edges: BTreeSet<(usize, usize)> = self
            .quotient
            .index_edges()
            .map(|(t, h)| (remap[t], remap[h]))
            .filter(|(t, h)| t != h)
            .collect();
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        let quotient = Dag::from_index_edges(labels, &edges)
            .expect("contraction without a long path keeps the quotient acyclic");
        let mut mapping = vec![0; self.base.node_count()];
        for (c, m) in members.iter().enumerate() {
            for &v in m {
                mapping[v] = c;
            }
        }
        SummaryDag {
            base: Arc::clone(&self.base),
            base_order: self.base_order.clone(),
            order_pos: self.order_pos.clone(),
            quotient,
            members,
            mapping,
            mutilated: self.mutilated,
        }
    }

    /// The canonical causal DAG: base edges, every member pair along a
    /// quotient edge, and each cluster as a clique ordered by base order.
    ///
    /// A mutilated summary contributes no base edges, only what its
    /// (mutilated) quotient and the cluster cliques imply.
    pub fn canonical(&self) -> Dag {
        self.ground_with_order(&self.order_pos, !self.mutilated)
    }

    pub(crate) fn ground_with_order(&self, order_pos: &[usize], include_base: bool) -> Dag {
        let mut edges = BTreeSet::new();
        if include_base {
            edges.extend(self.base.index_edges());
        }
        for (p, q) in self.quotient.index_edges() {
            for &u in &self.members[p] {
                for &v in &self.members[q] {
                    edges.insert((u, v));
                }
            }
        }
        for m in &self.members {
            for (i, &u) in m.iter().enumerate() {
                for &v in &m[i + 1..] {
                    if order_pos[u] < order_pos[v] {
                        edges.insert((u, v));
                    } else {
                        edges.insert((v, u));
                    }
                }
            }
        }
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        Dag::from_index_edges(self.base.nodes().to_vec(), &edges)
            .expect("the grounding of an acyclic summary is acyclic")
    }

    /// `|E(canonical)| - |E(base)|`.
    pub fn additional_edges(&self) -> usize {
        self.canonical()
            .edge_count()
            .saturating_sub(self.base.edge_count())
    }

    /// Removes quotient edges into `bar_x` and out of `under_z`. The result is
    /// flagged so that its canonical DAG is grounded from the mutilated
    /// quotient alone.
    pub fn mutilate(&self, bar_x: &VarSet, under_z: &VarSet) -> Result<SummaryDag> {
        let mut into = vec![false; self.cluster_count()];
        let mut out_of = vec![false; self.cluster_count()];
        for c in self.cluster_indices(bar_x)? {
            into[c] = true;
        }
        for c in self.cluster_indices(under_z)? {
            out_of[c] = true;
        }
        let quotient = self.quotient.filter_edges(|t, h| !into[h] && !out_of[t]);
        Ok(SummaryDag {
            quotient,
            mutilated: true,
            ..self.clone()
        })
    }

    /// `true` iff `g` is over the base variables and every edge of `g` stays
    /// inside a cluster or lies on a quotient edge.
    pub fn is_compatible(&self, g: &Dag) -> Result<bool> {
        if g.node_set() != self.base.node_set() {
            return Err(Error::UniverseMismatch(
                "graph and summary are over different variables".into(),
            ));
        }
        Ok(g.edges().all(|(t, h)| {
            let a = self.mapping[self.base.index_of(t.as_str()).unwrap()];
            let b = self.mapping[self.base.index_of(h.as_str()).unwrap()];
            a == b || self.quotient.has_index_edge(a, b)
        }))
    }

    /// Checks every structural invariant; used by tests and loaders.
    pub fn validate(&self) -> Result<()> {
        let n = self.base.node_count();
        let mut seen = vec![false; n];
        for (c, m) in self.members.iter().enumerate() {
            if m.is_empty() {
                return Err(Error::InvalidSummary("empty cluster".into()));
            }
            for &v in m {
                if core::mem::replace(&mut seen[v], true) || self.mapping[v] != c {
                    return Err(Error::InvalidSummary(
                        "clusters do not partition the base".into(),
                    ));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidSummary(
                "clusters do not cover the base".into(),
            ));
        }
        if self.quotient.node_count() != self.members.len() {
            return Err(Error::InvalidSummary(
                "quotient size differs from cluster count".into(),
            ));
        }
        self.base.check_order(&self.base_order())?;
        if !self.mutilated {
            self.check_edge_preservation()?;
        }
        Ok(())
    }

    /// Recursive basis of the quotient, over cluster labels.
    pub fn recursive_basis(&self) -> RecursiveBasis {
        let order = self.quotient.topological_indices();
        let mut rb = rb_over(&self.quotient, &order);
        for s in &mut rb.statements {
            s.universe = Universe::Clusters;
        }
        rb
    }

    /// Grounds a cluster-level statement to base variables; base-level
    /// statements are returned unchanged.
    pub fn ground_statement(&self, s: &CiStatement) -> Result<CiStatement> {
        match s.universe {
            Universe::Base => Ok(s.clone()),
            Universe::Clusters => Ok(CiStatement {
                x: self.ground(&s.x)?,
                y: self.ground(&s.y)?,
                z: self.ground(&s.z)?,
                universe: Universe::Base,
            }),
        }
    }

    /// The summary's recursive basis grounded to base variables.
    pub fn grounded_recursive_basis(&self) -> Vec<CiStatement> {
        self.recursive_basis()
            .statements
            .iter()
            .map(|s| {
                self.ground_statement(s)
                    .expect("statement clusters belong to the summary")
            })
            .collect()
    }
}

fn positions(order: &[usize], n: usize) -> Vec<usize> {
    let mut pos = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    pos
}

fn cluster_labels(base: &Dag, members: &[Vec<usize>], reserved: &[&str]) -> Vec<NodeId> {
    let mut taken: Vec<String> = reserved.iter().map(|s| s.to_string()).collect();
    // Singletons keep their own label and are reserved first so a merged
    // label never shadows one.
    let mut labels: Vec<Option<NodeId>> = members
        .iter()
        .map(|m| (m.len() == 1).then(|| base.label(m[0]).clone()))
        .collect();
    taken.extend(labels.iter().flatten().map(|l| l.to_string()));
    for (i, m) in members.iter().enumerate() {
        if labels[i].is_none() {
            let refs: Vec<&str> = taken.iter().map(String::as_str).collect();
            let l = unique_label(base, m, &refs);
            taken.push(l.to_string());
            labels[i] = Some(l);
        }
    }
    labels.into_iter().map(Option::unwrap).collect()
}

/// Members' labels concatenated in base order. On a clash with an existing
/// cluster label the members are joined with `+`, then primed until unique.
fn unique_label(base: &Dag, members: &[usize], taken: &[&str]) -> NodeId {
    let parts: Vec<&str> = members.iter().map(|&v| base.label(v).as_str()).collect();
    let mut label = parts.concat();
    if members.len() > 1 && taken.contains(&label.as_str()) {
        label = parts.join("+");
        while taken.contains(&label.as_str()) {
            label.push('\'');
        }
    }
    NodeId::new(label)
}

/// Which variable universe a statement is expressed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Universe {
    Base,
    Clusters,
}

/// The conditional-independence statement `x ⊥ y | z`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CiStatement {
    pub x: VarSet,
    pub y: VarSet,
    pub z: VarSet,
    pub universe: Universe,
}

/// One statement per node in topological order: the node is independent of
/// its non-parent predecessors given its parents. Statements with an empty
/// independence set are left out.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecursiveBasis {
    pub statements: Vec<CiStatement>,
}

impl RecursiveBasis {
    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}

/// Recursive basis of `g` under the given topological order.
pub fn recursive_basis(g: &Dag, order: &[NodeId]) -> Result<RecursiveBasis> {
    let idx = g.check_order(order)?;
    Ok(rb_over(g, &idx))
}

fn rb_over(g: &Dag, order: &[usize]) -> RecursiveBasis {
    let mut statements = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let parents = g.parent_indices(v);
        let y: Vec<usize> = order[..i]
            .iter()
            .copied()
            .filter(|u| parents.binary_search(u).is_err())
            .collect();
        if y.is_empty() {
            continue;
        }
        statements.push(CiStatement {
            x: g.to_set([v]),
            y: g.to_set(y),
            z: g.to_set(parents.iter().copied()),
            universe: Universe::Base,
        });
    }
    RecursiveBasis { statements }
}

/// Drops edges into `bar_x` and out of `under_z`.
pub fn mutilate(g: &Dag, bar_x: &VarSet, under_z: &VarSet) -> Result<Dag> {
    let mut into = vec![false; g.node_count()];
    let mut out_of = vec![false; g.node_count()];
    for v in g.require_all(bar_x)? {
        into[v] = true;
    }
    for v in g.require_all(under_z)? {
        out_of[v] = true;
    }
    Ok(g.filter_edges(|t, h| !into[h] && !out_of[t]))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::tests::g1;
    use alloc::vec;

    pub(crate) fn h1() -> SummaryDag {
        SummaryDag::trivial(&g1()).contract("B", "C").unwrap()
    }

    pub(crate) fn h2() -> SummaryDag {
        SummaryDag::from_partition(&g1(), &[vec!["A"], vec!["B", "D"], vec!["C"], vec!["E"]])
            .unwrap()
    }

    pub(crate) fn h3() -> SummaryDag {
        SummaryDag::from_partition(&g1(), &[vec!["A", "B", "C"], vec!["D"], vec!["E"]]).unwrap()
    }

    pub(crate) fn h4() -> SummaryDag {
        SummaryDag::from_partition(&g1(), &[vec!["A"], vec!["B", "C"], vec!["D", "E"]]).unwrap()
    }

    fn edge_list(g: &Dag) -> Vec<(&str, &str)> {
        let mut e: Vec<_> = g.edges().map(|(t, h)| (t.as_str(), h.as_str())).collect();
        e.sort();
        e
    }

    fn sorted(mut v: Vec<(&'static str, &'static str)>) -> Vec<(&'static str, &'static str)> {
        v.sort();
        v
    }

    fn stmt(x: &[&str], y: &[&str], z: &[&str], universe: Universe) -> CiStatement {
        CiStatement {
            x: VarSet::of(x),
            y: VarSet::of(y),
            z: VarSet::of(z),
            universe,
        }
    }

    #[test]
    fn contraction_of_g1() {
        let h = h1();
        let labels: Vec<&str> = h.quotient().nodes().iter().map(NodeId::as_str).collect();
        assert_eq!(labels, vec!["A", "BC", "D", "E"]);
        assert_eq!(
            edge_list(h.quotient()),
            sorted(vec![("A", "BC"), ("BC", "D"), ("D", "E")])
        );
        assert_eq!(h.members_of("BC").unwrap(), VarSet::of(["B", "C"]));
        assert_eq!(h.base(), &g1());

        let de = SummaryDag::trivial(&g1()).contract("D", "E").unwrap();
        assert!(de.quotient().contains("DE"));
        assert_eq!(de.cluster_count(), 4);

        assert_eq!(
            SummaryDag::trivial(&g1()).contract("A", "D"),
            Err(Error::ContractionCycle {
                a: "A".into(),
                b: "D".into()
            })
        );
        assert_eq!(
            SummaryDag::trivial(&g1()).contract("A", "A"),
            Err(Error::SameCluster("A".into()))
        );
        assert_eq!(
            SummaryDag::trivial(&g1()).contract("A", "Q"),
            Err(Error::UnknownCluster("Q".into()))
        );
    }

    #[test]
    fn trivial_summaries() {
        let t = SummaryDag::trivial(&g1());
        assert_eq!(t.cluster_count(), 5);
        assert_eq!(t.quotient(), &g1());
        let edgeless = Dag::new(["P", "Q", "R"], core::iter::empty::<(&str, &str)>()).unwrap();
        let t = SummaryDag::trivial(&edgeless);
        assert_eq!(t.cluster_count(), 3);
        assert_eq!(t.quotient().edge_count(), 0);
    }

    #[test]
    fn compatibility_with_h1() {
        let g2 = Dag::new(
            ["A", "B", "C", "D", "E"],
            [("A", "B"), ("C", "B"), ("C", "D"), ("D", "E")],
        )
        .unwrap();
        let g3 = Dag::new(
            ["A", "B", "C", "D", "E"],
            [("A", "D"), ("C", "D"), ("B", "D"), ("D", "E")],
        )
        .unwrap();
        let h = h1();
        assert!(h.is_compatible(&g1()).unwrap());
        assert!(h.is_compatible(&g2).unwrap());
        assert!(!h.is_compatible(&g3).unwrap());
        assert!(SummaryDag::trivial(&g3).is_compatible(&g3).unwrap());
        let other = Dag::from_edges([("A", "B")]).unwrap();
        assert!(matches!(
            h.is_compatible(&other),
            Err(Error::UniverseMismatch(_))
        ));
    }

    #[test]
    fn canonical_dags() {
        assert_eq!(
            edge_list(&h3().canonical()),
            sorted(vec![
                ("A", "B"),
                ("A", "C"),
                ("B", "C"),
                ("A", "D"),
                ("B", "D"),
                ("C", "D"),
                ("D", "E")
            ])
        );
        assert_eq!(SummaryDag::trivial(&g1()).canonical(), g1());
        assert_eq!(
            edge_list(&h1().canonical()),
            sorted(vec![
                ("A", "B"),
                ("A", "C"),
                ("B", "C"),
                ("B", "D"),
                ("C", "D"),
                ("D", "E")
            ])
        );
    }

    #[test]
    fn additional_edge_counts() {
        assert_eq!(h3().additional_edges(), 2);
        assert_eq!(SummaryDag::trivial(&g1()).additional_edges(), 0);
        assert_eq!(h1().additional_edges(), 1);
    }

    #[test]
    fn recursive_bases() {
        let g = g1();
        let rb = recursive_basis(&g, &g.topological_order()).unwrap();
        assert_eq!(
            rb.statements,
            vec![
                stmt(&["C"], &["B"], &["A"], Universe::Base),
                stmt(&["D"], &["A"], &["B", "C"], Universe::Base),
                stmt(&["E"], &["A", "B", "C"], &["D"], Universe::Base),
            ]
        );
        let c3 = h3().canonical();
        let rb = recursive_basis(&c3, &c3.topological_order()).unwrap();
        assert_eq!(
            rb.statements,
            vec![stmt(&["E"], &["A", "B", "C"], &["D"], Universe::Base)]
        );
        let chain = Dag::from_edges([("A", "B"), ("B", "C")]).unwrap();
        let rb = recursive_basis(&chain, &chain.topological_order()).unwrap();
        assert_eq!(
            rb.statements,
            vec![stmt(&["C"], &["A"], &["B"], Universe::Base)]
        );

        let bad = [
            NodeId::from("E"),
            "A".into(),
            "B".into(),
            "C".into(),
            "D".into(),
        ];
        assert!(matches!(
            recursive_basis(&g, &bad),
            Err(Error::InvalidOrder(_))
        ));
    }

    #[test]
    fn summary_recursive_bases() {
        assert_eq!(
            h1().recursive_basis().statements,
            vec![
                stmt(&["D"], &["A"], &["BC"], Universe::Clusters),
                stmt(&["E"], &["A", "BC"], &["D"], Universe::Clusters),
            ]
        );
        assert_eq!(
            h1().grounded_recursive_basis()[1],
            stmt(&["E"], &["A", "B", "C"], &["D"], Universe::Base)
        );
        assert_eq!(
            h4().recursive_basis().statements,
            vec![stmt(&["DE"], &["A"], &["BC"], Universe::Clusters)]
        );
        assert_eq!(
            h2().grounded_recursive_basis(),
            vec![stmt(&["E"], &["A", "C"], &["B", "D"], Universe::Base)]
        );
        let g = g1();
        assert_eq!(
            SummaryDag::trivial(&g).grounded_recursive_basis(),
            recursive_basis(&g, &g.topological_order())
                .unwrap()
                .statements
        );
    }

    #[test]
    fn graph_mutilation() {
        let g = g1();
        let none = VarSet::new();
        assert_eq!(
            edge_list(&mutilate(&g, &VarSet::of(["D"]), &none).unwrap()),
            sorted(vec![("A", "B"), ("A", "C"), ("D", "E")])
        );
        assert_eq!(
            edge_list(&mutilate(&g, &none, &VarSet::of(["D"])).unwrap()),
            sorted(vec![("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")])
        );
        assert_eq!(mutilate(&g, &none, &none).unwrap(), g);
        assert!(mutilate(&g, &VarSet::of(["Q"]), &none).is_err());
    }

    #[test]
    fn summary_mutilation() {
        let h = h1();
        let none = VarSet::new();
        let bar = h.mutilate(&VarSet::of(["D"]), &none).unwrap();
        assert_eq!(
            edge_list(bar.quotient()),
            sorted(vec![("A", "BC"), ("D", "E")])
        );
        let under = h.mutilate(&none, &VarSet::of(["BC"])).unwrap();
        assert_eq!(
            edge_list(under.quotient()),
            sorted(vec![("A", "BC"), ("D", "E")])
        );
        let same = h.mutilate(&none, &none).unwrap();
        assert_eq!(same.quotient(), h.quotient());
        assert_eq!(same.canonical(), h.canonical());
        // Grounded from the mutilated quotient: B -> D and C -> D are gone.
        assert_eq!(
            edge_list(&under.canonical()),
            sorted(vec![("A", "B"), ("A", "C"), ("B", "C"), ("D", "E")])
        );
        assert_eq!(
            h.mutilate(&VarSet::of(["B"]), &none),
            Err(Error::UnknownCluster("B".into()))
        );
    }

    #[test]
    fn label_collisions_are_resolved() {
        let g = Dag::new(["A", "B", "AB"], [("A", "AB")]).unwrap();
        let h = SummaryDag::trivial(&g).contract("A", "B").unwrap();
        assert!(h.quotient().contains("A+B"));
        assert!(h.quotient().contains("AB"));
        h.validate().unwrap();
    }

    #[test]
    fn explicit_parts_round_trip() {
        let h = h1();
        let clusters = h.clusters();
        let edges: Vec<(NodeId, NodeId)> = h
            .quotient()
            .edges()
            .map(|(t, h)| (t.clone(), h.clone()))
            .collect();
        let back = SummaryDag::from_parts(g1(), &h.base_order(), &clusters, &edges).unwrap();
        assert_eq!(back, h);

        // Dropping the BC -> D edge breaks edge preservation.
        let broken: Vec<(NodeId, NodeId)> = edges
            .iter()
            .filter(|(t, _)| t.as_str() != "BC")
            .cloned()
            .collect();
        assert!(matches!(
            SummaryDag::from_parts(g1(), &h.base_order(), &clusters, &broken),
            Err(Error::InvalidSummary(_))
        ));
    }

    #[test]
    fn cyclic_partitions_are_rejected() {
        assert!(matches!(
            SummaryDag::from_partition(&g1(), &[vec!["A", "D"], vec!["B"], vec!["C"], vec!["E"]]),
            Err(Error::InvalidSummary(_))
        ));
    }
}
