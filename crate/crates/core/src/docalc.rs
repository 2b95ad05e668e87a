//! Graphical side conditions of the three do-calculus rules on summary DAGs,
//! and adjustment sets read off the canonical DAG.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::graph::VarSet;
use crate::separation::{s_separated, SeparationQuery};
use crate::summary::SummaryDag;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
}

/// Where the ancestors of `w` are taken when computing `Z(W)` for rule 3.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ZwAncestors {
    /// The quotient with edges into `x` removed.
    #[default]
    MutilatedX,
    /// The unmodified quotient.
    Summary,
}

/// Cluster sets `x`, `y`, `z`, `w`; `y` and `z` non-empty, all disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoQuery {
    pub x: VarSet,
    pub y: VarSet,
    pub z: VarSet,
    pub w: VarSet,
}

impl DoQuery {
    pub fn new(x: VarSet, y: VarSet, z: VarSet, w: VarSet) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptySet("y"));
        }
        if z.is_empty() {
            return Err(Error::EmptySet("z"));
        }
        let sets = [&x, &y, &z, &w];
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if let Some(id) = sets[i].first_common(sets[j]) {
                    return Err(Error::NotDisjoint(id.to_string()));
                }
            }
        }
        Ok(DoQuery { x, y, z, w })
    }
}

/// The mutilation a rule prescribes and whether the separation holds there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleWitness {
    pub rule: Rule,
    /// Clusters whose incoming edges were removed.
    pub bar: VarSet,
    /// Clusters whose outgoing edges were removed.
    pub under: VarSet,
    /// `y ⊥ z | x ∪ w` in the mutilated summary.
    pub separated: bool,
}

/// `true` when the rule's graphical condition holds, using the default
/// placement of the `Z(W)` ancestor computation.
pub fn rule_applies(h: &SummaryDag, rule: Rule, q: &DoQuery) -> Result<bool> {
    Ok(rule_witness(h, rule, q, ZwAncestors::default())?.separated)
}

pub fn rule_witness(
    h: &SummaryDag,
    rule: Rule,
    q: &DoQuery,
    zw: ZwAncestors,
) -> Result<RuleWitness> {
    let (bar, under) = match rule {
        Rule::R1 => (q.x.clone(), VarSet::new()),
        Rule::R2 => (q.x.clone(), q.z.clone()),
        Rule::R3 => (q.x.union(&z_of_w(h, q, zw)?), VarSet::new()),
    };
    let m = h.mutilate(&bar, &under)?;
    let sq = SeparationQuery::new(q.y.clone(), q.z.clone(), q.x.union(&q.w))?;
    Ok(RuleWitness {
        rule,
        bar,
        under,
        separated: s_separated(&m, &sq)?,
    })
}

/// Clusters of `z` that are not ancestors of any cluster of `w`.
pub fn z_of_w(h: &SummaryDag, q: &DoQuery, zw: ZwAncestors) -> Result<VarSet> {
    let host = match zw {
        ZwAncestors::MutilatedX => h.mutilate(&q.x, &VarSet::new())?,
        ZwAncestors::Summary => h.clone(),
    };
    let ancestors = host.quotient().ancestors(&q.w).map_err(|e| match e {
        Error::UnknownNode(l) => Error::UnknownCluster(l),
        other => other,
    })?;
    h.cluster_indices(&q.z)?;
    Ok(q.z.difference(&ancestors))
}

/// Parents of `t` in the canonical DAG rebuilt with `t` moved ahead of the
/// other members of its cluster.
pub fn adjustment_set(h: &SummaryDag, t: &str, o: &str) -> Result<VarSet> {
    let base = h.base();
    let ti = base.require(t)?;
    base.require(o)?;
    if t == o {
        return Err(Error::NotDisjoint(t.to_string()));
    }
    let cluster = h.cluster_index(h.cluster_of(t)?.as_str())?;
    let first = h.member_indices(cluster)[0];
    let mut order: Vec<usize> = h
        .base_order_indices()
        .iter()
        .copied()
        .filter(|&v| v != ti)
        .collect();
    let at = order.iter().position(|&v| v == first).unwrap_or(0);
    order.insert(at, ti);
    let mut pos = alloc::vec![0; base.node_count()];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let reordered = h.ground_with_order(&pos, false);
    reordered.parents(t)
}
