//! The greedy summarizer: repeatedly merge the valid cluster pair whose
//! contraction adds the fewest edges to the canonical DAG.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dag, LongPaths, NodeId};
use crate::summary::SummaryDag;
use crate::{Error, Result};

/// Pairwise semantic similarity between base variables with a threshold.
/// A cluster is admissible when every pair of its members is at least `tau`
/// similar.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    labels: Vec<NodeId>,
    values: Vec<Vec<f64>>,
    tau: f64,
}

impl SimilarityMatrix {
    pub fn new(labels: Vec<NodeId>, values: Vec<Vec<f64>>, tau: f64) -> Result<Self> {
        let n = labels.len();
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidSimilarity(alloc::format!(
                "threshold {tau} is outside [0, 1]"
            )));
        }
        let distinct: BTreeSet<&NodeId> = labels.iter().collect();
        if distinct.len() != n {
            return Err(Error::InvalidSimilarity("duplicate label".into()));
        }
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidSimilarity(alloc::format!(
                "matrix is not {n} x {n}"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i][j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidSimilarity(alloc::format!(
                        "sim({}, {}) = {v} is outside [0, 1]",
                        labels[i],
                        labels[j]
                    )));
                }
                if v != values[j][i] {
                    return Err(Error::InvalidSimilarity(alloc::format!(
                        "sim({}, {}) is not symmetric",
                        labels[i],
                        labels[j]
                    )));
                }
            }
            if values[i][i] != 1.0 {
                return Err(Error::InvalidSimilarity(alloc::format!(
                    "sim({0}, {0}) must be 1",
                    labels[i]
                )));
            }
        }
        Ok(SimilarityMatrix {
            labels,
            values,
            tau,
        })
    }

    pub fn labels(&self) -> &[NodeId] {
        &self.labels
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.labels.clone(), self.values.clone(), tau)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l.as_str() == a)?;
        let j = self.labels.iter().position(|l| l.as_str() == b)?;
        Some(self.values[i][j])
    }

    /// Matrix row for every base node, by base index.
    fn rows_for(&self, g: &Dag) -> Result<Vec<usize>> {
        g.nodes()
            .iter()
            .map(|id| {
                self.labels.iter().position(|l| l == id).ok_or_else(|| {
                    Error::InvalidSimilarity(alloc::format!("no similarity row for {id}"))
                })
            })
            .collect()
    }
}

/// Invalid pairs and memoized costs, both keyed by unordered cluster-label
/// pairs stored smaller label first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CostCaches {
    invalid: BTreeMap<NodeId, BTreeSet<NodeId>>,
    cost: BTreeMap<NodeId, BTreeMap<NodeId, usize>>,
}

fn ordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CostCaches {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_cached_invalid(&self, a: &str, b: &str) -> bool {
        let (a, b) = ordered(a, b);
        self.invalid.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn mark_invalid(&mut self, a: &str, b: &str) {
        let (a, b) = ordered(a, b);
        self.invalid
            .entry(NodeId::new(a))
            .or_default()
            .insert(NodeId::new(b));
    }

    pub fn cached_cost(&self, a: &str, b: &str) -> Option<usize> {
        let (a, b) = ordered(a, b);
        self.cost.get(a).and_then(|m| m.get(b)).copied()
    }

    pub fn store_cost(&mut self, a: &str, b: &str, cost: usize) {
        let (a, b) = ordered(a, b);
        self.cost
            .entry(NodeId::new(a))
            .or_default()
            .insert(NodeId::new(b), cost);
    }

    pub fn invalid_pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.invalid
            .iter()
            .flat_map(|(a, s)| s.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    pub fn cost_entries(&self) -> Vec<((NodeId, NodeId), usize)> {
        self.cost
            .iter()
            .flat_map(|(a, m)| m.iter().map(move |(b, &c)| ((a.clone(), b.clone()), c)))
            .collect()
    }

    fn evict(&mut self, labels: &BTreeSet<&str>) {
        self.cost.retain(|a, _| !labels.contains(a.as_str()));
        for m in self.cost.values_mut() {
            m.retain(|b, _| !labels.contains(b.as_str()));
        }
        self.cost.retain(|_, m| !m.is_empty());
    }

    fn forget_invalid(&mut self, label: &str) {
        self.invalid.remove(label);
        for s in self.invalid.values_mut() {
            s.remove(label);
        }
        self.invalid.retain(|_, s| !s.is_empty());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CagresConfig {
    pub k: usize,
    pub seed: u64,
    pub use_cache: bool,
    pub use_preprocessing: bool,
    pub similarity: Option<SimilarityMatrix>,
}

impl CagresConfig {
    /// Caching and preprocessing on, no semantic constraint.
    pub fn new(k: usize, seed: u64) -> Self {
        CagresConfig {
            k,
            seed,
            use_cache: true,
            use_preprocessing: true,
            similarity: None,
        }
    }
}

/// Number of edges the canonical DAG gains when `a` and `b` are merged.
pub fn get_cost(h: &SummaryDag, a: &str, b: &str) -> Result<usize> {
    let (ai, bi) = distinct_clusters(h, a, b)?;
    if h.quotient().long_path_between(ai, bi) {
        return Err(Error::InvalidPair {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    Ok(cost_indices(h, ai, bi))
}

fn distinct_clusters(h: &SummaryDag, a: &str, b: &str) -> Result<(usize, usize)> {
    let ai = h.cluster_index(a)?;
    let bi = h.cluster_index(b)?;
    if ai == bi {
        return Err(Error::SameCluster(a.to_string()));
    }
    Ok((ai, bi))
}

pub(crate) fn cost_indices(h: &SummaryDag, a: usize, b: usize) -> usize {
    let q = h.quotient();
    let (sa, sb) = (h.cluster_size(a), h.cluster_size(b));
    // Size-weighted count of `xs` entries missing from `ys`, partners excluded.
    let only = |xs: &[usize], ys: &[usize]| -> usize {
        xs.iter()
            .filter(|&&x| x != a && x != b && ys.binary_search(&x).is_err())
            .map(|&x| h.cluster_size(x))
            .sum()
    };
    let mut cost = 0;
    if !q.has_index_edge(a, b) && !q.has_index_edge(b, a) {
        cost += sa * sb;
    }
    let (pa, pb) = (q.parent_indices(a), q.parent_indices(b));
    let (ca, cb) = (q.child_indices(a), q.child_indices(b));
    cost += only(pa, pb) * sb + only(pb, pa) * sa;
    cost += only(ca, cb) * sb + only(cb, ca) * sa;
    cost
}

/// Validity test shared by the summarizer and the preprocessing pass.
struct Validity<'a> {
    sim: Option<(&'a SimilarityMatrix, Vec<usize>)>,
}

impl<'a> Validity<'a> {
    fn new(g: &Dag, cfg: &'a CagresConfig) -> Result<Self> {
        let sim = match &cfg.similarity {
            Some(m) => Some((m, m.rows_for(g)?)),
            None => None,
        };
        Ok(Validity { sim })
    }

    fn similar_enough(&self, h: &SummaryDag, a: usize, b: usize) -> bool {
        let Some((m, rows)) = &self.sim else {
            return true;
        };
        h.member_indices(a).iter().all(|&u| {
            h.member_indices(b)
                .iter()
                .all(|&v| m.values[rows[u]][rows[v]] >= m.tau)
        })
    }

    /// Consults and fills the invalid-pair cache when `caches` is given;
    /// `reach` replaces the per-pair path search when present.
    fn check(
        &self,
        h: &SummaryDag,
        a: usize,
        b: usize,
        caches: Option<&mut CostCaches>,
        reach: Option<&LongPaths>,
    ) -> bool {
        let (la, lb) = (
            h.quotient().label(a).as_str(),
            h.quotient().label(b).as_str(),
        );
        if let Some(c) = &caches {
            if c.is_cached_invalid(la, lb) {
                return false;
            }
        }
        let cyclic = match reach {
            Some(r) => r.connected(a, b),
            None => h.quotient().long_path_between(a, b),
        };
        let valid = !cyclic && self.similar_enough(h, a, b);
        if !valid {
            if let Some(c) = caches {
                c.mark_invalid(la, lb);
            }
        }
        valid
    }
}

/// `false` when the pair is cached as invalid, would close a cycle, or
/// violates the similarity threshold. Invalid verdicts are cached.
pub fn is_valid_pair(
    h: &SummaryDag,
    a: &str,
    b: &str,
    cfg: &CagresConfig,
    caches: &mut CostCaches,
) -> Result<bool> {
    let (ai, bi) = distinct_clusters(h, a, b)?;
    let validity = Validity::new(h.base(), cfg)?;
    Ok(validity.check(h, ai, bi, Some(caches), None))
}

/// Evicts cached costs of every pair touching `merged` or a neighbour of
/// either merged cluster in `h`, the summary before the merge.
pub fn invalidate_neighbors(
    caches: &mut CostCaches,
    h: &SummaryDag,
    merged: (&str, &str),
) -> Result<()> {
    let (a, b) = distinct_clusters(h, merged.0, merged.1)?;
    evict_around(caches, h, a, b);
    Ok(())
}

fn evict_around(caches: &mut CostCaches, h: &SummaryDag, a: usize, b: usize) {
    let q = h.quotient();
    let mut labels: BTreeSet<&str> = BTreeSet::new();
    for c in [a, b] {
        labels.insert(q.label(c).as_str());
        for &n in q.parent_indices(c).iter().chain(q.child_indices(c)) {
            labels.insert(q.label(n).as_str());
        }
    }
    caches.evict(&labels);
}

/// Cluster indices sorted by label.
fn label_order(h: &SummaryDag) -> Vec<usize> {
    let q = h.quotient();
    let mut idx: Vec<usize> = (0..q.node_count()).collect();
    idx.sort_by(|&x, &y| q.label(x).cmp(q.label(y)));
    idx
}

/// Merges structurally cheap pairs up front: clusters with identical parent
/// and child sets, then adjacent clusters on non-branching chains. Stops at
/// `cfg.k` clusters or when nothing applies.
pub fn low_cost_merges(h: &SummaryDag, cfg: &CagresConfig) -> Result<SummaryDag> {
    let validity = Validity::new(h.base(), cfg)?;
    Ok(low_cost_pass(h.clone(), cfg.k, &validity, None))
}

fn low_cost_pass(
    mut h: SummaryDag,
    k: usize,
    validity: &Validity<'_>,
    mut caches: Option<&mut CostCaches>,
) -> SummaryDag {
    while h.cluster_count() > k {
        let Some((a, b)) = find_low_cost_pair(&h, validity, caches.as_deref_mut()) else {
            break;
        };
        if let Some(c) = caches.as_deref_mut() {
            evict_around(c, &h, a, b);
        }
        h = merge(&h, a, b, caches.as_deref_mut());
    }
    h
}

fn find_low_cost_pair(
    h: &SummaryDag,
    validity: &Validity<'_>,
    mut caches: Option<&mut CostCaches>,
) -> Option<(usize, usize)> {
    let q = h.quotient();
    let order = label_order(h);
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if q.parent_indices(a) == q.parent_indices(b)
                && q.child_indices(a) == q.child_indices(b)
                && validity.check(h, a, b, caches.as_deref_mut(), None)
            {
                return Some((a, b));
            }
        }
    }
    let thin = |c: usize| q.parent_indices(c).len() <= 1 && q.child_indices(c).len() <= 1;
    for &a in &order {
        if !thin(a) {
            continue;
        }
        for &b in q.child_indices(a) {
            if thin(b) && validity.check(h, a, b, caches.as_deref_mut(), None) {
                return Some((a, b));
            }
        }
    }
    None
}

fn merge(h: &SummaryDag, a: usize, b: usize, caches: Option<&mut CostCaches>) -> SummaryDag {
    let next = h.contract_unchecked(a, b);
    if let Some(c) = caches {
        // A fresh label may coincide with one retired earlier.
        let merged = next.quotient().label(next_index_of(h, &next, a)).as_str();
        c.forget_invalid(merged);
    }
    next
}

fn next_index_of(before: &SummaryDag, after: &SummaryDag, a: usize) -> usize {
    let first = before.member_indices(a)[0];
    let label = after
        .cluster_of(before.base().label(first).as_str())
        .expect("member survives the merge");
    after
        .quotient()
        .index_of(label.as_str())
        .expect("cluster exists")
}

/// Runs the greedy summarizer on `g` down to `cfg.k` clusters.
pub fn summarize(g: &Dag, cfg: &CagresConfig) -> Result<SummaryDag> {
    summarize_observed(g, cfg, |_, _| {})
}

/// [`summarize`] with a hook called before each merge with the current
/// summary and caches.
pub fn summarize_observed(
    g: &Dag,
    cfg: &CagresConfig,
    mut observe: impl FnMut(&SummaryDag, &CostCaches),
) -> Result<SummaryDag> {
    let n = g.node_count();
    if cfg.k < 1 || cfg.k > n {
        return Err(Error::InfeasibleK { k: cfg.k, n });
    }
    let validity = Validity::new(g, cfg)?;
    let mut caches = CostCaches::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut h = SummaryDag::trivial(g);
    if cfg.use_preprocessing {
        let c = cfg.use_cache.then_some(&mut caches);
        h = low_cost_pass(h, cfg.k, &validity, c);
    }
    while h.cluster_count() > cfg.k {
        observe(&h, &caches);
        let reach = cfg.use_cache.then(|| LongPaths::new(h.quotient()));
        let order = label_order(&h);
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, &a) in order.iter().enumerate() {
            for &b in &order[i + 1..] {
                let cache = cfg.use_cache.then_some(&mut caches);
                if !validity.check(&h, a, b, cache, reach.as_ref()) {
                    continue;
                }
                let cost = if cfg.use_cache {
                    let q = h.quotient();
                    let (la, lb) = (q.label(a).as_str(), q.label(b).as_str());
                    match caches.cached_cost(la, lb) {
                        Some(c) => c,
                        None => {
                            let c = cost_indices(&h, a, b);
                            caches.store_cost(la, lb, c);
                            c
                        }
                    }
                } else {
                    cost_indices(&h, a, b)
                };
                match best {
                    Some((_, _, min)) if cost > min => {}
                    Some((_, _, min)) if cost == min => {
                        if rng.gen_bool(0.5) {
                            best = Some((a, b, cost));
                        }
                    }
                    _ => best = Some((a, b, cost)),
                }
            }
        }
        let Some((a, b, _)) = best else {
            return Err(Error::Stuck {
                clusters: h.cluster_count(),
                k: cfg.k,
            });
        };
        if cfg.use_cache {
            evict_around(&mut caches, &h, a, b);
        }
        h = merge(&h, a, b, cfg.use_cache.then_some(&mut caches));
    }
    Ok(h)
}
