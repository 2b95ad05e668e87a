//! Instance generation, baselines and quality metrics for evaluating
//! summaries.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::docalc::adjustment_set;
use crate::graph::{Dag, LongPaths, NodeId};
use crate::separation::{d_separated, SeparationQuery};
use crate::summary::SummaryDag;
use crate::{Error, Result};

/// Largest base graph the exhaustive baseline accepts.
pub const BRUTE_FORCE_NODE_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    /// Probability of each forward pair becoming an edge.
    pub density: f64,
    pub seed: u64,
}

/// Labels `X00`, `X01`, ... wide enough for `n` nodes.
pub fn node_labels(n: usize) -> Vec<NodeId> {
    let width = alloc::format!("{}", n.saturating_sub(1)).len().max(2);
    (0..n)
        .map(|i| NodeId::new(alloc::format!("X{i:0width$}")))
        .collect()
}

/// Random DAG: a uniformly shuffled order, then every forward pair kept
/// with probability `density`.
pub fn gen_random_dag(spec: &GenSpec) -> Result<Dag> {
    if spec.n == 0 {
        return Err(Error::InvalidSpec("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(Error::InvalidSpec(alloc::format!(
            "density {} is outside [0, 1]",
            spec.density
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..spec.n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            if rng.gen_bool(spec.density) {
                edges.push((order[i], order[j]));
            }
        }
    }
    edges.sort_unstable();
    Dag::from_index_edges(node_labels(spec.n), &edges)
}

/// Exhaustive baseline: the partition into at most `k` clusters with an
/// acyclic quotient that adds the fewest canonical edges.
///
/// Partitions are enumerated as restricted-growth strings over the base
/// topological order. Ties prefer more clusters, then the lexicographically
/// smallest string, so `k = n` yields the trivial summary.
pub fn brute_force_summarize(g: &Dag, k: usize) -> Result<SummaryDag> {
    let n = g.node_count();
    if n > BRUTE_FORCE_NODE_LIMIT {
        return Err(Error::SizeLimit {
            limit: BRUTE_FORCE_NODE_LIMIT,
            actual: n,
        });
    }
    if k < 1 || k > n {
        return Err(Error::InfeasibleK { k, n });
    }
    let order = g.topological_indices();
    let mut pos = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    // Edges as order positions; the head always comes later, so sorting by
    // head lets a prefix of the string be checked as soon as it is complete.
    let mut edges: Vec<(usize, usize)> = g.index_edges().map(|(t, h)| (pos[t], pos[h])).collect();
    edges.sort_by_key(|&(t, h)| (h, t));
    let mut search = RgsSearch {
        n,
        k,
        edges,
        rgs: vec![0; n],
        best: None,
        base_edges: g.edge_count(),
    };
    search.descend(0, 0);
    let (_, _, rgs) = search
        .best
        .expect("the trivial partition is always admissible");
    let blocks_n = rgs.iter().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); blocks_n];
    for (p, &b) in rgs.iter().enumerate() {
        blocks[b].push(order[p]);
    }
    SummaryDag::from_blocks(Arc::new(g.clone()), order, blocks)
}

struct RgsSearch {
    n: usize,
    k: usize,
    /// `(tail, head)` positions sorted by head.
    edges: Vec<(usize, usize)>,
    rgs: Vec<usize>,
    /// (additional edges, cluster count, string)
    best: Option<(usize, usize, Vec<usize>)>,
    base_edges: usize,
}

impl RgsSearch {
    fn descend(&mut self, p: usize, blocks: usize) {
        if p == self.n {
            self.score(blocks);
            return;
        }
        let limit = (blocks + 1).min(self.k);
        for b in 0..limit {
            self.rgs[p] = b;
            let used = blocks.max(b + 1);
            if self.prefix_acyclic(p, used) {
                self.descend(p + 1, used);
            }
        }
    }

    /// The quotient over positions `0..=p` has no cycle. A cycle can only
    /// appear once an edge into `p` is placed.
    fn prefix_acyclic(&self, p: usize, blocks: usize) -> bool {
        if !self.edges.iter().any(|&(_, h)| h == p) {
            return true;
        }
        let mut adj = vec![0u64; blocks];
        for &(t, h) in self.edges.iter().take_while(|&&(_, h)| h <= p) {
            let (bt, bh) = (self.rgs[t], self.rgs[h]);
            if bt != bh {
                adj[bt] |= 1 << bh;
            }
        }
        acyclic(&adj)
    }

    fn score(&mut self, blocks: usize) {
        let mut size = vec![0usize; blocks];
        for &b in &self.rgs {
            size[b] += 1;
        }
        let mut qedges = BTreeSet::new();
        for &(t, h) in &self.edges {
            let (bt, bh) = (self.rgs[t], self.rgs[h]);
            if bt != bh {
                qedges.insert((bt, bh));
            }
        }
        let clique: usize = size.iter().map(|s| s * (s - 1) / 2).sum();
        let bipartite: usize = qedges.iter().map(|&(a, b)| size[a] * size[b]).sum();
        let added = clique + bipartite - self.base_edges;
        let better = match &self.best {
            None => true,
            Some((e, c, _)) => added < *e || (added == *e && blocks > *c),
        };
        if better {
            self.best = Some((added, blocks, self.rgs.clone()));
        }
    }
}

fn acyclic(adj: &[u64]) -> bool {
    let n = adj.len();
    let mut indeg = vec![0; n];
    for a in adj {
        for (h, d) in indeg.iter_mut().enumerate() {
            if a >> h & 1 == 1 {
                *d += 1;
            }
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for (h, d) in indeg.iter_mut().enumerate() {
            if adj[v] >> h & 1 == 1 {
                *d -= 1;
                if *d == 0 {
                    ready.push(h);
                }
            }
        }
    }
    seen == n
}

/// Random baseline: contracts a uniformly chosen valid pair until `k`
/// clusters remain.
pub fn random_summarize(g: &Dag, k: usize, seed: u64) -> Result<SummaryDag> {
    let n = g.node_count();
    if k < 1 || k > n {
        return Err(Error::InfeasibleK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = SummaryDag::trivial(g);
    while h.cluster_count() > k {
        let q = h.quotient();
        let reach = LongPaths::new(q);
        let mut order: Vec<usize> = (0..q.node_count()).collect();
        order.sort_by(|&x, &y| q.label(x).cmp(q.label(y)));
        let mut pairs = Vec::new();
        for (i, &a) in order.iter().enumerate() {
            for &b in &order[i + 1..] {
                if !reach.connected(a, b) {
                    pairs.push((a, b));
                }
            }
        }
        if pairs.is_empty() {
            return Err(Error::Stuck {
                clusters: h.cluster_count(),
                k,
            });
        }
        let (a, b) = pairs[rng.gen_range(0..pairs.len())];
        h = h.contract_unchecked(a, b);
    }
    Ok(h)
}

/// Percentage of the grounded recursive-basis statements of `b` that are
/// d-separations in the canonical DAG of `a`. An empty basis counts as
/// fully implied.
pub fn implication_percentage(a: &SummaryDag, b: &SummaryDag) -> Result<f64> {
    if a.base() != b.base() {
        return Err(Error::UniverseMismatch(
            "summaries have different base graphs".into(),
        ));
    }
    let statements = b.grounded_recursive_basis();
    if statements.is_empty() {
        return Ok(100.0);
    }
    let canonical = a.canonical();
    let mut implied = 0;
    for s in &statements {
        let q = SeparationQuery::new(s.x.clone(), s.y.clone(), s.z.clone())?;
        if d_separated(&canonical, &q)? {
            implied += 1;
        }
    }
    Ok(100.0 * implied as f64 / statements.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub implied_a_by_b: f64,
    pub implied_b_by_a: f64,
    pub additional_edges_a: usize,
    pub additional_edges_b: usize,
}

/// `implied_a_by_b` is the share of `a`'s basis implied by `b`'s canonical
/// DAG, and the other way round.
pub fn compare(a: &SummaryDag, b: &SummaryDag) -> Result<ComparisonReport> {
    Ok(ComparisonReport {
        implied_a_by_b: implication_percentage(b, a)?,
        implied_b_by_a: implication_percentage(a, b)?,
        additional_edges_a: a.additional_edges(),
        additional_edges_b: b.additional_edges(),
    })
}

/// Removes `remove` random edges, then adds `add` random forward non-edges
/// with respect to the topological order of what is left.
pub fn perturb(g: &Dag, add: usize, remove: usize, seed: u64) -> Result<Dag> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = g.index_edges().collect();
    if remove > edges.len() {
        return Err(Error::InfeasiblePerturbation(alloc::format!(
            "cannot remove {remove} of {} edges",
            edges.len()
        )));
    }
    let mut drop = vec![false; edges.len()];
    for i in sample(&mut rng, edges.len(), remove) {
        drop[i] = true;
    }
    let kept: Vec<(usize, usize)> = edges
        .iter()
        .zip(&drop)
        .filter(|(_, &d)| !d)
        .map(|(&e, _)| e)
        .collect();
    let reduced = Dag::from_index_edges(g.nodes().to_vec(), &kept)?;
    let order = reduced.topological_indices();
    let mut candidates = Vec::new();
    for (i, &u) in order.iter().enumerate() {
        for &v in &order[i + 1..] {
            if !reduced.has_index_edge(u, v) {
                candidates.push((u, v));
            }
        }
    }
    if add > candidates.len() {
        return Err(Error::InfeasiblePerturbation(alloc::format!(
            "only {} edges can be added, {add} requested",
            candidates.len()
        )));
    }
    let mut all = kept;
    all.extend(
        sample(&mut rng, candidates.len(), add)
            .into_iter()
            .map(|i| candidates[i]),
    );
    all.sort_unstable();
    Dag::from_index_edges(g.nodes().to_vec(), &all)
}

/// Mean adjustment-set size over ordered pairs `(t, o)` where `o` is a
/// proper descendant of `t` in the base, or `None` when there is no such
/// pair.
pub fn mean_adjustment_set_size(h: &SummaryDag) -> Result<Option<f64>> {
    let g = h.base();
    let mut total = 0usize;
    let mut pairs = 0usize;
    for t in 0..g.node_count() {
        let below = g.descendant_mask(&[t]);
        for o in (0..g.node_count()).filter(|&o| o != t && below[o]) {
            total += adjustment_set(h, g.label(t).as_str(), g.label(o).as_str())?.len();
            pairs += 1;
        }
    }
    Ok((pairs > 0).then(|| total as f64 / pairs as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::g1;
    use crate::summary::tests::{h1, h2, h3};

    #[test]
    fn generator_extremes() {
        let g = gen_random_dag(&GenSpec {
            n: 1,
            density: 0.7,
            seed: 1,
        })
        .unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
        let g = gen_random_dag(&GenSpec {
            n: 5,
            density: 1.0,
            seed: 1,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 10);
        let g = gen_random_dag(&GenSpec {
            n: 9,
            density: 0.0,
            seed: 1,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 0);
        let spec = GenSpec {
            n: 30,
            density: 0.3,
            seed: 11,
        };
        let a = gen_random_dag(&spec).unwrap();
        assert_eq!(a, gen_random_dag(&spec).unwrap());
        assert!(a.edge_count() <= 435);
        assert_eq!(a.nodes()[0].as_str(), "X00");
        assert!(gen_random_dag(&GenSpec {
            n: 0,
            density: 0.5,
            seed: 0
        })
        .is_err());
    }

    #[test]
    fn brute_force_on_g1() {
        let g = g1();
        assert_eq!(brute_force_summarize(&g, 4).unwrap().additional_edges(), 1);
        let t = brute_force_summarize(&g, 5).unwrap();
        assert_eq!(t, SummaryDag::trivial(&g));
        let three = brute_force_summarize(&g, 3).unwrap();
        assert!(three.cluster_count() <= 3);
        assert!(three.additional_edges() <= h3().additional_edges());
        assert!(three.is_compatible(&g).unwrap());
    }

    #[test]
    fn brute_force_guards() {
        let g = gen_random_dag(&GenSpec {
            n: 11,
            density: 0.2,
            seed: 0,
        })
        .unwrap();
        assert_eq!(
            brute_force_summarize(&g, 3),
            Err(Error::SizeLimit {
                limit: 10,
                actual: 11
            })
        );
        assert_eq!(
            brute_force_summarize(&g1(), 0),
            Err(Error::InfeasibleK { k: 0, n: 5 })
        );
    }

    #[test]
    fn random_baseline() {
        let g = g1();
        assert_eq!(random_summarize(&g, 5, 9).unwrap(), SummaryDag::trivial(&g));
        for seed in 0..20 {
            let h = random_summarize(&g, 4, seed).unwrap();
            assert_eq!(h.cluster_count(), 4);
            assert!(h.is_compatible(&g).unwrap());
            let one = random_summarize(&g, 1, seed).unwrap();
            assert_eq!(one.cluster_count(), 1);
        }
    }

    #[test]
    fn implication_on_g1_family() {
        let trivial = SummaryDag::trivial(&g1());
        for h in [h1(), h2(), h3(), trivial.clone()] {
            assert_eq!(implication_percentage(&h, &h).unwrap(), 100.0);
        }
        assert_eq!(implication_percentage(&trivial, &h2()).unwrap(), 100.0);
        assert_eq!(implication_percentage(&h2(), &h1()).unwrap(), 0.0);
        assert_eq!(implication_percentage(&h1(), &h2()).unwrap(), 100.0);
        let other = SummaryDag::trivial(&Dag::from_edges([("A", "B")]).unwrap());
        assert!(matches!(
            implication_percentage(&other, &h1()),
            Err(Error::UniverseMismatch(_))
        ));
    }

    #[test]
    fn perturbation() {
        let g = g1();
        assert_eq!(perturb(&g, 0, 0, 4).unwrap(), g);
        for seed in 0..10 {
            let p = perturb(&g, 1, 0, seed).unwrap();
            assert_eq!(p.edge_count(), 6);
            assert_eq!(p.node_set(), g.node_set());
            let p = perturb(&g, 2, 2, seed).unwrap();
            assert_eq!(p.edge_count(), 5);
        }
        assert!(matches!(
            perturb(&g, 0, 6, 0),
            Err(Error::InfeasiblePerturbation(_))
        ));
        assert!(matches!(
            perturb(&g, 6, 0, 0),
            Err(Error::InfeasiblePerturbation(_))
        ));
        assert_eq!(perturb(&g, 3, 1, 5).unwrap(), perturb(&g, 3, 1, 5).unwrap());
    }

    #[test]
    fn adjustment_proxy() {
        let trivial = SummaryDag::trivial(&g1());
        let m = mean_adjustment_set_size(&trivial).unwrap().unwrap();
        assert!(m > 0.0);
        let lonely =
            SummaryDag::trivial(&Dag::new(["P"], core::iter::empty::<(&str, &str)>()).unwrap());
        assert_eq!(mean_adjustment_set_size(&lonely).unwrap(), None);
    }
}
