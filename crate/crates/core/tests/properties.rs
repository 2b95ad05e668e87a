use cagres_core::bench::{
    brute_force_summarize, gen_random_dag, implication_percentage, perturb, random_summarize,
    GenSpec,
};
use cagres_core::docalc::{rule_witness, DoQuery, Rule, ZwAncestors};
use cagres_core::greedy::get_cost;
use cagres_core::summary::mutilate;
use cagres_core::{
    d_separated, d_separated_oracle, s_separated, summarize, CagresConfig, Dag, Error, NodeId,
    SeparationQuery, SummaryDag, VarSet,
};
use proptest::prelude::*;

fn dag(n: usize, density: f64, seed: u64) -> Dag {
    gen_random_dag(&GenSpec { n, density, seed }).unwrap()
}

fn arb_dag(max_n: usize) -> impl Strategy<Value = Dag> {
    (1..=max_n, 0.0..=1.0f64, any::<u64>()).prop_map(|(n, d, s)| dag(n, d, s))
}

/// Picks three disjoint subsets from a bitmask triple.
fn split(nodes: &[NodeId], xm: u32, ym: u32, zm: u32) -> Option<SeparationQuery> {
    let mut x = VarSet::new();
    let mut y = VarSet::new();
    let mut z = VarSet::new();
    for (i, id) in nodes.iter().enumerate() {
        let bit = 1 << i;
        if xm & bit != 0 {
            x.insert(id.clone());
        } else if ym & bit != 0 {
            y.insert(id.clone());
        } else if zm & bit != 0 {
            z.insert(id.clone());
        }
    }
    SeparationQuery::new(x, y, z).ok()
}

/// Merges the clusters holding `u` and `v` by brute force and reports
/// whether the resulting quotient is cyclic.
fn merge_is_cyclic(h: &SummaryDag, a: &NodeId, b: &NodeId) -> bool {
    let mut blocks: Vec<Vec<NodeId>> = Vec::new();
    let mut merged = Vec::new();
    for (label, members) in h.clusters() {
        if &label == a || &label == b {
            merged.extend(members);
        } else {
            blocks.push(members);
        }
    }
    blocks.push(merged);
    let owner = |v: &NodeId| blocks.iter().position(|blk| blk.contains(v)).unwrap();
    let mut adj = vec![Vec::new(); blocks.len()];
    for (t, hd) in h.base().edges() {
        let (p, q) = (owner(t), owner(hd));
        if p != q {
            adj[p].push(q);
        }
    }
    // Colour-based DFS cycle search.
    fn visit(v: usize, adj: &[Vec<usize>], colour: &mut [u8]) -> bool {
        colour[v] = 1;
        for &w in &adj[v] {
            if colour[w] == 1 || (colour[w] == 0 && visit(w, adj, colour)) {
                return true;
            }
        }
        colour[v] = 2;
        false
    }
    let mut colour = vec![0u8; blocks.len()];
    (0..blocks.len()).any(|v| colour[v] == 0 && visit(v, &adj, &mut colour))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn fast_d_separation_agrees_with_oracle(g in arb_dag(8), xm in any::<u32>(), ym in any::<u32>(), zm in any::<u32>()) {
        if let Some(q) = split(g.nodes(), xm, ym, zm) {
            prop_assert_eq!(d_separated(&g, &q).unwrap(), d_separated_oracle(&g, &q).unwrap());
            prop_assert_eq!(d_separated(&g, &q).unwrap(), d_separated(&g, &q.swapped()).unwrap());
        }
    }

    #[test]
    fn cost_is_the_canonical_delta(g in arb_dag(8), k_frac in 0.0..1.0f64, seed in any::<u64>()) {
        let k = 1 + ((g.node_count() - 1) as f64 * k_frac) as usize;
        let h = random_summarize(&g, k, seed).unwrap();
        let before = h.canonical().edge_count();
        let labels: Vec<NodeId> = h.quotient().nodes().to_vec();
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                match h.contract(a.as_str(), b.as_str()) {
                    Ok(next) => {
                        let delta = next.canonical().edge_count() - before;
                        prop_assert_eq!(get_cost(&h, a.as_str(), b.as_str()).unwrap(), delta);
                    }
                    Err(Error::ContractionCycle { .. }) => {
                        let is_invalid_pair = matches!(
                            get_cost(&h, a.as_str(), b.as_str()),
                            Err(Error::InvalidPair { .. })
                        );
                        prop_assert!(is_invalid_pair);
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn contraction_cycles_match_brute_force(g in arb_dag(6), seed in any::<u64>()) {
        let h = random_summarize(&g, g.node_count().div_ceil(2).max(1), seed).unwrap();
        let labels: Vec<NodeId> = h.quotient().nodes().to_vec();
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                let refused = h.contract(a.as_str(), b.as_str()).is_err();
                prop_assert_eq!(refused, merge_is_cyclic(&h, a, b));
            }
        }
    }

    #[test]
    fn summaries_are_valid_and_deterministic(g in arb_dag(12), k_frac in 0.0..1.0f64, seed in any::<u64>(), cache in any::<bool>(), pre in any::<bool>()) {
        let k = 1 + ((g.node_count() - 1) as f64 * k_frac) as usize;
        let cfg = CagresConfig { use_cache: cache, use_preprocessing: pre, ..CagresConfig::new(k, seed) };
        let h = summarize(&g, &cfg).unwrap();
        prop_assert_eq!(h.cluster_count(), k);
        h.validate().unwrap();
        prop_assert!(h.is_compatible(&g).unwrap());
        prop_assert!(g.is_subgraph_of(&h.canonical()));
        prop_assert_eq!(&h, &summarize(&g, &cfg).unwrap());
        let flipped = CagresConfig { use_cache: !cache, ..cfg };
        prop_assert_eq!(h, summarize(&g, &flipped).unwrap());
    }

    #[test]
    fn recursive_basis_holds_and_transfers_to_the_base(g in arb_dag(7), k_frac in 0.0..1.0f64, seed in any::<u64>()) {
        let k = 1 + ((g.node_count() - 1) as f64 * k_frac) as usize;
        let h = random_summarize(&g, k, seed).unwrap();
        let c = h.canonical();
        for s in h.grounded_recursive_basis() {
            let q = SeparationQuery::new(s.x, s.y, s.z).unwrap();
            prop_assert!(d_separated(&c, &q).unwrap());
            prop_assert!(d_separated(&g, &q).unwrap());
        }
    }

    #[test]
    fn s_separation_holds_in_every_compatible_dag(g in arb_dag(5), seed in any::<u64>(), xm in any::<u32>(), ym in any::<u32>(), zm in any::<u32>()) {
        let h = random_summarize(&g, g.node_count().div_ceil(2), seed).unwrap();
        let Some(q) = split(h.quotient().nodes(), xm, ym, zm) else { return Ok(()); };
        if !s_separated(&h, &q).unwrap() {
            return Ok(());
        }
        let grounded = SeparationQuery::new(
            h.ground(&q.x).unwrap(), h.ground(&q.y).unwrap(), h.ground(&q.z).unwrap(),
        ).unwrap();
        for other in compatible_dags(&h) {
            prop_assert!(d_separated(&other, &grounded).unwrap());
        }
    }

    #[test]
    fn greedy_never_beats_exhaustive(g in arb_dag(7), seed in any::<u64>()) {
        let k = g.node_count().div_ceil(2);
        let exact = brute_force_summarize(&g, k).unwrap();
        let greedy = summarize(&g, &CagresConfig::new(k, seed)).unwrap();
        prop_assert!(exact.additional_edges() <= greedy.additional_edges());
        prop_assert!(exact.is_compatible(&g).unwrap());
    }

    #[test]
    fn implication_is_reflexive_and_monotone_under_refinement(g in arb_dag(7), seed in any::<u64>(), coarse_seed in any::<u64>()) {
        let n = g.node_count();
        let fine = random_summarize(&g, n.div_ceil(2), seed).unwrap();
        prop_assert_eq!(implication_percentage(&fine, &fine).unwrap(), 100.0);
        // Coarsen `fine` further by contracting random valid pairs.
        let mut coarse = fine.clone();
        let mut state = coarse_seed;
        while coarse.cluster_count() > 1 {
            let labels: Vec<NodeId> = coarse.quotient().nodes().to_vec();
            let pairs: Vec<(NodeId, NodeId)> = labels.iter().enumerate()
                .flat_map(|(i, a)| labels[i + 1..].iter().map(move |b| (a.clone(), b.clone())))
                .filter(|(a, b)| coarse.contract(a.as_str(), b.as_str()).is_ok())
                .collect();
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let (a, b) = &pairs[(state >> 33) as usize % pairs.len()];
            coarse = coarse.contract(a.as_str(), b.as_str()).unwrap();
            if state % 3 == 0 {
                break;
            }
        }
        let fc = fine.canonical();
        for s in coarse.grounded_recursive_basis() {
            let q = SeparationQuery::new(s.x, s.y, s.z).unwrap();
            prop_assert!(d_separated(&fc, &q).unwrap());
        }
        prop_assert_eq!(implication_percentage(&fine, &coarse).unwrap(), 100.0);
    }

    #[test]
    fn perturbation_keeps_nodes_and_acyclicity(g in arb_dag(10), add in 0usize..4, remove in 0usize..4, seed in any::<u64>()) {
        match perturb(&g, add, remove, seed) {
            Ok(p) => {
                prop_assert_eq!(p.node_set(), g.node_set());
                prop_assert_eq!(p.edge_count(), g.edge_count() + add - remove);
                prop_assert!(p.is_topological_order(&p.topological_order()));
            }
            Err(Error::InfeasiblePerturbation(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn do_calculus_conditions_transfer_to_the_base(g in arb_dag(7), seed in any::<u64>(), masks in any::<[u32; 4]>(), rule in 0usize..3) {
        let h = random_summarize(&g, g.node_count().div_ceil(2), seed).unwrap();
        let labels = h.quotient().nodes();
        let mut sets = [VarSet::new(), VarSet::new(), VarSet::new(), VarSet::new()];
        for (i, id) in labels.iter().enumerate() {
            if let Some(s) = masks.iter().position(|m| m & (1 << i) != 0) {
                sets[s].insert(id.clone());
            }
        }
        let [x, y, z, w] = sets;
        let Ok(q) = DoQuery::new(x, y, z, w) else { return Ok(()); };
        let rule = [Rule::R1, Rule::R2, Rule::R3][rule];
        let wit = rule_witness(&h, rule, &q, ZwAncestors::MutilatedX).unwrap();
        if !wit.separated {
            return Ok(());
        }
        let ground = |s: &VarSet| h.ground(s).unwrap();
        let mg = mutilate(&g, &ground(&wit.bar), &ground(&wit.under)).unwrap();
        let sq = SeparationQuery::new(ground(&q.y), ground(&q.z), ground(&q.x.union(&q.w))).unwrap();
        prop_assert!(d_separated(&mg, &sq).unwrap());
    }
}

/// Every DAG compatible with `h`: each within-cluster pair absent or in
/// either direction, each member pair along a quotient edge absent or
/// forward, cyclic choices dropped. Small summaries only.
fn compatible_dags(h: &SummaryDag) -> Vec<Dag> {
    let base = h.base();
    let mut within = Vec::new();
    for (_, members) in h.clusters() {
        for (i, u) in members.iter().enumerate() {
            for v in &members[i + 1..] {
                within.push((u.clone(), v.clone()));
            }
        }
    }
    let mut across = Vec::new();
    for (p, q) in h.quotient().edges() {
        for u in h.members_of(p.as_str()).unwrap().iter() {
            for v in h.members_of(q.as_str()).unwrap().iter() {
                across.push((u.clone(), v.clone()));
            }
        }
    }
    let combos = 3usize.pow(within.len() as u32) << across.len();
    assert!(combos <= 1 << 14, "enumeration too large: {combos}");
    let mut out = Vec::new();
    for code in 0..combos {
        let mut c = code;
        let mut edges = Vec::new();
        for (u, v) in &within {
            match c % 3 {
                1 => edges.push((u.clone(), v.clone())),
                2 => edges.push((v.clone(), u.clone())),
                _ => {}
            }
            c /= 3;
        }
        for (u, v) in &across {
            if c & 1 == 1 {
                edges.push((u.clone(), v.clone()));
            }
            c >>= 1;
        }
        if let Ok(d) = Dag::new(base.nodes().iter().cloned(), edges) {
            debug_assert!(h.is_compatible(&d).unwrap());
            out.push(d);
        }
    }
    out
}

#[test]
fn compatible_enumeration_contains_the_base() {
    let g = dag(5, 0.5, 3);
    let h = random_summarize(&g, 3, 1).unwrap();
    let all = compatible_dags(&h);
    assert!(all.contains(&g));
    assert!(all.contains(&h.canonical()));
}
