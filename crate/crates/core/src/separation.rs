//! d-separation on DAGs and s-separation on summary DAGs.
//!
//! [`d_separated`] is a reachability search over (node, direction) states.
//! [`d_separated_oracle`] walks every simple trail and applies the blocking
//! rules literally; it exists to cross-check the fast path on small graphs.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Dag, VarSet};
use crate::summary::SummaryDag;
use crate::{Error, Result};

/// Largest graph the trail-enumeration oracle accepts.
pub const ORACLE_NODE_LIMIT: usize = 12;

/// `x ⊥ y | z` over labels. `x` and `y` are non-empty, all three disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationQuery {
    pub x: VarSet,
    pub y: VarSet,
    pub z: VarSet,
}

impl SeparationQuery {
    pub fn new(x: VarSet, y: VarSet, z: VarSet) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptySet("x"));
        }
        if y.is_empty() {
            return Err(Error::EmptySet("y"));
        }
        for (a, b) in [(&x, &y), (&x, &z), (&y, &z)] {
            if let Some(id) = a.first_common(b) {
                return Err(Error::NotDisjoint(id.as_str().into()));
            }
        }
        Ok(SeparationQuery { x, y, z })
    }

    /// Shorthand for tests and fixtures: `SeparationQuery::of(["B"], ["C"], ["A"])`.
    pub fn of<X, Y, Z, S1, S2, S3>(x: X, y: Y, z: Z) -> Result<Self>
    where
        X: IntoIterator<Item = S1>,
        Y: IntoIterator<Item = S2>,
        Z: IntoIterator<Item = S3>,
        S1: AsRef<str>,
        S2: AsRef<str>,
        S3: AsRef<str>,
    {
        Self::new(VarSet::of(x), VarSet::of(y), VarSet::of(z))
    }

    pub fn swapped(&self) -> Self {
        SeparationQuery {
            x: self.y.clone(),
            y: self.x.clone(),
            z: self.z.clone(),
        }
    }
}

/// `true` iff every trail between `q.x` and `q.y` is blocked by `q.z`.
pub fn d_separated(g: &Dag, q: &SeparationQuery) -> Result<bool> {
    let x = g.require_all(&q.x)?;
    let y = g.require_all(&q.y)?;
    let z = g.require_all(&q.z)?;
    Ok(d_separated_indices(g, &x, &y, &z))
}

#[derive(Clone, Copy)]
enum Arrival {
    /// Entered the node from one of its children (or started there).
    FromChild = 0,
    /// Entered the node along an edge from one of its parents.
    FromParent = 1,
}

/// Index-level d-separation; callers guarantee disjoint, in-range sets.
pub(crate) fn d_separated_indices(g: &Dag, x: &[usize], y: &[usize], z: &[usize]) -> bool {
    let n = g.node_count();
    let mut in_z = vec![false; n];
    for &v in z {
        in_z[v] = true;
    }
    // Colliders are open iff they are in Z or have a descendant in Z.
    let mut opens_collider = g.ancestor_mask(z);
    for &v in z {
        opens_collider[v] = true;
    }
    let mut is_target = vec![false; n];
    for &v in y {
        is_target[v] = true;
    }

    let mut visited = vec![[false; 2]; n];
    let mut queue: Vec<(usize, Arrival)> = x.iter().map(|&v| (v, Arrival::FromChild)).collect();
    while let Some((v, arrival)) = queue.pop() {
        if core::mem::replace(&mut visited[v][arrival as usize], true) {
            continue;
        }
        if is_target[v] && !in_z[v] {
            return false;
        }
        match arrival {
            Arrival::FromChild => {
                if !in_z[v] {
                    queue.extend(g.parent_indices(v).iter().map(|&p| (p, Arrival::FromChild)));
                    queue.extend(g.child_indices(v).iter().map(|&c| (c, Arrival::FromParent)));
                }
            }
            Arrival::FromParent => {
                if !in_z[v] {
                    queue.extend(g.child_indices(v).iter().map(|&c| (c, Arrival::FromParent)));
                }
                if opens_collider[v] {
                    queue.extend(g.parent_indices(v).iter().map(|&p| (p, Arrival::FromChild)));
                }
            }
        }
    }
    true
}

/// Trail-enumeration d-separation for graphs with at most
/// [`ORACLE_NODE_LIMIT`] nodes.
///
/// Every simple trail starting in `x` is extended node by node; an interior
/// node is checked as soon as both of its trail neighbours are known, and a
/// trail that reaches `y` with all interior nodes active proves connection.
pub fn d_separated_oracle(g: &Dag, q: &SeparationQuery) -> Result<bool> {
    if g.node_count() > ORACLE_NODE_LIMIT {
        return Err(Error::SizeLimit {
            limit: ORACLE_NODE_LIMIT,
            actual: g.node_count(),
        });
    }
    let x = g.require_all(&q.x)?;
    let y = g.require_all(&q.y)?;
    let z = g.require_all(&q.z)?;
    let n = g.node_count();
    let mut in_z = vec![false; n];
    for &v in &z {
        in_z[v] = true;
    }
    let mut in_y = vec![false; n];
    for &v in &y {
        in_y[v] = true;
    }
    // Descendants computed per node by walking children, independent of the
    // ancestor closure used by the fast path.
    let has_descendant_in_z: Vec<bool> = (0..n)
        .map(|v| {
            let mut seen = vec![false; n];
            let mut stack = vec![v];
            while let Some(w) = stack.pop() {
                if in_z[w] {
                    return true;
                }
                if !core::mem::replace(&mut seen[w], true) {
                    stack.extend(g.child_indices(w).iter().copied());
                }
            }
            false
        })
        .collect();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut adj: Vec<usize> = g.parent_indices(v).to_vec();
            adj.extend_from_slice(g.child_indices(v));
            adj
        })
        .collect();

    let interior_active = |prev: usize, mid: usize, next: usize| -> bool {
        let collider = g.has_index_edge(prev, mid) && g.has_index_edge(next, mid);
        if collider {
            has_descendant_in_z[mid]
        } else {
            !in_z[mid]
        }
    };

    fn extend(
        trail: &mut Vec<usize>,
        on_trail: &mut [bool],
        neighbours: &[Vec<usize>],
        in_y: &[bool],
        interior_active: &dyn Fn(usize, usize, usize) -> bool,
    ) -> bool {
        let last = *trail.last().unwrap();
        for &next in &neighbours[last] {
            if on_trail[next] {
                continue;
            }
            if trail.len() >= 2 && !interior_active(trail[trail.len() - 2], last, next) {
                continue;
            }
            if in_y[next] {
                return true;
            }
            trail.push(next);
            on_trail[next] = true;
            let found = extend(trail, on_trail, neighbours, in_y, interior_active);
            on_trail[next] = false;
            trail.pop();
            if found {
                return true;
            }
        }
        false
    }

    for &start in &x {
        let mut trail = vec![start];
        let mut on_trail = vec![false; n];
        on_trail[start] = true;
        if extend(
            &mut trail,
            &mut on_trail,
            &neighbours,
            &in_y,
            &interior_active,
        ) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// s-separation: `q` names clusters of `h`. The clusters are grounded to
/// their member variables and d-separation is decided on the canonical DAG.
pub fn s_separated(h: &SummaryDag, q: &SeparationQuery) -> Result<bool> {
    let grounded = SeparationQuery {
        x: h.ground(&q.x)?,
        y: h.ground(&q.y)?,
        z: h.ground(&q.z)?,
    };
    d_separated(&h.canonical(), &grounded)
}
