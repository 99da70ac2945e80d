//! Fuel-bounded extraction guided by precomputed proof-size estimates.
//!
//! [`estimate_sizes`] computes, for every congruence justification pair, the
//! tree size of its baseline (forest-path) proof — without building any
//! certificates. [`greedy_proof`] then runs one least-weight search per pair
//! it actually needs, weighing congruence edges by those estimates, and
//! spends one unit of fuel for each new child pair a chosen path drags in.
//! When the budget runs out the whole goal falls back to the baseline proof.

use std::collections::{HashMap, HashSet, VecDeque};

use super::{basic, finish, norm, reverse_walk, steps_for};
use crate::cert::{CertPath, ProofCert};
use crate::engine::{EdgeId, EngineError, Justification, OrientedEdge, Snapshot, VertexId};

pub const DEFAULT_FUEL: u64 = 10;

type Pair = (VertexId, VertexId);

/// Baseline proof tree size for every congruence justification pair.
///
/// Costs accumulate along the reduced forest: an axiom edge costs one, a
/// congruence edge costs its own pair's estimate. Each vertex keeps a
/// pointer to some forest ancestor together with the cost of the walk up to
/// it; pointers compress as queries climb, so repeated queries stay cheap.
/// A vertex whose parent edge is a congruence edge stays detached until
/// that edge's cost is known — edges are processed in creation order, and a
/// pair's forest path only crosses edges older than the pair's edge, so
/// every climb sees fully costed pointers.
pub fn estimate_sizes(snap: &Snapshot) -> HashMap<Pair, u64> {
    let n = snap.vertex_count();

    // Distinct pairs, and the static lowest common ancestors for all of
    // them, computed offline in one forest traversal.
    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for &e in snap.congruence_edges() {
        let (l, r) = snap.edge(e).congruence_children().expect("congruence edge");
        let p = norm(l, r);
        if seen.insert(p) {
            pairs.push(p);
        }
    }
    let lca = offline_lca(snap, &pairs);
    let lca_of: HashMap<Pair, VertexId> =
        pairs.iter().copied().zip(lca).collect();

    // Ancestor pointers: axiom-edge steps are costed immediately,
    // congruence-edge steps activate once their pair is estimated.
    let mut parent: Vec<VertexId> = (0..n).map(|i| VertexId(i as u32)).collect();
    let mut size: Vec<u64> = vec![0; n];
    for v in 0..n {
        if let Some((p, e)) = snap.forest_parent(VertexId(v as u32)) {
            if !snap.edge(e).is_congruence() {
                parent[v] = p;
                size[v] = 1;
            }
        }
    }

    let mut est = HashMap::new();
    for &e in snap.congruence_edges() {
        let (l, r) = snap.edge(e).congruence_children().expect("congruence edge");
        let p = norm(l, r);
        let cost = match est.get(&p) {
            Some(&c) => c,
            None => {
                let anc = lca_of[&p];
                let ta = compress(p.0, &mut parent, &mut size);
                let tb = compress(p.1, &mut parent, &mut size);
                let tl = compress(anc, &mut parent, &mut size);
                // All three climbs stop at the first ancestor of the pair's
                // lca whose parent edge is still uncosted (or the root):
                // everything below the lca is older than this edge, hence
                // already costed, and compressed pointers never jump across
                // a detached vertex.
                assert!(ta == tb && tb == tl, "ancestor structure out of sync");
                let c = size[p.0.idx()] + size[p.1.idx()] - 2 * size[anc.idx()];
                est.insert(p, c);
                c
            }
        };
        // If this edge is in the forest, its lower endpoint now has a
        // costed step to its parent.
        for v in [snap.edge(e).a, snap.edge(e).b] {
            if let Some((par, pe)) = snap.forest_parent(v) {
                if pe == e {
                    parent[v.idx()] = par;
                    size[v.idx()] = cost;
                }
            }
        }
    }
    est
}

/// Re-point every vertex on the chain from `v` at the chain's current top,
/// accumulating walk costs; returns the top.
fn compress(v: VertexId, parent: &mut [VertexId], size: &mut [u64]) -> VertexId {
    let mut chain = Vec::new();
    let mut cur = v;
    while parent[cur.idx()] != cur {
        chain.push(cur);
        cur = parent[cur.idx()];
    }
    let top = cur;
    for &node in chain.iter().rev() {
        let p = parent[node.idx()];
        if p != top {
            size[node.idx()] += size[p.idx()];
            parent[node.idx()] = top;
        }
    }
    top
}

/// Lowest common ancestors in the reduced forest for a batch of same-class
/// vertex pairs, via one post-order traversal with a union-find.
fn offline_lca(snap: &Snapshot, pairs: &[Pair]) -> Vec<VertexId> {
    let n = snap.vertex_count();
    let mut children: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for v in 0..n {
        let v = VertexId(v as u32);
        match snap.forest_parent(v) {
            Some((p, _)) => children[p.idx()].push(v),
            None => roots.push(v),
        }
    }
    let mut queries_at: Vec<Vec<(VertexId, usize)>> = vec![Vec::new(); n];
    for (qi, &(a, b)) in pairs.iter().enumerate() {
        queries_at[a.idx()].push((b, qi));
        queries_at[b.idx()].push((a, qi));
    }

    let mut uf: Vec<u32> = (0..n as u32).collect();
    fn find(uf: &mut [u32], v: u32) -> u32 {
        let mut root = v;
        while uf[root as usize] != root {
            root = uf[root as usize];
        }
        let mut cur = v;
        while uf[cur as usize] != root {
            let next = uf[cur as usize];
            uf[cur as usize] = root;
            cur = next;
        }
        root
    }

    let mut ancestor: Vec<VertexId> = (0..n).map(|i| VertexId(i as u32)).collect();
    let mut visited = vec![false; n];
    let mut answers = vec![VertexId(0); pairs.len()];
    for root in roots {
        let mut stack: Vec<(VertexId, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut ci)) = stack.last_mut() {
            if *ci < children[v.idx()].len() {
                let c = children[v.idx()][*ci];
                *ci += 1;
                stack.push((c, 0));
                continue;
            }
            visited[v.idx()] = true;
            for &(u, qi) in &queries_at[v.idx()] {
                if visited[u.idx()] {
                    answers[qi] = ancestor[find(&mut uf, u.0) as usize];
                }
            }
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                // Absorb the finished subtree into the parent's set.
                let rv = find(&mut uf, v.0);
                uf[rv as usize] = p.0;
                ancestor[find(&mut uf, p.0) as usize] = p;
            }
        }
    }
    answers
}

#[derive(Debug)]
pub struct GreedyRun {
    pub cert: ProofCert,
    pub fuel_spent: u64,
    /// True when the budget ran out and the certificate is the baseline one.
    pub fell_back: bool,
}

pub fn greedy_proof(
    snap: &Snapshot,
    a: VertexId,
    b: VertexId,
    fuel: u64,
) -> Result<GreedyRun, EngineError> {
    if !snap.same_class(a, b) {
        return Err(EngineError::NotEquivalent);
    }
    if a == b {
        return Ok(GreedyRun {
            cert: ProofCert::trivial(snap.vertex_term(a)),
            fuel_spent: 0,
            fell_back: false,
        });
    }
    let est = estimate_sizes(snap);
    let weight = |e: EdgeId| match snap.edge(e).just {
        Justification::Axiom { .. } => Some(1),
        Justification::Congruence { child_left, child_right, .. } => {
            est.get(&norm(child_left, child_right)).copied()
        }
    };

    let goal_pair = norm(a, b);
    let mut resolved: HashMap<Pair, Vec<OrientedEdge>> = HashMap::new();
    let mut queued: HashSet<Pair> = HashSet::from([goal_pair]);
    let mut queue: VecDeque<Pair> = VecDeque::from([goal_pair]);
    let mut fuel_left = fuel;
    let mut fuel_spent = 0;
    while let Some(p) = queue.pop_front() {
        let res = snap
            .weighted_shortest_path(p.0, p.1, &weight)
            .expect("same class and all weights finite");
        for oe in &res.edges {
            let Some((cl, cr)) = snap.edge(oe.edge).congruence_children() else {
                continue;
            };
            let q = norm(cl, cr);
            if queued.contains(&q) {
                continue;
            }
            if fuel_left == 0 {
                let cert = basic::unoptimized_proof(snap, a, b)?;
                return Ok(GreedyRun { cert, fuel_spent, fell_back: true });
            }
            fuel_left -= 1;
            fuel_spent += 1;
            queued.insert(q);
            queue.push_back(q);
        }
        resolved.insert(p, res.edges);
    }

    // Assembly recurses through resolved pairs. Estimates are exact
    // baseline sizes, so a pair's resolved walk can only lean on pairs of
    // no larger estimate, with equality forcing a lone congruence edge
    // whose children are strict subterms of the pair's own terms — the
    // recursion cannot revisit a pair.
    let path = build_path(snap, &resolved, a, b);
    Ok(GreedyRun { cert: finish(snap, a, b, path), fuel_spent, fell_back: false })
}

fn build_path(
    snap: &Snapshot,
    resolved: &HashMap<Pair, Vec<OrientedEdge>>,
    from: VertexId,
    to: VertexId,
) -> CertPath {
    let p = norm(from, to);
    let walk = &resolved[&p];
    let walk = if (from, to) == p { walk.clone() } else { reverse_walk(walk) };
    let steps = steps_for(snap, &walk, &mut |cf, ct, _| build_path(snap, resolved, cf, ct));
    CertPath { start: snap.vertex_term(from), steps }
}
