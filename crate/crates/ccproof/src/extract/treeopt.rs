//! Tree-size optimization by iterated shortest paths.
//!
//! Each congruence edge is as expensive as the proof of its child pair, so
//! pair sizes are interdependent. [`DistTable::converge`] settles them:
//! every pass recomputes a least-weight path for every pair under the
//! current table (axiom edges cost one, congruence edges cost their pair's
//! entry, unknown entries make an edge unusable), keeping strict
//! improvements. Within a pass, later pairs see earlier pairs' updates.
//! One pass can only shave sizes by widening usable nesting depth by one
//! level, so the table is stable after at most as many passes as there are
//! congruence edges — reached sooner in practice, and the loop exits on the
//! first pass without changes.

use std::collections::{HashMap, HashSet};

use super::{finish, norm, reverse_walk, steps_for};
use crate::cert::{CertPath, ProofCert};
use crate::engine::{EdgeId, EngineError, Justification, OrientedEdge, Snapshot, VertexId};

type Pair = (VertexId, VertexId);

pub struct DistTable {
    /// Distinct justification pairs, in first-defining-edge order.
    pairs: Vec<Pair>,
    dist: HashMap<Pair, u64>,
    /// Best walk per pair (oriented from the pair's smaller endpoint), plus
    /// the stamp at which it was recorded. Strict improvement makes
    /// (dist, stamp) drop lexicographically into any pair a walk relies on,
    /// so reconstruction through these walks cannot loop.
    best: HashMap<Pair, (Vec<OrientedEdge>, u64)>,
    pub passes_used: usize,
    /// Per-pass table states, aligned with `pairs`; only kept on request.
    pub history: Option<Vec<Vec<Option<u64>>>>,
}

impl DistTable {
    pub fn converge(snap: &Snapshot, record_history: bool) -> DistTable {
        let mut pairs = Vec::new();
        let mut seen = HashSet::new();
        for &e in snap.congruence_edges() {
            let (l, r) = snap.edge(e).congruence_children().expect("congruence edge");
            let p = norm(l, r);
            if seen.insert(p) {
                pairs.push(p);
            }
        }
        let mut table = DistTable {
            pairs,
            dist: HashMap::new(),
            best: HashMap::new(),
            passes_used: 0,
            history: record_history.then(Vec::new),
        };
        let mut stamp = 0u64;
        for _ in 0..snap.congruence_edges().len() {
            let mut changed = false;
            for i in 0..table.pairs.len() {
                let p = table.pairs[i];
                let Ok(res) =
                    snap.weighted_shortest_path(p.0, p.1, &|e| table.weight(snap, e))
                else {
                    // Every route still runs through an unresolved pair.
                    continue;
                };
                let old = table.dist.get(&p).copied();
                if old.is_none_or(|o| res.total < o) {
                    table.dist.insert(p, res.total);
                    table.best.insert(p, (res.edges, stamp));
                    stamp += 1;
                    changed = true;
                }
            }
            table.passes_used += 1;
            if let Some(h) = &mut table.history {
                h.push(table.pairs.iter().map(|p| table.dist.get(p).copied()).collect());
            }
            if !changed {
                break;
            }
        }
        table
    }

    /// Edge weight under the current table. `None` marks a congruence edge
    /// whose pair has no finite size yet.
    pub fn weight(&self, snap: &Snapshot, e: EdgeId) -> Option<u64> {
        match snap.edge(e).just {
            Justification::Axiom { .. } => Some(1),
            Justification::Congruence { child_left, child_right, .. } => {
                self.dist.get(&norm(child_left, child_right)).copied()
            }
        }
    }

    pub fn dist(&self, a: VertexId, b: VertexId) -> Option<u64> {
        self.dist.get(&norm(a, b)).copied()
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    fn recorded_walk(&self, from: VertexId, to: VertexId) -> Vec<OrientedEdge> {
        let p = norm(from, to);
        let (edges, _) = self.best.get(&p).expect("pair converged to a finite size");
        if (from, to) == p {
            edges.clone()
        } else {
            reverse_walk(edges)
        }
    }

    fn build_path(&self, snap: &Snapshot, start: VertexId, walk: &[OrientedEdge]) -> CertPath {
        let steps = steps_for(snap, walk, &mut |cf, ct, _| {
            self.build_path(snap, cf, &self.recorded_walk(cf, ct))
        });
        CertPath { start: snap.vertex_term(start), steps }
    }

    /// Extract a certificate for `a = b` along the converged weights.
    pub fn prove(&self, snap: &Snapshot, a: VertexId, b: VertexId) -> Result<ProofCert, EngineError> {
        let res = snap.weighted_shortest_path(a, b, &|e| self.weight(snap, e))?;
        Ok(finish(snap, a, b, self.build_path(snap, a, &res.edges)))
    }
}

#[derive(Debug)]
pub struct TreeOptRun {
    pub cert: ProofCert,
    pub passes_used: usize,
}

pub fn treeopt_proof(
    snap: &Snapshot,
    a: VertexId,
    b: VertexId,
) -> Result<TreeOptRun, EngineError> {
    let table = DistTable::converge(snap, false);
    let cert = table.prove(snap, a, b)?;
    Ok(TreeOptRun { cert, passes_used: table.passes_used })
}
