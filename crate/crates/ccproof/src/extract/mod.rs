//! Certificate extraction over a c-graph [`Snapshot`].
//!
//! Every strategy produces the same shape of result — a [`ProofCert`] whose
//! steps walk edges of the graph — and they share the step-assembly code
//! here. They differ in which path they pick for each vertex pair:
//!
//! * [`basic::unoptimized_proof`]: the unique reduced-forest path, at every
//!   level.
//! * [`basic::reduce_proof`]: shrink an existing certificate by deleting
//!   axioms that are not needed.
//! * [`treeopt`]: converge per-pair proof sizes by iterated shortest paths,
//!   then extract along the final weights.
//! * [`greedy`]: one shortest-path pass per pair using precomputed size
//!   estimates, under a fuel budget.

pub mod basic;
pub mod greedy;
pub mod treeopt;

use std::collections::BTreeMap;

use crate::cert::{cert_axioms_used, CertPath, ProofCert, Step, StepJust};
use crate::engine::{EdgeId, Justification, OrientedEdge, Snapshot, VertexId};

/// Unordered pair key: endpoints in id order.
pub(crate) fn norm(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// The same walk in the opposite direction.
pub(crate) fn reverse_walk(edges: &[OrientedEdge]) -> Vec<OrientedEdge> {
    edges
        .iter()
        .rev()
        .map(|oe| OrientedEdge { edge: oe.edge, reversed: !oe.reversed })
        .collect()
}

/// Turn an edge walk into certificate steps. `sub` supplies the nested path
/// proving a congruence edge's child pair, oriented with the traversal.
pub(crate) fn steps_for<F>(snap: &Snapshot, walk: &[OrientedEdge], sub: &mut F) -> Vec<Step>
where
    F: FnMut(VertexId, VertexId, EdgeId) -> CertPath,
{
    walk.iter()
        .map(|&oe| {
            let (_, to) = oe.endpoints(snap);
            let result = snap.vertex_term(to);
            match snap.edge(oe.edge).just {
                Justification::Axiom { axiom, forward } => Step {
                    position: Vec::new(),
                    just: StepJust::Axiom { axiom, forward: forward != oe.reversed },
                    result,
                },
                Justification::Congruence { arg_index, .. } => {
                    let (cf, ct) = snap.oriented_children(oe).expect("congruence edge");
                    Step {
                        position: vec![arg_index],
                        just: StepJust::Congruence { sub: sub(cf, ct, oe.edge), edge: Some(oe.edge) },
                        result,
                    }
                }
            }
        })
        .collect()
}

/// Wrap a top-level path into a certificate, filling in the goal and the
/// table of cited axioms.
pub(crate) fn finish(snap: &Snapshot, a: VertexId, b: VertexId, path: CertPath) -> ProofCert {
    let mut cert = ProofCert {
        axioms: BTreeMap::new(),
        goal: (snap.vertex_term(a), snap.vertex_term(b)),
        path,
    };
    for id in cert_axioms_used(&cert) {
        cert.axioms.insert(id, snap.axioms()[id.idx()]);
    }
    cert
}
