//! Baseline extraction and the deletion-based certificate shrinker.

use std::collections::HashMap;

use super::{finish, steps_for};
use crate::cert::{cert_axioms_used, CertPath, ProofCert, StepJust};
use crate::engine::{AxiomId, Engine, EngineError, Snapshot, VertexId};
use crate::term::{TermBank, TermId};

/// Prove `a = b` by the reduced-forest path, with every congruence edge's
/// child pair proven the same way. No size optimization: this is the
/// reference point the optimizing strategies are measured against.
///
/// Terminates because a congruence edge's children were merged before the
/// edge existed, so their forest path only uses strictly older edges.
pub fn unoptimized_proof(
    snap: &Snapshot,
    a: VertexId,
    b: VertexId,
) -> Result<ProofCert, EngineError> {
    if !snap.same_class(a, b) {
        return Err(EngineError::NotEquivalent);
    }
    let mut memo = HashMap::new();
    let path = forest_cert_path(snap, a, b, &mut memo);
    Ok(finish(snap, a, b, path))
}

fn forest_cert_path(
    snap: &Snapshot,
    a: VertexId,
    b: VertexId,
    memo: &mut HashMap<(VertexId, VertexId), CertPath>,
) -> CertPath {
    if let Some(hit) = memo.get(&(a, b)) {
        return hit.clone();
    }
    let walk = snap.forest_path(a, b).expect("same class");
    let steps = steps_for(snap, &walk, &mut |cf, ct, _| forest_cert_path(snap, cf, ct, memo));
    let path = CertPath { start: snap.vertex_term(a), steps };
    memo.insert((a, b), path.clone());
    path
}

/// Outcome of [`reduce_proof`]. The reduced certificate's terms live in the
/// bank of `snapshot` (re-running closure over fewer axioms can materialize
/// chain intermediates the original run never built).
pub struct Reduced {
    pub cert: ProofCert,
    pub snapshot: Snapshot,
    /// Axioms deleted from the base certificate's support, ascending.
    pub removed: Vec<AxiomId>,
}

/// Shrink a certificate by axiom deletion: walk its cited axioms in
/// ascending id order, drop each one whose removal keeps the goal provable
/// from the remaining support, then re-extract over the survivors.
///
/// Only the base certificate's own axioms are candidates — the rest of the
/// instance stays off the table, so the result's support is a subset of the
/// base's.
pub fn reduce_proof(
    bank: &TermBank,
    instance: &[(TermId, TermId)],
    goal: (TermId, TermId),
    base: &ProofCert,
) -> Result<Reduced, EngineError> {
    let engine_over = |axioms: &[AxiomId]| {
        let mut eng = Engine::with_bank(bank.clone());
        for &id in axioms {
            let (l, r) = instance[id.idx()];
            eng.assert_equal(l, r);
        }
        eng.add_term(goal.0);
        eng.add_term(goal.1);
        eng.rebuild();
        eng
    };

    let used = cert_axioms_used(base);
    let mut keep = used.clone();
    let mut removed = Vec::new();
    for &id in &used {
        let trial: Vec<AxiomId> = keep.iter().copied().filter(|&k| k != id).collect();
        let eng = engine_over(&trial);
        if eng.are_equal(goal.0, goal.1).expect("goal terms added") {
            keep = trial;
            removed.push(id);
        }
    }

    let eng = engine_over(&keep);
    let snap = eng.snapshot().expect("rebuilt");
    let va = snap.vertex_of(goal.0).expect("goal term added");
    let vb = snap.vertex_of(goal.1).expect("goal term added");
    let cert = unoptimized_proof(&snap, va, vb)?;
    let cert = remap_axioms(cert, &keep);
    Ok(Reduced { cert, snapshot: snap, removed })
}

/// The survivor engine numbers its axioms densely; map them back to the ids
/// they carry in the original instance.
fn remap_axioms(mut cert: ProofCert, keep: &[AxiomId]) -> ProofCert {
    fn remap_path(path: &mut CertPath, keep: &[AxiomId]) {
        for step in &mut path.steps {
            match &mut step.just {
                StepJust::Axiom { axiom, .. } => *axiom = keep[axiom.idx()],
                StepJust::Congruence { sub, .. } => remap_path(sub, keep),
            }
        }
    }
    remap_path(&mut cert.path, keep);
    cert.axioms = cert
        .axioms
        .into_iter()
        .map(|(id, pair)| (keep[id.idx()], pair))
        .collect();
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::{cert_dag_size, cert_tree_size, check_cert};

    fn build(asserts: &[(&str, &str)], extra: &[&str]) -> Engine {
        let mut eng = Engine::new();
        for (l, r) in asserts {
            let l = eng.bank_mut().parse_and_intern(l).unwrap();
            let r = eng.bank_mut().parse_and_intern(r).unwrap();
            eng.assert_equal(l, r);
        }
        for t in extra {
            eng.add_parsed(t).unwrap();
        }
        eng.rebuild();
        eng
    }

    fn goal_vertices(snap: &Snapshot, l: &str, r: &str) -> (VertexId, VertexId) {
        (snap.vertex_of_text(l).unwrap(), snap.vertex_of_text(r).unwrap())
    }

    #[test]
    fn test_unoptimized_uses_forest_path() {
        // Three parallel routes between a and c; the forest keeps two edges.
        let eng = build(&[("a", "b"), ("b", "c"), ("a", "c")], &[]);
        let snap = eng.snapshot().unwrap();
        let (va, vc) = goal_vertices(&snap, "a", "c");
        let cert = unoptimized_proof(&snap, va, vc).unwrap();
        assert_eq!(cert_tree_size(&cert), 2);
        assert_eq!(cert_dag_size(&cert), 2);
        check_cert(snap.bank(), &cert, snap.axioms(), cert.goal).unwrap();
    }

    #[test]
    fn test_unoptimized_nested_congruence() {
        let eng = build(
            &[("(+ a 0)", "a"), ("(+ 2 2)", "4")],
            &["(f (+ a 0) (g (+ a 0) (+ 2 2)))", "(f a (g a 4))"],
        );
        let snap = eng.snapshot().unwrap();
        let (va, vb) = goal_vertices(
            &snap,
            "(f (+ a 0) (g (+ a 0) (+ 2 2)))",
            "(f a (g a 4))",
        );
        let cert = unoptimized_proof(&snap, va, vb).unwrap();
        assert_eq!(cert_tree_size(&cert), 3);
        assert_eq!(cert_dag_size(&cert), 2);
        check_cert(snap.bank(), &cert, snap.axioms(), cert.goal).unwrap();
    }

    #[test]
    fn test_unoptimized_rejects_unrelated_terms() {
        let eng = build(&[("a", "b")], &["c"]);
        let snap = eng.snapshot().unwrap();
        let (va, vc) = goal_vertices(&snap, "a", "c");
        assert_eq!(unoptimized_proof(&snap, va, vc).unwrap_err(), EngineError::NotEquivalent);
    }

    #[test]
    fn test_reduce_keeps_a_minimal_support() {
        // The baseline proof of a = c walks a-b-c; neither leg is removable.
        let eng = build(&[("a", "b"), ("b", "c"), ("a", "c")], &[]);
        let snap = eng.snapshot().unwrap();
        let (va, vc) = goal_vertices(&snap, "a", "c");
        let base = unoptimized_proof(&snap, va, vc).unwrap();
        let reduced =
            reduce_proof(snap.bank(), snap.axioms(), base.goal, &base).unwrap();
        assert!(reduced.removed.is_empty());
        assert_eq!(cert_dag_size(&reduced.cert), 2);
        check_cert(
            reduced.snapshot.bank(),
            &reduced.cert,
            snap.axioms(),
            base.goal,
        )
        .unwrap();
    }

    #[test]
    fn test_reduce_drops_unneeded_axioms_ascending() {
        // d = e is never involved; a = c short-circuits once ab goes.
        let eng = build(&[("a", "b"), ("b", "c"), ("a", "c"), ("d", "e")], &[]);
        let snap = eng.snapshot().unwrap();
        let (va, vc) = goal_vertices(&snap, "a", "c");
        // Hand-build a wasteful certificate citing all of ab, bc, ac:
        // a -> b -> c -> a -> c.
        let axiom = |i: u32, fwd: bool, result: &str| crate::cert::Step {
            position: vec![],
            just: StepJust::Axiom { axiom: AxiomId(i), forward: fwd },
            result: snap.vertex_term(snap.vertex_of_text(result).unwrap()),
        };
        let base = finish(
            &snap,
            va,
            vc,
            CertPath {
                start: snap.vertex_term(va),
                steps: vec![
                    axiom(0, true, "b"),
                    axiom(1, true, "c"),
                    axiom(2, false, "a"),
                    axiom(2, true, "c"),
                ],
            },
        );
        check_cert(snap.bank(), &base, snap.axioms(), base.goal).unwrap();
        assert_eq!(cert_dag_size(&base), 3);

        let reduced =
            reduce_proof(snap.bank(), snap.axioms(), base.goal, &base).unwrap();
        // Ascending order tries ab first; ac alone still proves the goal,
        // so ab and bc both go.
        assert_eq!(reduced.removed, vec![AxiomId(0), AxiomId(1)]);
        assert_eq!(cert_dag_size(&reduced.cert), 1);
        assert_eq!(cert_tree_size(&reduced.cert), 1);
        assert_eq!(
            reduced.cert.axioms.keys().copied().collect::<Vec<_>>(),
            vec![AxiomId(2)]
        );
        check_cert(
            reduced.snapshot.bank(),
            &reduced.cert,
            snap.axioms(),
            base.goal,
        )
        .unwrap();
    }

    #[test]
    fn test_reduce_never_uses_axioms_outside_the_base_cert() {
        // The instance also knows a = c directly, but the base certificate
        // does not cite it, so reduction cannot discover it.
        let eng = build(&[("a", "b"), ("b", "c"), ("a", "c")], &[]);
        let snap = eng.snapshot().unwrap();
        let (va, vc) = goal_vertices(&snap, "a", "c");
        let base = unoptimized_proof(&snap, va, vc).unwrap();
        assert_eq!(
            cert_axioms_used(&base),
            vec![AxiomId(0), AxiomId(1)],
            "baseline walks the two forest edges"
        );
        let reduced =
            reduce_proof(snap.bank(), snap.axioms(), base.goal, &base).unwrap();
        assert_eq!(cert_dag_size(&reduced.cert), 2);
    }

    #[test]
    fn test_reduce_remaps_congruence_subproofs() {
        let eng = build(
            &[("x", "y"), ("(+ a 0)", "a")],
            &["(+ (+ a 0) 0)"],
        );
        let snap = eng.snapshot().unwrap();
        let (vt, va) = goal_vertices(&snap, "(+ (+ a 0) 0)", "a");
        let base = unoptimized_proof(&snap, vt, va).unwrap();
        let reduced =
            reduce_proof(snap.bank(), snap.axioms(), base.goal, &base).unwrap();
        // x = y was never cited; the surviving axiom keeps its original id 1.
        assert_eq!(reduced.removed, vec![]);
        assert_eq!(
            reduced.cert.axioms.keys().copied().collect::<Vec<_>>(),
            vec![AxiomId(1)]
        );
        assert_eq!(cert_tree_size(&reduced.cert), 2);
        assert_eq!(cert_dag_size(&reduced.cert), 1);
        check_cert(
            reduced.snapshot.bank(),
            &reduced.cert,
            snap.axioms(),
            base.goal,
        )
        .unwrap();
    }
}
