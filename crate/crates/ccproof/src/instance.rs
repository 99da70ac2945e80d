//! Instance files: asserted ground equalities in order, then one goal.
//!
//! Grammar: any number of `(assert (= LHS RHS))` forms followed by one
//! `(prove (= S T))`; `;` starts a comment. Axiom identifiers are positions
//! in first-appearance order — re-asserting an oriented pair is a no-op, so
//! identifiers agree with what the closure engine assigns when the file is
//! replayed. The flipped orientation is a distinct axiom.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::Engine;
use crate::sexp::{self, Sexp, SexpError};
use crate::term::{term_of_sexp, Term, TermBank, TermError, TermId};

pub const GOAL_RETRIES: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error(transparent)]
    Sexp(#[from] SexpError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("form {form}: {msg}")]
    Shape { form: usize, msg: &'static str },
    #[error("no (prove ...) form")]
    MissingGoal,
    #[error("no provable goal pair found after {0} attempts")]
    GenerationFailed(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    /// Asserted equalities in file order, duplicates included.
    pub axioms: Vec<(Term, Term)>,
    pub goal: (Term, Term),
    /// Provenance note rendered as a leading comment; dropped on parse.
    pub meta: Option<String>,
}

/// An instance lowered into a term bank: oriented axiom pairs deduplicated
/// in first-appearance order (identifier = index) plus the goal pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedInstance {
    pub axioms: Vec<(TermId, TermId)>,
    pub goal: (TermId, TermId),
}

impl Instance {
    pub fn parse(text: &str) -> Result<Instance, InstanceError> {
        let forms = sexp::parse_many(text)?;
        let mut axioms = Vec::new();
        let mut goal = None;
        for (form, sexp) in forms.iter().enumerate() {
            let (head, pair) = equality_form(form, sexp)?;
            match head {
                "assert" => {
                    if goal.is_some() {
                        return Err(InstanceError::Shape {
                            form,
                            msg: "equality asserted after the goal",
                        });
                    }
                    axioms.push(pair);
                }
                "prove" => {
                    if goal.replace(pair).is_some() {
                        return Err(InstanceError::Shape {
                            form,
                            msg: "more than one (prove ...) form",
                        });
                    }
                }
                _ => {
                    return Err(InstanceError::Shape {
                        form,
                        msg: "expected (assert ...) or (prove ...)",
                    })
                }
            }
        }
        let goal = goal.ok_or(InstanceError::MissingGoal)?;
        Ok(Instance { axioms, goal, meta: None })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(meta) = &self.meta {
            out.push_str("; ");
            out.push_str(meta);
            out.push('\n');
        }
        for (l, r) in &self.axioms {
            out.push_str(&format!("(assert (= {l} {r}))\n"));
        }
        out.push_str(&format!("(prove (= {} {}))\n", self.goal.0, self.goal.1));
        out
    }

    /// Intern every term, deduplicating oriented axiom pairs the same way
    /// the engine does so certificate axiom ids line up.
    pub fn intern(&self, bank: &mut TermBank) -> Result<LoadedInstance, TermError> {
        let mut axioms = Vec::new();
        let mut seen = HashMap::new();
        for (l, r) in &self.axioms {
            let l = bank.intern_term(l)?;
            let r = bank.intern_term(r)?;
            if seen.insert((l, r), ()).is_none() {
                axioms.push((l, r));
            }
        }
        let goal = (bank.intern_term(&self.goal.0)?, bank.intern_term(&self.goal.1)?);
        Ok(LoadedInstance { axioms, goal })
    }

    /// Replay into a fresh engine: axioms asserted in order, goal terms
    /// added (they need not appear in any axiom), closure rebuilt.
    pub fn build_engine(&self) -> Result<(Engine, (TermId, TermId)), TermError> {
        let mut eng = Engine::new();
        for (l, r) in &self.axioms {
            let l = eng.bank_mut().intern_term(l)?;
            let r = eng.bank_mut().intern_term(r)?;
            eng.assert_equal(l, r);
        }
        let gl = eng.bank_mut().intern_term(&self.goal.0)?;
        let gr = eng.bank_mut().intern_term(&self.goal.1)?;
        eng.add_term(gl);
        eng.add_term(gr);
        eng.rebuild();
        Ok((eng, (gl, gr)))
    }
}

fn equality_form<'s>(
    form: usize,
    sexp: &'s Sexp,
) -> Result<(&'s str, (Term, Term)), InstanceError> {
    let bad = |msg| InstanceError::Shape { form, msg };
    let Sexp::List(items) = sexp else {
        return Err(bad("expected (assert ...) or (prove ...)"));
    };
    let [Sexp::Atom(head), eq] = items.as_slice() else {
        return Err(bad("expected a two-element form"));
    };
    let Sexp::List(eq_items) = eq else {
        return Err(bad("expected (= LHS RHS)"));
    };
    let [Sexp::Atom(op), lhs, rhs] = eq_items.as_slice() else {
        return Err(bad("expected (= LHS RHS)"));
    };
    if op != "=" {
        return Err(bad("expected (= LHS RHS)"));
    }
    Ok((head.as_str(), (term_of_sexp(lhs)?, term_of_sexp(rhs)?)))
}

/// Generate a reproducible random instance: `n` equalities between random
/// ground terms over two binary symbols, one unary, and six constants, plus
/// a goal pair drawn from the closure until a provable one turns up.
pub fn gen_random_instance(n: usize, depth: u32, seed: u64) -> Result<Instance, InstanceError> {
    assert!(n >= 1, "at least one axiom");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axioms: Vec<(Term, Term)> = (0..n)
        .map(|_| (random_term(&mut rng, depth), random_term(&mut rng, depth)))
        .collect();

    let mut eng = Engine::new();
    for (l, r) in &axioms {
        let l = eng.bank_mut().intern_term(l).expect("generated arities are consistent");
        let r = eng.bank_mut().intern_term(r).expect("generated arities are consistent");
        eng.assert_equal(l, r);
    }
    eng.rebuild();
    let snap = eng.snapshot().expect("rebuilt");

    let total = snap.vertex_count() as u32;
    for _ in 0..GOAL_RETRIES {
        let a = crate::engine::VertexId(rng.gen_range(0..total));
        let b = crate::engine::VertexId(rng.gen_range(0..total));
        if a != b && snap.same_class(a, b) {
            let bank = snap.bank();
            let goal = (
                bank.term_of(snap.vertex_term(a)).expect("interned"),
                bank.term_of(snap.vertex_term(b)).expect("interned"),
            );
            let meta = format!("generated n={n} depth={depth} seed={seed}");
            return Ok(Instance { axioms, goal, meta: Some(meta) });
        }
    }
    Err(InstanceError::GenerationFailed(GOAL_RETRIES))
}

fn random_term(rng: &mut ChaCha8Rng, depth: u32) -> Term {
    let roll = if depth == 0 { 0 } else { rng.gen_range(0u32..10) };
    match roll {
        0..=3 => Term::leaf(format!("c{}", rng.gen_range(0u32..6))),
        4 | 5 => Term::app("h", vec![random_term(rng, depth - 1)]),
        _ => {
            let head = if rng.gen_range(0u32..2) == 0 { "f" } else { "g" };
            Term::app(head, vec![random_term(rng, depth - 1), random_term(rng, depth - 1)])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
; three equalities over a toy signature
(assert (= (+ a 0) a))
(assert (= (+ 2 2) 4))
(assert (= (+ a 0) a)) ; duplicate on purpose
(prove (= (f (+ a 0)) (f a)))
";

    #[test]
    fn test_parse_and_render_round_trip() {
        let inst = Instance::parse(SAMPLE).unwrap();
        assert_eq!(inst.axioms.len(), 3);
        assert_eq!(inst.axioms[0].1, Term::leaf("a"));
        assert_eq!(inst.goal.1, Term::app("f", vec![Term::leaf("a")]));
        let again = Instance::parse(&inst.render()).unwrap();
        assert_eq!(again, Instance { meta: None, ..inst });
    }

    #[test]
    fn test_intern_dedups_oriented_pairs() {
        let inst = Instance::parse(SAMPLE).unwrap();
        let mut bank = TermBank::new();
        let loaded = inst.intern(&mut bank).unwrap();
        assert_eq!(loaded.axioms.len(), 2, "duplicate assertion collapses");

        let flipped = "(assert (= a b))\n(assert (= b a))\n(prove (= a b))\n";
        let inst = Instance::parse(flipped).unwrap();
        let mut bank = TermBank::new();
        let loaded = inst.intern(&mut bank).unwrap();
        assert_eq!(loaded.axioms.len(), 2, "flipped orientation is distinct");
    }

    #[test]
    fn test_interned_ids_match_engine_axioms() {
        let inst = Instance::parse(SAMPLE).unwrap();
        let (eng, _) = inst.build_engine().unwrap();
        let mut bank = TermBank::new();
        let loaded = inst.intern(&mut bank).unwrap();
        let snap = eng.snapshot().unwrap();
        let engine_axioms: Vec<(String, String)> = snap
            .axioms()
            .iter()
            .map(|&(l, r)| {
                (snap.bank().print_term(l).unwrap(), snap.bank().print_term(r).unwrap())
            })
            .collect();
        let loaded_axioms: Vec<(String, String)> = loaded
            .axioms
            .iter()
            .map(|&(l, r)| (bank.print_term(l).unwrap(), bank.print_term(r).unwrap()))
            .collect();
        assert_eq!(engine_axioms, loaded_axioms);
    }

    #[test]
    fn test_parse_rejects_malformed_files() {
        assert!(matches!(
            Instance::parse("(assert (= a b))").unwrap_err(),
            InstanceError::MissingGoal
        ));
        assert!(matches!(
            Instance::parse("(prove (= a b))\n(assert (= a b))").unwrap_err(),
            InstanceError::Shape { form: 1, .. }
        ));
        assert!(matches!(
            Instance::parse("(prove (= a b))\n(prove (= a b))").unwrap_err(),
            InstanceError::Shape { form: 1, .. }
        ));
        assert!(matches!(
            Instance::parse("(assert (= a b c))\n(prove (= a b))").unwrap_err(),
            InstanceError::Shape { form: 0, .. }
        ));
        assert!(matches!(
            Instance::parse("(check (= a b))\n(prove (= a b))").unwrap_err(),
            InstanceError::Shape { form: 0, .. }
        ));
        assert!(Instance::parse("(assert (= a").is_err());
    }

    #[test]
    fn test_arity_conflicts_surface_on_intern() {
        let inst = Instance::parse("(assert (= (f a) (f a b)))\n(prove (= a a))").unwrap();
        let mut bank = TermBank::new();
        assert!(matches!(
            inst.intern(&mut bank).unwrap_err(),
            TermError::ArityMismatch { .. }
        ));
    }

    #[test]
    fn test_generator_is_reproducible_and_goal_provable() {
        let a = gen_random_instance(5, 2, 7).unwrap();
        let b = gen_random_instance(5, 2, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_random_instance(5, 2, 8).unwrap());

        let (eng, (gl, gr)) = a.build_engine().unwrap();
        assert!(eng.are_equal(gl, gr).unwrap());

        let rendered = a.render();
        assert!(rendered.starts_with("; generated n=5 depth=2 seed=7\n"));
        let reparsed = Instance::parse(&rendered).unwrap();
        assert_eq!(reparsed.axioms, a.axioms);
        assert_eq!(reparsed.goal, a.goal);
    }

    #[test]
    fn test_generator_single_axiom() {
        for seed in 0..20 {
            match gen_random_instance(1, 1, seed) {
                Ok(inst) => {
                    let (eng, (gl, gr)) = inst.build_engine().unwrap();
                    assert!(eng.are_equal(gl, gr).unwrap());
                }
                Err(InstanceError::GenerationFailed(_)) => {}
                Err(other) => panic!("unexpected error: {other}"),
            }
        }
    }
}
