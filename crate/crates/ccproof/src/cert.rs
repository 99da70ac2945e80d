//! Proof certificates: a start term and a sequence of rewrite steps, each
//! applying an input equality at a position or invoking a nested certificate
//! for the child pair a congruence rewrite hinges on.
//!
//! Certificates are self-contained values. Checking replays the rewrites
//! structurally — no union-find, no graph — so a checked certificate is
//! evidence independent of how it was found.
//!
//! Two sizes matter: tree size counts axiom applications with repetition
//! (nested subproofs included), DAG size counts distinct axioms cited.

use std::collections::{BTreeMap, BTreeSet};

use crate::engine::{AxiomId, EdgeId};
use crate::sexp::{self, Sexp};
use crate::term::{Term, TermBank, TermError, TermId};

/// Canonical identity of a non-congruence edge: the axiom it records.
pub type EdgeKey = AxiomId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofCert {
    /// Axioms the proof cites, keyed by their input-equality index. Sparse:
    /// only cited axioms need to appear.
    pub axioms: BTreeMap<AxiomId, (TermId, TermId)>,
    pub goal: (TermId, TermId),
    pub path: CertPath,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertPath {
    pub start: TermId,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    /// Child-index path to the rewritten subterm; empty means the root.
    pub position: Vec<usize>,
    pub just: StepJust,
    /// The whole term after this step.
    pub result: TermId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepJust {
    /// Apply an input equality left-to-right (`forward`) or right-to-left.
    Axiom { axiom: AxiomId, forward: bool },
    /// Rewrite one child; `sub` proves the two child terms equal. `edge`
    /// remembers which congruence edge produced the step (bookkeeping only;
    /// not serialized, not needed to check).
    Congruence { sub: CertPath, edge: Option<EdgeId> },
}

impl ProofCert {
    /// Trivial certificate for a goal whose sides are the same term.
    pub fn trivial(term: TermId) -> ProofCert {
        ProofCert {
            axioms: BTreeMap::new(),
            goal: (term, term),
            path: CertPath { start: term, steps: Vec::new() },
        }
    }
}

fn path_tree_size(path: &CertPath) -> u64 {
    path.steps
        .iter()
        .map(|s| match &s.just {
            StepJust::Axiom { .. } => 1,
            StepJust::Congruence { sub, .. } => path_tree_size(sub),
        })
        .sum()
}

/// Axiom applications counted with repetition, through all subproofs.
pub fn cert_tree_size(cert: &ProofCert) -> u64 {
    path_tree_size(&cert.path)
}

fn collect_axioms(path: &CertPath, into: &mut BTreeSet<AxiomId>) {
    for s in &path.steps {
        match &s.just {
            StepJust::Axiom { axiom, .. } => {
                into.insert(*axiom);
            }
            StepJust::Congruence { sub, .. } => collect_axioms(sub, into),
        }
    }
}

/// Distinct axioms cited anywhere in the certificate.
pub fn cert_dag_size(cert: &ProofCert) -> u64 {
    let mut used = BTreeSet::new();
    collect_axioms(&cert.path, &mut used);
    used.len() as u64
}

/// Axiom ids cited anywhere in the certificate, ascending.
pub fn cert_axioms_used(cert: &ProofCert) -> Vec<AxiomId> {
    let mut used = BTreeSet::new();
    collect_axioms(&cert.path, &mut used);
    used.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("certificate starts at the wrong term")]
    StartMismatch,
    #[error("certificate ends at the wrong term")]
    EndMismatch,
    #[error("step does not apply at its position")]
    PositionMismatch,
    #[error("axiom {0} is not an instance equality")]
    UnknownAxiom(AxiomId),
    #[error("subproof endpoints do not match the rewritten child")]
    BadSubproofEndpoints,
}

impl CheckError {
    /// Stable variant name, for machine-readable reporting.
    pub fn name(&self) -> &'static str {
        match self {
            CheckError::StartMismatch => "StartMismatch",
            CheckError::EndMismatch => "EndMismatch",
            CheckError::PositionMismatch => "PositionMismatch",
            CheckError::UnknownAxiom(_) => "UnknownAxiom",
            CheckError::BadSubproofEndpoints => "BadSubproofEndpoints",
        }
    }
}

struct Checker<'a> {
    bank: &'a TermBank,
    instance: &'a [(TermId, TermId)],
}

impl Checker<'_> {
    fn axiom(&self, id: AxiomId) -> Result<(Term, Term), CheckError> {
        let &(l, r) = self.instance.get(id.idx()).ok_or(CheckError::UnknownAxiom(id))?;
        Ok((self.term(l), self.term(r)))
    }

    fn term(&self, id: TermId) -> Term {
        self.bank.term_of(id).expect("certificate term is interned")
    }

    /// Replay a path from `cur`, returning the final term.
    fn replay(&self, mut cur: Term, steps: &[Step]) -> Result<Term, CheckError> {
        for step in steps {
            let sub = cur.at(&step.position).ok_or(CheckError::PositionMismatch)?.clone();
            let rewritten = match &step.just {
                StepJust::Axiom { axiom, forward } => {
                    let (l, r) = self.axiom(*axiom)?;
                    let (from, to) = if *forward { (l, r) } else { (r, l) };
                    if sub != from {
                        return Err(CheckError::PositionMismatch);
                    }
                    let next = cur
                        .replace_at(&step.position, &to)
                        .ok_or(CheckError::PositionMismatch)?;
                    if next != self.term(step.result) {
                        return Err(CheckError::PositionMismatch);
                    }
                    next
                }
                StepJust::Congruence { sub: subpath, .. } => {
                    if self.term(subpath.start) != sub {
                        return Err(CheckError::BadSubproofEndpoints);
                    }
                    let sub_end = self.replay(sub, &subpath.steps)?;
                    let next = cur
                        .replace_at(&step.position, &sub_end)
                        .ok_or(CheckError::PositionMismatch)?;
                    if next != self.term(step.result) {
                        return Err(CheckError::BadSubproofEndpoints);
                    }
                    next
                }
            };
            cur = rewritten;
        }
        Ok(cur)
    }
}

/// Check a certificate against an instance's asserted equalities and goal by
/// pure rewriting. The certificate's own axiom table must agree with the
/// instance wherever it speaks.
pub fn check_cert(
    bank: &TermBank,
    cert: &ProofCert,
    instance: &[(TermId, TermId)],
    goal: (TermId, TermId),
) -> Result<(), CheckError> {
    for (&id, &pair) in &cert.axioms {
        match instance.get(id.idx()) {
            Some(&actual) if actual == pair => {}
            _ => return Err(CheckError::UnknownAxiom(id)),
        }
    }
    let checker = Checker { bank, instance };
    if cert.path.start != goal.0 {
        return Err(CheckError::StartMismatch);
    }
    let end = checker.replay(checker.term(cert.path.start), &cert.path.steps)?;
    if end != checker.term(goal.1) {
        return Err(CheckError::EndMismatch);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Text form

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertParseError {
    #[error("certificate syntax: {0}")]
    Syntax(String),
    #[error("step cites axiom {0} missing from the table")]
    UnknownAxiom(AxiomId),
    #[error(transparent)]
    Term(#[from] TermError),
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn render_path(bank: &TermBank, path: &CertPath, level: usize, out: &mut String) {
    out.push_str("(path ");
    out.push_str(&bank.print_term(path.start).expect("interned"));
    for step in &path.steps {
        out.push('\n');
        indent(out, level + 1);
        render_step(bank, step, level + 1, out);
    }
    out.push(')');
}

fn render_step(bank: &TermBank, step: &Step, level: usize, out: &mut String) {
    out.push_str("(step (at");
    for p in &step.position {
        out.push(' ');
        out.push_str(&p.to_string());
    }
    out.push(')');
    match &step.just {
        StepJust::Axiom { axiom, forward } => {
            out.push_str(&format!(" (axiom {} {})", axiom, if *forward { "fwd" } else { "bwd" }));
            out.push(' ');
            out.push_str(&bank.print_term(step.result).expect("interned"));
            out.push(')');
        }
        StepJust::Congruence { sub, .. } => {
            out.push('\n');
            indent(out, level + 1);
            out.push_str("(cong (sub\n");
            indent(out, level + 2);
            render_path(bank, sub, level + 2, out);
            out.push_str("))\n");
            indent(out, level + 1);
            out.push_str(&bank.print_term(step.result).expect("interned"));
            out.push(')');
        }
    }
}

/// Deterministic text form; two renders of one certificate are identical.
pub fn render_cert(bank: &TermBank, cert: &ProofCert) -> String {
    let mut out = String::from("(certificate\n");
    indent(&mut out, 1);
    if cert.axioms.is_empty() {
        out.push_str("(axioms)");
    } else {
        out.push_str("(axioms");
        for (id, (l, r)) in &cert.axioms {
            out.push('\n');
            indent(&mut out, 2);
            out.push_str(&format!(
                "({} (= {} {}))",
                id,
                bank.print_term(*l).expect("interned"),
                bank.print_term(*r).expect("interned")
            ));
        }
        out.push(')');
    }
    out.push('\n');
    indent(&mut out, 1);
    out.push_str(&format!(
        "(goal (= {} {}))",
        bank.print_term(cert.goal.0).expect("interned"),
        bank.print_term(cert.goal.1).expect("interned")
    ));
    out.push('\n');
    indent(&mut out, 1);
    render_path(bank, &cert.path, 1, &mut out);
    out.push_str(")\n");
    out
}

fn syntax(msg: impl Into<String>) -> CertParseError {
    CertParseError::Syntax(msg.into())
}

fn expect_tagged<'s>(sexp: &'s Sexp, tag: &str) -> Result<&'s [Sexp], CertParseError> {
    let items = sexp.as_list().ok_or_else(|| syntax(format!("expected ({tag} ...)")))?;
    match items.split_first() {
        Some((head, rest)) if head.as_atom() == Some(tag) => Ok(rest),
        _ => Err(syntax(format!("expected ({tag} ...)"))),
    }
}

fn parse_equation(bank: &mut TermBank, sexp: &Sexp) -> Result<(TermId, TermId), CertParseError> {
    let rest = expect_tagged(sexp, "=")?;
    let [l, r] = rest else {
        return Err(syntax("expected (= LHS RHS)"));
    };
    let l = bank.intern_term(&crate::term::term_of_sexp(l)?)?;
    let r = bank.intern_term(&crate::term::term_of_sexp(r)?)?;
    Ok((l, r))
}

fn parse_usize(sexp: &Sexp, what: &str) -> Result<usize, CertParseError> {
    sexp.as_atom()
        .and_then(|a| a.parse().ok())
        .ok_or_else(|| syntax(format!("expected {what}")))
}

fn parse_path(bank: &mut TermBank, sexp: &Sexp) -> Result<CertPath, CertParseError> {
    let rest = expect_tagged(sexp, "path")?;
    let Some((start, steps)) = rest.split_first() else {
        return Err(syntax("path needs a start term"));
    };
    let start = bank.intern_term(&crate::term::term_of_sexp(start)?)?;
    let steps = steps
        .iter()
        .map(|s| parse_step(bank, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CertPath { start, steps })
}

fn parse_step(bank: &mut TermBank, sexp: &Sexp) -> Result<Step, CertParseError> {
    let rest = expect_tagged(sexp, "step")?;
    let [at, just, result] = rest else {
        return Err(syntax("expected (step (at ...) JUST TERM)"));
    };
    let position = expect_tagged(at, "at")?
        .iter()
        .map(|p| parse_usize(p, "a child index"))
        .collect::<Result<Vec<_>, _>>()?;
    let just = {
        let items = just.as_list().ok_or_else(|| syntax("expected a justification"))?;
        match items.first().and_then(Sexp::as_atom) {
            Some("axiom") => {
                let [_, id, dir] = items else {
                    return Err(syntax("expected (axiom I fwd|bwd)"));
                };
                let axiom = AxiomId(parse_usize(id, "an axiom id")? as u32);
                let forward = match dir.as_atom() {
                    Some("fwd") => true,
                    Some("bwd") => false,
                    _ => return Err(syntax("expected fwd or bwd")),
                };
                StepJust::Axiom { axiom, forward }
            }
            Some("cong") => {
                let [_, sub] = items else {
                    return Err(syntax("expected (cong (sub PATH))"));
                };
                let subrest = expect_tagged(sub, "sub")?;
                let [path] = subrest else {
                    return Err(syntax("expected (sub PATH)"));
                };
                StepJust::Congruence { sub: parse_path(bank, path)?, edge: None }
            }
            _ => return Err(syntax("unknown justification")),
        }
    };
    let result = bank.intern_term(&crate::term::term_of_sexp(result)?)?;
    Ok(Step { position, just, result })
}

fn check_table_refs(path: &CertPath, table: &BTreeMap<AxiomId, (TermId, TermId)>) -> Result<(), CertParseError> {
    for step in &path.steps {
        match &step.just {
            StepJust::Axiom { axiom, .. } => {
                if !table.contains_key(axiom) {
                    return Err(CertParseError::UnknownAxiom(*axiom));
                }
            }
            StepJust::Congruence { sub, .. } => check_table_refs(sub, table)?,
        }
    }
    Ok(())
}

/// Parse a rendered certificate back, interning its terms into `bank`.
pub fn parse_cert(bank: &mut TermBank, text: &str) -> Result<ProofCert, CertParseError> {
    let sexp = sexp::parse_one(text).map_err(|e| syntax(e.to_string()))?;
    let rest = expect_tagged(&sexp, "certificate")?;
    let [axioms_s, goal_s, path_s] = rest else {
        return Err(syntax("expected (certificate (axioms ...) (goal ...) (path ...))"));
    };
    let mut axioms = BTreeMap::new();
    for row in expect_tagged(axioms_s, "axioms")? {
        let items = row.as_list().ok_or_else(|| syntax("expected (I (= LHS RHS))"))?;
        let [id, eq] = items else {
            return Err(syntax("expected (I (= LHS RHS))"));
        };
        let id = AxiomId(parse_usize(id, "an axiom id")? as u32);
        axioms.insert(id, parse_equation(bank, eq)?);
    }
    let goal_rest = expect_tagged(goal_s, "goal")?;
    let [goal_eq] = goal_rest else {
        return Err(syntax("expected (goal (= S T))"));
    };
    let goal = parse_equation(bank, goal_eq)?;
    let path = parse_path(bank, path_s)?;
    check_table_refs(&path, &axioms)?;
    Ok(ProofCert { axioms, goal, path })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank_with(texts: &[&str]) -> (TermBank, Vec<TermId>) {
        let mut bank = TermBank::new();
        let ids = texts.iter().map(|t| bank.parse_and_intern(t).unwrap()).collect();
        (bank, ids)
    }

    /// The worked three-step certificate: rewrite under f twice with one
    /// axiom and once with another, giving tree size 3 but DAG size 2.
    fn three_step() -> (TermBank, Vec<(TermId, TermId)>, ProofCert) {
        let (mut bank, _) = bank_with(&[]);
        let texts = [
            "(f (+ a 0) (g (+ a 0) (+ 2 2)))",
            "(f a (g (+ a 0) (+ 2 2)))",
            "(f a (g (+ a 0) 4))",
            "(f a (g a 4))",
        ];
        let terms: Vec<TermId> =
            texts.iter().map(|t| bank.parse_and_intern(t).unwrap()).collect();
        let ax0 = (
            bank.parse_and_intern("(+ a 0)").unwrap(),
            bank.parse_and_intern("a").unwrap(),
        );
        let ax1 = (
            bank.parse_and_intern("(+ 2 2)").unwrap(),
            bank.parse_and_intern("4").unwrap(),
        );
        let instance = vec![ax0, ax1];
        let step = |position: Vec<usize>, axiom: u32, result: TermId| Step {
            position,
            just: StepJust::Axiom { axiom: AxiomId(axiom), forward: true },
            result,
        };
        let cert = ProofCert {
            axioms: BTreeMap::from([(AxiomId(0), ax0), (AxiomId(1), ax1)]),
            goal: (terms[0], terms[3]),
            path: CertPath {
                start: terms[0],
                steps: vec![
                    step(vec![0], 0, terms[1]),
                    step(vec![1, 1], 1, terms[2]),
                    step(vec![1, 0], 0, terms[3]),
                ],
            },
        };
        (bank, instance, cert)
    }

    #[test]
    fn test_three_step_sizes_and_check() {
        let (bank, instance, cert) = three_step();
        assert_eq!(cert_tree_size(&cert), 3);
        assert_eq!(cert_dag_size(&cert), 2);
        check_cert(&bank, &cert, &instance, cert.goal).unwrap();
    }

    /// A congruence step whose subproof is a single axiom: tree size counts
    /// the nested axiom, DAG size still sees one distinct axiom.
    fn nested_cong() -> (TermBank, Vec<(TermId, TermId)>, ProofCert) {
        let mut bank = TermBank::new();
        let v0 = bank.parse_and_intern("(+ (+ a 0) 0)").unwrap();
        let v1 = bank.parse_and_intern("(+ a 0)").unwrap();
        let v2 = bank.parse_and_intern("a").unwrap();
        let instance = vec![(v1, v2)];
        let cert = ProofCert {
            axioms: BTreeMap::from([(AxiomId(0), (v1, v2))]),
            goal: (v0, v2),
            path: CertPath {
                start: v0,
                steps: vec![
                    Step {
                        position: vec![0],
                        just: StepJust::Congruence {
                            sub: CertPath {
                                start: v1,
                                steps: vec![Step {
                                    position: vec![],
                                    just: StepJust::Axiom { axiom: AxiomId(0), forward: true },
                                    result: v2,
                                }],
                            },
                            edge: None,
                        },
                        result: v1,
                    },
                    Step {
                        position: vec![],
                        just: StepJust::Axiom { axiom: AxiomId(0), forward: true },
                        result: v2,
                    },
                ],
            },
        };
        (bank, instance, cert)
    }

    #[test]
    fn test_nested_cong_sizes_and_check() {
        let (bank, instance, cert) = nested_cong();
        assert_eq!(cert_tree_size(&cert), 2);
        assert_eq!(cert_dag_size(&cert), 1);
        check_cert(&bank, &cert, &instance, cert.goal).unwrap();
    }

    #[test]
    fn test_check_rejects_each_defect() {
        let (mut bank, instance, cert) = three_step();

        let mut wrong_start = cert.clone();
        wrong_start.path.start = instance[0].1;
        assert_eq!(
            check_cert(&bank, &wrong_start, &instance, cert.goal).unwrap_err(),
            CheckError::StartMismatch
        );

        let short = ProofCert {
            path: CertPath { start: cert.path.start, steps: cert.path.steps[..2].to_vec() },
            ..cert.clone()
        };
        assert_eq!(
            check_cert(&bank, &short, &instance, cert.goal).unwrap_err(),
            CheckError::EndMismatch
        );

        let mut flipped = cert.clone();
        flipped.path.steps[0].just = StepJust::Axiom { axiom: AxiomId(0), forward: false };
        assert_eq!(
            check_cert(&bank, &flipped, &instance, cert.goal).unwrap_err(),
            CheckError::PositionMismatch
        );

        let mut bad_axiom = cert.clone();
        bad_axiom.path.steps[0].just = StepJust::Axiom { axiom: AxiomId(9), forward: true };
        assert_eq!(
            check_cert(&bank, &bad_axiom, &instance, cert.goal).unwrap_err(),
            CheckError::UnknownAxiom(AxiomId(9))
        );

        // A table entry that contradicts the instance is rejected up front.
        let mut liar = cert.clone();
        let fake = bank.parse_and_intern("zzz").unwrap();
        liar.axioms.insert(AxiomId(0), (fake, fake));
        assert_eq!(
            check_cert(&bank, &liar, &instance, cert.goal).unwrap_err(),
            CheckError::UnknownAxiom(AxiomId(0))
        );

        let (bank2, instance2, cert2) = nested_cong();
        let mut bad_sub = cert2.clone();
        if let StepJust::Congruence { sub, .. } = &mut bad_sub.path.steps[0].just {
            sub.start = instance2[0].1; // subproof now starts at `a`
        }
        assert_eq!(
            check_cert(&bank2, &bad_sub, &instance2, cert2.goal).unwrap_err(),
            CheckError::BadSubproofEndpoints
        );
    }

    #[test]
    fn test_render_parse_roundtrip() {
        let (bank, _, cert) = three_step();
        let text = render_cert(&bank, &cert);
        let mut bank2 = TermBank::new();
        let parsed = parse_cert(&mut bank2, &text).unwrap();
        assert_eq!(render_cert(&bank2, &parsed), text);

        let (bank, _, cert) = nested_cong();
        let text = render_cert(&bank, &cert);
        let mut bank3 = TermBank::new();
        let parsed = parse_cert(&mut bank3, &text).unwrap();
        assert_eq!(render_cert(&bank3, &parsed), text);
        assert_eq!(cert_tree_size(&parsed), 2);
    }

    #[test]
    fn test_parse_rejects_unknown_axiom_reference() {
        let text = "(certificate (axioms (0 (= a b))) (goal (= a b)) \
                    (path a (step (at) (axiom 3 fwd) b)))";
        let mut bank = TermBank::new();
        assert_eq!(
            parse_cert(&mut bank, text).unwrap_err(),
            CertParseError::UnknownAxiom(AxiomId(3))
        );
    }

    #[test]
    fn test_parse_syntax_errors() {
        let mut bank = TermBank::new();
        for text in [
            "(cert)",
            "(certificate (axioms) (goal (= a b)))",
            "(certificate (axioms) (goal (= a b)) (path a (step (at) (axiom 0) b)))",
        ] {
            assert!(matches!(
                parse_cert(&mut bank, text),
                Err(CertParseError::Syntax(_))
            ));
        }
    }

    #[test]
    fn test_trivial_cert() {
        let (mut bank, _) = bank_with(&[]);
        let a = bank.parse_and_intern("a").unwrap();
        let cert = ProofCert::trivial(a);
        assert_eq!(cert_tree_size(&cert), 0);
        assert_eq!(cert_dag_size(&cert), 0);
        check_cert(&bank, &cert, &[], (a, a)).unwrap();
        let text = render_cert(&bank, &cert);
        let mut bank2 = TermBank::new();
        parse_cert(&mut bank2, &text).unwrap();
    }

    #[test]
    fn test_mutations_are_rejected_or_noops() {
        use rand::{Rng, SeedableRng};
        let (bank, instance, cert) = three_step();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut rejected = 0;
        let trials = 200;
        for _ in 0..trials {
            let mut mutant = cert.clone();
            let i = rng.gen_range(0..mutant.path.steps.len());
            let step = &mut mutant.path.steps[i];
            match rng.gen_range(0..4) {
                0 => step.position = vec![rng.gen_range(0..3)],
                1 => {
                    if let StepJust::Axiom { axiom, .. } = &mut step.just {
                        *axiom = AxiomId((axiom.0 + 1) % 2);
                    }
                }
                2 => {
                    if let StepJust::Axiom { forward, .. } = &mut step.just {
                        *forward = !*forward;
                    }
                }
                _ => step.result = TermId(rng.gen_range(0..bank.len() as u32)),
            }
            if mutant == cert {
                continue;
            }
            match check_cert(&bank, &mutant, &instance, cert.goal) {
                Err(_) => rejected += 1,
                Ok(()) => {
                    // Accepted mutants must still replay to the same goal.
                    let replayed = Checker { bank: &bank, instance: &instance }
                        .replay(bank.term_of(mutant.path.start).unwrap(), &mutant.path.steps)
                        .unwrap();
                    assert_eq!(replayed, bank.term_of(cert.goal.1).unwrap());
                }
            }
        }
        assert!(rejected * 100 >= trials * 90, "only {rejected}/{trials} rejected");
    }
}
