//! Shared fixtures and a small CPLEX-LP reader for the integration suites.

#![allow(dead_code)]

use ccproof::engine::{Snapshot, VertexId};
use ccproof::instance::Instance;
use ccproof::term::TermId;

/// Two axioms, both used twice through shared subterms: minimum tree size 3,
/// minimum DAG size 2.
pub const SHARED_SUBTERMS: &str = "\
(assert (= (+ a 0) a))
(assert (= (+ 2 2) 4))
(prove (= (f (+ a 0) (g (+ a 0) (+ 2 2))) (f a (g a 4))))
";

/// Triangle of asserted equalities: the redundant third edge gives the
/// one-step proof; a closure that forgot it would be stuck with two steps.
pub const TRIANGLE: &str = "\
(assert (= a b))
(assert (= b c))
(assert (= a c))
(prove (= a c))
";

/// One axiom applied at two depths of a nested sum: exactly one congruence
/// edge, optimal tree size 2, DAG size 1.
pub const TOWER: &str = "\
(assert (= (+ a 0) a))
(prove (= (+ (+ a 0) 0) a))
";

/// Parse an instance, replay it, and hand back the snapshot together with
/// the goal as term ids and as vertices.
pub fn load(text: &str) -> (Snapshot, (TermId, TermId), (VertexId, VertexId)) {
    let inst = Instance::parse(text).expect("fixture parses");
    let (eng, (gl, gr)) = inst.build_engine().expect("fixture arities are consistent");
    let snap = eng.snapshot().expect("rebuilt");
    let s = snap.vertex_of(gl).expect("goal term present");
    let t = snap.vertex_of(gr).expect("goal term present");
    (snap, (gl, gr), (s, t))
}

// ---------------------------------------------------------------------------
// CPLEX LP text reader (integer coefficients only, the subset we emit)

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub name: String,
    pub terms: Vec<(i64, String)>,
    pub cmp: Cmp,
    pub rhs: i64,
}

#[derive(Debug, Clone, Default)]
pub struct LpModel {
    pub objective: Vec<(i64, String)>,
    pub rows: Vec<LpRow>,
    /// (variable, lower, upper)
    pub bounds: Vec<(String, i64, i64)>,
    pub binaries: Vec<String>,
    pub generals: Vec<String>,
}

impl LpModel {
    pub fn row(&self, name: &str) -> Option<&LpRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn variables(&self) -> impl Iterator<Item = &String> {
        self.binaries.iter().chain(self.generals.iter())
    }
}

pub fn parse_lp(text: &str) -> LpModel {
    #[derive(PartialEq)]
    enum Sec {
        Preamble,
        Objective,
        Rows,
        Bounds,
        Binary,
        General,
        Done,
    }
    let mut sec = Sec::Preamble;
    let mut model = LpModel::default();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line {
            "Minimize" => {
                sec = Sec::Objective;
                continue;
            }
            "Subject To" => {
                sec = Sec::Rows;
                continue;
            }
            "Bounds" => {
                sec = Sec::Bounds;
                continue;
            }
            "Binary" => {
                sec = Sec::Binary;
                continue;
            }
            "General" => {
                sec = Sec::General;
                continue;
            }
            "End" => {
                sec = Sec::Done;
                continue;
            }
            _ => {}
        }
        match sec {
            Sec::Objective => {
                let expr = line.strip_prefix("obj:").unwrap_or(line);
                model.objective.extend(parse_linear(expr));
            }
            Sec::Rows => {
                let (name, rest) = line.split_once(':').expect("row label");
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                let cmp_at = tokens
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "="))
                    .expect("comparator");
                let cmp = match tokens[cmp_at] {
                    "<=" => Cmp::Le,
                    ">=" => Cmp::Ge,
                    _ => Cmp::Eq,
                };
                let rhs: i64 = tokens[cmp_at + 1..].concat().parse().expect("integer rhs");
                model.rows.push(LpRow {
                    name: name.trim().to_string(),
                    terms: parse_linear(&tokens[..cmp_at].join(" ")),
                    cmp,
                    rhs,
                });
            }
            Sec::Bounds => {
                let t: Vec<&str> = line.split_whitespace().collect();
                assert!(
                    t.len() == 5 && t[1] == "<=" && t[3] == "<=",
                    "bounds row shape: {line}"
                );
                model.bounds.push((
                    t[2].to_string(),
                    t[0].parse().expect("lower bound"),
                    t[4].parse().expect("upper bound"),
                ));
            }
            Sec::Binary => model.binaries.push(line.to_string()),
            Sec::General => model.generals.push(line.to_string()),
            Sec::Preamble | Sec::Done => panic!("unexpected content: {line}"),
        }
    }
    assert!(sec == Sec::Done, "missing End marker");
    model
}

fn parse_linear(expr: &str) -> Vec<(i64, String)> {
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut coeff: Option<i64> = None;
    for tok in expr.split_whitespace() {
        match tok {
            "+" => sign = 1,
            "-" => sign = -1,
            _ => {
                if let Ok(n) = tok.parse::<i64>() {
                    coeff = Some(n);
                } else {
                    terms.push((sign * coeff.take().unwrap_or(1), tok.to_string()));
                    sign = 1;
                }
            }
        }
    }
    assert!(coeff.is_none(), "dangling coefficient in {expr:?}");
    terms
}

/// Split an underscore-separated variable name into its numeric indices,
/// e.g. `S_3_7` -> [3, 7].
pub fn var_indices(name: &str) -> Vec<u32> {
    name.split('_').skip(1).map(|p| p.parse().expect("numeric index")).collect()
}
