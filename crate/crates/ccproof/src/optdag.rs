//! Minimum-DAG-size machinery: the e-connectivity fixpoint that decides
//! whether an edge subset proves a goal, exhaustive oracles for minimum DAG
//! and tree sizes on small instances, and emission of the minimum-DAG
//! problem as an integer linear program in CPLEX LP text format.
//!
//! The oracles exist to pin down ground truth: the optimizing extractors
//! are checked against them on instances small enough to enumerate.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::engine::{AxiomId, EdgeId, EngineError, Justification, Snapshot, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OptdagError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("instance exceeds exhaustive-search limits")]
    TooLarge,
    #[error("cycle-breaking bound exceeds the emission limit")]
    BoundOverflow,
}

/// Instance-size caps for the exhaustive oracles.
#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_axiom_edges: usize,
    pub max_vertices: usize,
    pub max_congruence_edges: usize,
}

impl Default for OracleLimits {
    fn default() -> OracleLimits {
        OracleLimits { max_axiom_edges: 20, max_vertices: 14, max_congruence_edges: 4 }
    }
}

struct Dsu(Vec<u32>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n as u32).collect())
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.0[root as usize] != root {
            root = self.0[root as usize];
        }
        let mut cur = v;
        while self.0[cur as usize] != root {
            let next = self.0[cur as usize];
            self.0[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra as usize] = rb;
    }
}

/// Does the edge subset picked out by `usable` e-connect `s` and `t`?
///
/// Connectivity is the least fixpoint: axiom edges connect their endpoints
/// outright, and a congruence edge joins in only once its justification
/// children are connected by edges already in — an edge can never justify
/// itself, directly or through a cycle.
pub fn fixpoint_e_connected(
    snap: &Snapshot,
    usable: &dyn Fn(EdgeId) -> bool,
    s: VertexId,
    t: VertexId,
) -> bool {
    let mut dsu = Dsu::new(snap.vertex_count());
    let mut waiting = Vec::new();
    for e in snap.edge_ids() {
        if !usable(e) {
            continue;
        }
        let edge = snap.edge(e);
        if edge.is_congruence() {
            waiting.push(e);
        } else {
            dsu.union(edge.a.0, edge.b.0);
        }
    }
    loop {
        let mut progressed = false;
        waiting.retain(|&e| {
            let edge = snap.edge(e);
            let (l, r) = edge.congruence_children().expect("congruence edge");
            if dsu.find(l.0) == dsu.find(r.0) {
                dsu.union(edge.a.0, edge.b.0);
                progressed = true;
                false
            } else {
                true
            }
        });
        if !progressed {
            break;
        }
    }
    dsu.find(s.0) == dsu.find(t.0)
}

/// Exhaustive minimum DAG size with the smallest witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteDag {
    pub size: u64,
    /// Lexicographically least minimum-cardinality axiom set proving the
    /// goal (all congruence edges stay available).
    pub axioms: Vec<AxiomId>,
}

pub fn brute_min_dag(
    snap: &Snapshot,
    a: VertexId,
    b: VertexId,
    limits: &OracleLimits,
) -> Result<BruteDag, OptdagError> {
    if !snap.same_class(a, b) {
        return Err(EngineError::NotEquivalent.into());
    }
    let m = snap.axioms().len();
    if m > limits.max_axiom_edges {
        return Err(OptdagError::TooLarge);
    }
    if a == b {
        return Ok(BruteDag { size: 0, axioms: Vec::new() });
    }
    for k in 0..=m {
        let mut combos = Combinations::new(m, k);
        while let Some(combo) = combos.next() {
            let chosen: Vec<bool> = {
                let mut v = vec![false; m];
                for &i in combo {
                    v[i] = true;
                }
                v
            };
            let usable = |e: EdgeId| match snap.edge(e).just {
                Justification::Axiom { axiom, .. } => chosen[axiom.idx()],
                Justification::Congruence { .. } => true,
            };
            if fixpoint_e_connected(snap, &usable, a, b) {
                return Ok(BruteDag {
                    size: k as u64,
                    axioms: combo.iter().map(|&i| AxiomId(i as u32)).collect(),
                });
            }
        }
    }
    unreachable!("same-class vertices are provable from the full axiom set");
}

/// Lexicographic k-subsets of 0..m as a lending iterator.
struct Combinations {
    idx: Vec<usize>,
    m: usize,
    fresh: bool,
    done: bool,
}

impl Combinations {
    fn new(m: usize, k: usize) -> Combinations {
        Combinations { idx: (0..k).collect(), m, fresh: true, done: k > m }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.idx[i] < self.m - k + i {
                break;
            }
        }
        self.idx[i] += 1;
        for j in i + 1..k {
            self.idx[j] = self.idx[j - 1] + 1;
        }
        Some(&self.idx)
    }
}

/// Exhaustive minimum tree size for `a = b`.
///
/// Since every edge costs at least one, an optimal walk never revisits a
/// vertex, so simple paths suffice. A congruence edge's subproof may not use
/// the edge itself nor any edge currently being expanded above it — that
/// set rides along as a bitmask, and results are memoized per (pair, mask).
pub fn brute_min_tree(
    snap: &Snapshot,
    a: VertexId,
    b: VertexId,
    limits: &OracleLimits,
) -> Result<u64, OptdagError> {
    if !snap.same_class(a, b) {
        return Err(EngineError::NotEquivalent.into());
    }
    if snap.vertex_count() > limits.max_vertices
        || snap.congruence_edges().len() > limits.max_congruence_edges
    {
        return Err(OptdagError::TooLarge);
    }
    let cong_bit: HashMap<EdgeId, u32> = snap
        .congruence_edges()
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i as u32))
        .collect();
    let mut search = TreeSearch { snap, cong_bit, memo: HashMap::new() };
    Ok(search.pair_cost(a, b, 0).expect("same-class pair has a proof"))
}

struct TreeSearch<'s> {
    snap: &'s Snapshot,
    cong_bit: HashMap<EdgeId, u32>,
    memo: HashMap<(VertexId, VertexId, u32), Option<u64>>,
}

impl TreeSearch<'_> {
    fn pair_cost(&mut self, s: VertexId, t: VertexId, banned: u32) -> Option<u64> {
        if s == t {
            return Some(0);
        }
        let key = if s <= t { (s, t, banned) } else { (t, s, banned) };
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let mut visited = vec![false; self.snap.vertex_count()];
        visited[s.idx()] = true;
        let mut best = None;
        self.dfs(s, t, banned, &mut visited, 0, &mut best);
        self.memo.insert(key, best);
        best
    }

    fn dfs(
        &mut self,
        v: VertexId,
        t: VertexId,
        banned: u32,
        visited: &mut Vec<bool>,
        cost: u64,
        best: &mut Option<u64>,
    ) {
        if v == t {
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            return;
        }
        for &eid in self.snap.incident_edges(v) {
            let edge = self.snap.edge(eid);
            if edge.a == edge.b {
                continue;
            }
            let next = edge.other(v);
            if visited[next.idx()] {
                continue;
            }
            let step = match edge.congruence_children() {
                None => Some(1),
                Some((l, r)) => {
                    let bit = 1 << self.cong_bit[&eid];
                    if banned & bit != 0 {
                        None
                    } else {
                        self.pair_cost(l, r, banned | bit)
                    }
                }
            };
            let Some(step) = step else { continue };
            let total = cost + step;
            if best.is_some_and(|b| total >= b) {
                continue;
            }
            visited[next.idx()] = true;
            self.dfs(next, t, banned, visited, total, best);
            visited[next.idx()] = false;
        }
    }
}

// ---------------------------------------------------------------------------
// ILP emission

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpSummary {
    pub variables: usize,
    /// How many of `variables` are congruence selections (M variables).
    pub m_variables: usize,
    pub constraints: usize,
    /// Big-M constant breaking justification cycles.
    pub ell: u64,
}

/// Maximum `ell` the emitter will write into a model.
pub const ILP_BOUND_LIMIT: u64 = 1_000_000;

/// Emit the minimum-DAG-size problem for `s = t` as a CPLEX LP model.
///
/// Binary selection variables: `S_i_j` picks the axiom edge between vertices
/// i and j (both orientations, tied by symmetry rows), `M_i_j_l_r` the
/// congruence edge with child pair (l, r). Connectivity is encoded by
/// first-step variables `P_i_k_j` (a proof of i = j starting with a usable
/// edge to k), reachability `C_i_j`, and per-pair edge usability `V_i_j`;
/// integer distances `D_i_j` forbid cyclic justifications via big-M rows.
/// The objective counts each selected axiom edge once, so the optimum equals
/// the minimum DAG size.
pub fn emit_ilp(
    snap: &Snapshot,
    s: VertexId,
    t: VertexId,
) -> Result<(String, IlpSummary), OptdagError> {
    let n = snap.vertex_count();
    let edge_count = snap.edge_count();
    let cong_count = snap.congruence_edges().len();

    let ell_big = {
        let e = BigUint::from(edge_count);
        let c = BigUint::from(cong_count);
        let pow = c.pow(cong_count as u32 + 1) * &e;
        pow.max(e)
    };
    if ell_big > BigUint::from(ILP_BOUND_LIMIT) {
        return Err(OptdagError::BoundOverflow);
    }
    let ell: u64 = ell_big.try_into().expect("bounded above");

    // Per ordered vertex pair: whether an axiom edge links it, and the
    // child pairs of congruence edges linking it. Self-loops are inert for
    // connectivity and are not emitted.
    let mut has_s: HashMap<(u32, u32), bool> = HashMap::new();
    let mut m_children: HashMap<(u32, u32), Vec<(u32, u32)>> = HashMap::new();
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
    for e in snap.edge_ids() {
        let edge = snap.edge(e);
        if edge.a == edge.b {
            continue;
        }
        let (a, b) = (edge.a.0, edge.b.0);
        for (i, j) in [(a, b), (b, a)] {
            neighbors[i as usize].push(j);
            match edge.just {
                Justification::Axiom { .. } => {
                    has_s.insert((i, j), true);
                }
                Justification::Congruence { child_left, child_right, .. } => {
                    let (l, r) = if i == a {
                        (child_left.0, child_right.0)
                    } else {
                        (child_right.0, child_left.0)
                    };
                    m_children.entry((i, j)).or_default().push((l, r));
                }
            }
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
        list.dedup();
    }
    let adjacent: Vec<(u32, u32)> = {
        let mut v = Vec::new();
        for i in 0..n as u32 {
            for &j in &neighbors[i as usize] {
                v.push((i, j));
            }
        }
        v
    };

    let mut vars = 0usize;
    let mut rows: Vec<String> = Vec::new();
    let mut binary: Vec<String> = Vec::new();
    let mut general: Vec<String> = Vec::new();
    let mut bounds: Vec<String> = Vec::new();

    // Objective: one term per axiom-linked unordered pair.
    let mut objective: Vec<String> = Vec::new();
    for &(i, j) in &adjacent {
        if i < j && has_s.contains_key(&(i, j)) {
            objective.push(format!("S_{i}_{j}"));
        }
    }

    // S variables and symmetry.
    for &(i, j) in &adjacent {
        if has_s.contains_key(&(i, j)) {
            binary.push(format!("S_{i}_{j}"));
            vars += 1;
            if i < j {
                rows.push(format!("S_{i}_{j} - S_{j}_{i} = 0"));
            }
        }
    }

    // M variables and symmetry.
    let mut m_vars = 0usize;
    for &(i, j) in &adjacent {
        for &(l, r) in m_children.get(&(i, j)).map_or(&[][..], |v| v) {
            binary.push(format!("M_{i}_{j}_{l}_{r}"));
            vars += 1;
            m_vars += 1;
            if i < j {
                rows.push(format!("M_{i}_{j}_{l}_{r} - M_{j}_{i}_{r}_{l} = 0"));
            }
        }
    }

    // V variables: usable edge between i and j.
    for &(i, j) in &adjacent {
        binary.push(format!("V_{i}_{j}"));
        vars += 1;
        let mut row = format!("V_{i}_{j}");
        if has_s.contains_key(&(i, j)) {
            row.push_str(&format!(" - S_{i}_{j}"));
        }
        for &(l, r) in m_children.get(&(i, j)).map_or(&[][..], |v| v) {
            row.push_str(&format!(" - M_{i}_{j}_{l}_{r}"));
        }
        rows.push(format!("{row} <= 0"));
    }

    // C variables: i proves equal to j. Diagonal entries are facts.
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            binary.push(format!("C_{i}_{j}"));
            vars += 1;
            if i == j {
                rows.push(format!("C_{i}_{i} = 1"));
            }
        }
    }

    // P variables: proof of i = j whose first step crosses to neighbor k.
    for i in 0..n as u32 {
        for &k in &neighbors[i as usize] {
            for j in 0..n as u32 {
                if j == i {
                    continue;
                }
                binary.push(format!("P_{i}_{k}_{j}"));
                vars += 1;
                rows.push(format!("P_{i}_{k}_{j} - V_{i}_{k} <= 0"));
                if k != j {
                    rows.push(format!("P_{i}_{k}_{j} - C_{k}_{j} <= 0"));
                }
            }
        }
    }

    // C decomposition: a proof is exactly one first step.
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            if i == j {
                continue;
            }
            let mut row = format!("C_{i}_{j}");
            for &k in &neighbors[i as usize] {
                row.push_str(&format!(" - P_{i}_{k}_{j}"));
            }
            rows.push(format!("{row} = 0"));
        }
    }

    // D variables: cycle-breaking distances, zero on the diagonal (those
    // entries are substituted away rather than emitted).
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            if i == j {
                continue;
            }
            general.push(format!("D_{i}_{j}"));
            vars += 1;
            bounds.push(format!("0 <= D_{i}_{j} <= {ell}"));
            rows.push(format!("D_{i}_{j} >= 1"));
        }
    }

    // No cycles: choosing a first step or a congruence edge orders the
    // distances. Rows where the substituted D terms cancel are vacuous and
    // are not emitted.
    for i in 0..n as u32 {
        for &k in &neighbors[i as usize] {
            for j in 0..n as u32 {
                if j == i || j == k {
                    continue;
                }
                rows.push(format!(
                    "- {ell} P_{i}_{k}_{j} + D_{i}_{j} - D_{k}_{j} - D_{i}_{k} >= -{ell}"
                ));
            }
        }
    }
    for &(i, j) in &adjacent {
        for &(l, r) in m_children.get(&(i, j)).map_or(&[][..], |v| v) {
            rows.push(format!("- {ell} M_{i}_{j}_{l}_{r} + D_{i}_{j} - D_{l}_{r} >= -{ell}"));
        }
    }

    // Goal.
    if s != t {
        rows.push(format!("C_{}_{} = 1", s.0, t.0));
    }

    let mut out = String::new();
    out.push_str(&format!(
        "\\ Minimum DAG size for proving {} = {}\n",
        snap.bank().print_term(snap.vertex_term(s)).expect("interned"),
        snap.bank().print_term(snap.vertex_term(t)).expect("interned"),
    ));
    out.push_str("Minimize\n obj:");
    for (i, term) in objective.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { " + " });
        out.push_str(term);
    }
    out.push_str("\nSubject To\n");
    for (i, row) in rows.iter().enumerate() {
        out.push_str(&format!(" c{i}: {row}\n"));
    }
    out.push_str("Bounds\n");
    for b in &bounds {
        out.push_str(&format!(" {b}\n"));
    }
    out.push_str("Binary\n");
    for v in &binary {
        out.push_str(&format!(" {v}\n"));
    }
    out.push_str("General\n");
    for v in &general {
        out.push_str(&format!(" {v}\n"));
    }
    out.push_str("End\n");

    let summary = IlpSummary { variables: vars, m_variables: m_vars, constraints: rows.len(), ell };
    Ok((out, summary))
}
