//! Congruence closure over a term bank that keeps every equality edge it
//! ever saw. Where a classic implementation discards an input equality whose
//! endpoints are already equal, this engine records it anyway: the resulting
//! multigraph per e-class (all edges, redundant ones included) is what the
//! extraction passes mine for short proofs.
//!
//! Congruences over several argument positions are decomposed into one edge
//! per position, materializing the intermediate terms: a step from
//! `f(a, b)` to `f(c, d)` becomes `f(a, b) — f(c, b) — f(c, d)`, each edge
//! justified by the single child pair it rewrites.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::term::{TermBank, TermError, TermId};

/// One node of the c-graph; a vertex corresponds 1:1 to an interned term
/// that has been added to the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Index of an input equality, in assertion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxiomId(pub u32);

impl AxiomId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

impl EdgeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Why an edge holds. An axiom edge cites an input equality (`forward` is
/// true when the edge runs from the asserted left-hand side to the right).
/// A congruence edge cites the one child pair its endpoints differ in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Justification {
    Axiom { axiom: AxiomId, forward: bool },
    Congruence { child_left: VertexId, child_right: VertexId, arg_index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub just: Justification,
}

impl Edge {
    pub fn is_congruence(&self) -> bool {
        matches!(self.just, Justification::Congruence { .. })
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.a { self.b } else { self.a }
    }

    /// Justification children as an ordered pair following edge orientation
    /// (`a`'s child first). Only meaningful for congruence edges.
    pub fn congruence_children(&self) -> Option<(VertexId, VertexId)> {
        match self.just {
            Justification::Congruence { child_left, child_right, .. } => {
                Some((child_left, child_right))
            }
            Justification::Axiom { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("term {0} is not part of the graph")]
    UnknownTerm(TermId),
    #[error("terms are not in the same class")]
    NotEquivalent,
    #[error("snapshot requested while merges are pending")]
    PendingMerges,
    #[error("no finite-weight path exists")]
    NoFinitePath,
}

/// Redundant congruence edges are kept only while the congruence edge count
/// stays below this multiple of the non-congruence edge count. Merge-carrying
/// edges are exempt: dropping those would lose provability.
const CONGRUENCE_CAP_FACTOR: usize = 10;

#[derive(Debug, Clone, Default)]
pub struct Engine {
    bank: TermBank,
    vertex_term: Vec<TermId>,
    term_vertex: HashMap<TermId, VertexId>,
    uf_parent: Vec<u32>,
    uf_size: Vec<u32>,
    edges: Vec<Edge>,
    congruence_count: usize,
    axioms: Vec<(TermId, TermId)>,
    axiom_memo: HashMap<(TermId, TermId), AxiomId>,
    pending: VecDeque<(VertexId, VertexId, EdgeId)>,
    /// Endpoint pairs (normalized) whose decomposition chain is fully present.
    recorded_chains: HashSet<(VertexId, VertexId)>,
    /// Congruence edges that exist, keyed by endpoints and argument position.
    edge_keys: HashSet<(VertexId, VertexId, usize)>,
    /// Merge-carrying edges in merge order; spans every e-class.
    forest: Vec<EdgeId>,
    dropped_congruences: usize,
    dirty: bool,
}

impl Engine {
    pub fn new() -> Engine {
        Engine::default()
    }

    pub fn with_bank(bank: TermBank) -> Engine {
        Engine { bank, ..Engine::default() }
    }

    pub fn bank(&self) -> &TermBank {
        &self.bank
    }

    pub fn bank_mut(&mut self) -> &mut TermBank {
        &mut self.bank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_term.len()
    }

    pub fn vertex_of(&self, term: TermId) -> Option<VertexId> {
        self.term_vertex.get(&term).copied()
    }

    /// Add an interned term (and, recursively, its subterms) to the graph.
    /// Idempotent: re-adding returns the existing vertex.
    pub fn add_term(&mut self, term: TermId) -> VertexId {
        if let Some(&v) = self.term_vertex.get(&term) {
            return v;
        }
        let args: Vec<TermId> = self.bank.args(term).expect("interned term").to_vec();
        for a in args {
            self.add_term(a);
        }
        let v = VertexId(self.vertex_term.len() as u32);
        self.vertex_term.push(term);
        self.term_vertex.insert(term, v);
        self.uf_parent.push(v.0);
        self.uf_size.push(1);
        // A new application term may already be congruent to an existing one.
        self.dirty = true;
        v
    }

    /// Parse, intern and add in one step; convenient for tests.
    pub fn add_parsed(&mut self, text: &str) -> Result<VertexId, TermError> {
        let id = self.bank.parse_and_intern(text)?;
        Ok(self.add_term(id))
    }

    /// Record the input equality `lhs = rhs`. The edge is kept even when the
    /// two sides are already equal. Asserting the identical ordered pair
    /// twice returns the original axiom id and records nothing new; the
    /// flipped pair counts as a distinct axiom and a parallel edge.
    pub fn assert_equal(&mut self, lhs: TermId, rhs: TermId) -> AxiomId {
        if let Some(&id) = self.axiom_memo.get(&(lhs, rhs)) {
            return id;
        }
        let va = self.add_term(lhs);
        let vb = self.add_term(rhs);
        let axiom = AxiomId(self.axioms.len() as u32);
        self.axioms.push((lhs, rhs));
        self.axiom_memo.insert((lhs, rhs), axiom);
        let edge = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge { a: va, b: vb, just: Justification::Axiom { axiom, forward: true } });
        self.pending.push_back((va, vb, edge));
        self.dirty = true;
        axiom
    }

    pub fn find(&self, v: VertexId) -> VertexId {
        let mut cur = v.0;
        while self.uf_parent[cur as usize] != cur {
            cur = self.uf_parent[cur as usize];
        }
        VertexId(cur)
    }

    fn find_compress(&mut self, v: VertexId) -> VertexId {
        let root = self.find(v);
        let mut cur = v.0;
        while self.uf_parent[cur as usize] != root.0 {
            let next = self.uf_parent[cur as usize];
            self.uf_parent[cur as usize] = root.0;
            cur = next;
        }
        root
    }

    /// Union by size; ties keep the smaller root id as representative.
    /// Returns false when already merged.
    fn union(&mut self, a: VertexId, b: VertexId) -> bool {
        let ra = self.find_compress(a);
        let rb = self.find_compress(b);
        if ra == rb {
            return false;
        }
        let (keep, absorb) = if self.uf_size[ra.idx()] > self.uf_size[rb.idx()]
            || (self.uf_size[ra.idx()] == self.uf_size[rb.idx()] && ra < rb)
        {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.uf_parent[absorb.idx()] = keep.0;
        self.uf_size[keep.idx()] += self.uf_size[absorb.idx()];
        true
    }

    /// True when the two terms sit in one e-class. Reflects merges applied so
    /// far; call [`Engine::rebuild`] first for the full closure.
    pub fn are_equal(&self, lhs: TermId, rhs: TermId) -> Result<bool, EngineError> {
        let va = self.vertex_of(lhs).ok_or(EngineError::UnknownTerm(lhs))?;
        let vb = self.vertex_of(rhs).ok_or(EngineError::UnknownTerm(rhs))?;
        Ok(self.find(va) == self.find(vb))
    }

    fn signature(&self, v: VertexId) -> Option<(String, Vec<VertexId>)> {
        let term = self.vertex_term[v.idx()];
        let args = self.bank.args(term).expect("interned term");
        if args.is_empty() {
            return None;
        }
        let canon = args
            .iter()
            .map(|&a| self.find(self.term_vertex[&a]))
            .collect();
        Some((self.bank.head(term).expect("interned term").to_string(), canon))
    }

    /// Run merges and congruence discovery to fixpoint. Returns the number
    /// of congruence edges recorded by this call.
    pub fn rebuild(&mut self) -> usize {
        let mut added = 0;
        loop {
            let mut progress = false;
            while let Some((a, b, edge)) = self.pending.pop_front() {
                if self.union(a, b) {
                    self.forest.push(edge);
                    progress = true;
                }
            }
            // One scan of the current vertex set; the first vertex seen with
            // a given signature anchors the collision pairs for that group.
            let mut sig_map: HashMap<(String, Vec<VertexId>), VertexId> = HashMap::new();
            let mut collisions: Vec<(VertexId, VertexId)> = Vec::new();
            for i in 0..self.vertex_term.len() {
                let v = VertexId(i as u32);
                let Some(sig) = self.signature(v) else { continue };
                match sig_map.entry(sig) {
                    std::collections::hash_map::Entry::Vacant(slot) => {
                        slot.insert(v);
                    }
                    std::collections::hash_map::Entry::Occupied(slot) => {
                        collisions.push((*slot.get(), v));
                    }
                }
            }
            // Classes only coarsen, so every collected collision is still a
            // congruence when processed, even after earlier chain merges.
            for (u, v) in collisions {
                if self.record_chain(u, v, &mut added) {
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        self.dirty = false;
        added
    }

    /// Record the per-argument decomposition chain between two congruent
    /// vertices, materializing intermediate terms left to right. Returns
    /// true if any edge or merge was new.
    fn record_chain(&mut self, u: VertexId, v: VertexId, added: &mut usize) -> bool {
        let key = (u.min(v), u.max(v));
        if self.recorded_chains.contains(&key) {
            return false;
        }
        let tu = self.vertex_term[u.idx()];
        let tv = self.vertex_term[v.idx()];
        let head = self.bank.head(tu).expect("interned term").to_string();
        let u_args: Vec<TermId> = self.bank.args(tu).expect("interned term").to_vec();
        let v_args: Vec<TermId> = self.bank.args(tv).expect("interned term").to_vec();
        debug_assert_eq!(u_args.len(), v_args.len());

        let cap = CONGRUENCE_CAP_FACTOR * self.axioms.len();
        let mut progress = false;
        let mut all_present = true;
        let mut prev = u;
        let mut cur_args = u_args.clone();
        for i in 0..cur_args.len() {
            if u_args[i] == v_args[i] {
                continue;
            }
            cur_args[i] = v_args[i];
            let next = if cur_args == v_args {
                v
            } else {
                let t = self
                    .bank
                    .intern_app(&head, cur_args.clone())
                    .expect("arity is fixed by the endpoints");
                self.add_term(t)
            };
            let ekey = (prev.min(next), prev.max(next), i);
            if !self.edge_keys.contains(&ekey) {
                let child_left = self.term_vertex[&u_args[i]];
                let child_right = self.term_vertex[&v_args[i]];
                let carries_merge = self.find(prev) != self.find(next);
                if carries_merge || self.congruence_count < cap {
                    let edge = EdgeId(self.edges.len() as u32);
                    self.edges.push(Edge {
                        a: prev,
                        b: next,
                        just: Justification::Congruence { child_left, child_right, arg_index: i },
                    });
                    self.edge_keys.insert(ekey);
                    self.congruence_count += 1;
                    *added += 1;
                    progress = true;
                    if carries_merge {
                        self.union(prev, next);
                        self.forest.push(edge);
                    }
                } else {
                    self.dropped_congruences += 1;
                    all_present = false;
                }
            }
            prev = next;
        }
        if all_present {
            self.recorded_chains.insert(key);
        }
        progress
    }

    /// Freeze the current graph. Fails with [`EngineError::PendingMerges`]
    /// when asserts or added terms have not been rebuilt into the closure.
    pub fn snapshot(&self) -> Result<Snapshot, EngineError> {
        if self.dirty || !self.pending.is_empty() {
            return Err(EngineError::PendingMerges);
        }
        let n = self.vertex_term.len();
        let class_rep: Vec<VertexId> = (0..n).map(|i| self.find(VertexId(i as u32))).collect();

        let mut adjacency: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
        let mut congruence_edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let id = EdgeId(i as u32);
            adjacency[e.a.idx()].push(id);
            if e.b != e.a {
                adjacency[e.b.idx()].push(id);
            }
            if e.is_congruence() {
                congruence_edges.push(id);
            }
        }

        // Root every class tree at its representative and orient the
        // merge-carrying edges by breadth-first search from there.
        let mut forest_adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
        for &id in &self.forest {
            let e = self.edges[id.idx()];
            forest_adj[e.a.idx()].push((e.b, id));
            forest_adj[e.b.idx()].push((e.a, id));
        }
        let mut forest_parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
        let mut forest_depth: Vec<u32> = vec![0; n];
        let mut visited = vec![false; n];
        for i in 0..n {
            let root = VertexId(i as u32);
            if class_rep[i] != root || visited[i] {
                continue;
            }
            let mut queue = VecDeque::from([root]);
            visited[i] = true;
            while let Some(cur) = queue.pop_front() {
                for &(next, edge) in &forest_adj[cur.idx()] {
                    if !visited[next.idx()] {
                        visited[next.idx()] = true;
                        forest_parent[next.idx()] = Some((cur, edge));
                        forest_depth[next.idx()] = forest_depth[cur.idx()] + 1;
                        queue.push_back(next);
                    }
                }
            }
        }
        debug_assert!(visited.iter().enumerate().all(|(i, &seen)| {
            seen || class_rep[i] != VertexId(i as u32)
        }));

        Ok(Snapshot {
            bank: self.bank.clone(),
            vertex_term: self.vertex_term.clone(),
            term_vertex: self.term_vertex.clone(),
            edges: self.edges.clone(),
            congruence_edges,
            axioms: self.axioms.clone(),
            adjacency,
            class_rep,
            forest_parent,
            forest_depth,
            dropped_congruences: self.dropped_congruences,
        })
    }
}

/// An edge traversed in a particular direction: `reversed` means from `b`
/// to `a` of the stored endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub reversed: bool,
}

impl OrientedEdge {
    pub fn forward(edge: EdgeId) -> OrientedEdge {
        OrientedEdge { edge, reversed: false }
    }

    pub fn endpoints(&self, snap: &Snapshot) -> (VertexId, VertexId) {
        let e = snap.edge(self.edge);
        if self.reversed { (e.b, e.a) } else { (e.a, e.b) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathResult {
    pub total: u64,
    pub edges: Vec<OrientedEdge>,
}

/// Immutable view of the c-graph at one point in time: vertex table, every
/// recorded edge, the congruence subset, and the reduced forest. Goal
/// independent; later engine mutation does not touch it.
#[derive(Debug, Clone)]
pub struct Snapshot {
    bank: TermBank,
    vertex_term: Vec<TermId>,
    term_vertex: HashMap<TermId, VertexId>,
    edges: Vec<Edge>,
    congruence_edges: Vec<EdgeId>,
    axioms: Vec<(TermId, TermId)>,
    adjacency: Vec<Vec<EdgeId>>,
    class_rep: Vec<VertexId>,
    forest_parent: Vec<Option<(VertexId, EdgeId)>>,
    forest_depth: Vec<u32>,
    dropped_congruences: usize,
}

impl Snapshot {
    pub fn bank(&self) -> &TermBank {
        &self.bank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_term.len()
    }

    pub fn vertex_term(&self, v: VertexId) -> TermId {
        self.vertex_term[v.idx()]
    }

    pub fn vertex_of(&self, term: TermId) -> Option<VertexId> {
        self.term_vertex.get(&term).copied()
    }

    /// Vertex for a term given as text, if that exact term is in the graph.
    pub fn vertex_of_text(&self, text: &str) -> Option<VertexId> {
        let term = crate::term::parse_term(text).ok()?;
        self.vertex_of(self.bank.find_term(&term)?)
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.idx()]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(|i| EdgeId(i as u32))
    }

    pub fn congruence_edges(&self) -> &[EdgeId] {
        &self.congruence_edges
    }

    pub fn axiom_edge_count(&self) -> usize {
        self.edges.len() - self.congruence_edges.len()
    }

    pub fn axioms(&self) -> &[(TermId, TermId)] {
        &self.axioms
    }

    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.adjacency[v.idx()]
    }

    pub fn representative(&self, v: VertexId) -> VertexId {
        self.class_rep[v.idx()]
    }

    pub fn same_class(&self, a: VertexId, b: VertexId) -> bool {
        self.class_rep[a.idx()] == self.class_rep[b.idx()]
    }

    pub fn forest_parent(&self, v: VertexId) -> Option<(VertexId, EdgeId)> {
        self.forest_parent[v.idx()]
    }

    pub fn forest_depth(&self, v: VertexId) -> u32 {
        self.forest_depth[v.idx()]
    }

    /// Number of redundant congruence edges dropped at the retention cap.
    pub fn dropped_congruence_count(&self) -> usize {
        self.dropped_congruences
    }

    /// Justification children of a congruence edge, oriented along the
    /// given traversal direction.
    pub fn oriented_children(&self, oe: OrientedEdge) -> Option<(VertexId, VertexId)> {
        let (l, r) = self.edge(oe.edge).congruence_children()?;
        Some(if oe.reversed { (r, l) } else { (l, r) })
    }

    fn step_up(&self, v: VertexId, path: &mut Vec<OrientedEdge>) -> VertexId {
        let (parent, edge) = self.forest_parent[v.idx()].expect("not at root");
        let e = &self.edges[edge.idx()];
        path.push(OrientedEdge { edge, reversed: e.a != v });
        parent
    }

    /// Unique path between two same-class vertices through the reduced
    /// forest, joined at their lowest common ancestor.
    pub fn forest_path(&self, a: VertexId, b: VertexId) -> Result<Vec<OrientedEdge>, EngineError> {
        if !self.same_class(a, b) {
            return Err(EngineError::NotEquivalent);
        }
        let mut up = Vec::new();
        let mut down = Vec::new();
        let (mut x, mut y) = (a, b);
        while self.forest_depth[x.idx()] > self.forest_depth[y.idx()] {
            x = self.step_up(x, &mut up);
        }
        while self.forest_depth[y.idx()] > self.forest_depth[x.idx()] {
            y = self.step_up(y, &mut down);
        }
        while x != y {
            x = self.step_up(x, &mut up);
            y = self.step_up(y, &mut down);
        }
        for oe in down.into_iter().rev() {
            up.push(OrientedEdge { edge: oe.edge, reversed: !oe.reversed });
        }
        Ok(up)
    }

    /// Lowest common ancestor of two same-class vertices in the forest.
    pub fn forest_lca(&self, a: VertexId, b: VertexId) -> Result<VertexId, EngineError> {
        if !self.same_class(a, b) {
            return Err(EngineError::NotEquivalent);
        }
        let (mut x, mut y) = (a, b);
        let mut sink = Vec::new();
        while self.forest_depth[x.idx()] > self.forest_depth[y.idx()] {
            x = self.step_up(x, &mut sink);
        }
        while self.forest_depth[y.idx()] > self.forest_depth[x.idx()] {
            y = self.step_up(y, &mut sink);
        }
        while x != y {
            x = self.step_up(x, &mut sink);
            y = self.step_up(y, &mut sink);
        }
        Ok(x)
    }

    /// Least-weight path between two same-class vertices over the whole
    /// c-graph. `weight` gives each edge's cost (`None` marks it unusable);
    /// ties prefer fewer edges, then the smaller maximum edge id.
    pub fn weighted_shortest_path(
        &self,
        s: VertexId,
        t: VertexId,
        weight: &dyn Fn(EdgeId) -> Option<u64>,
    ) -> Result<PathResult, EngineError> {
        if !self.same_class(s, t) {
            return Err(EngineError::NotEquivalent);
        }
        if s == t {
            return Ok(PathResult { total: 0, edges: Vec::new() });
        }

        type Label = (u64, u32, u32); // (weight, hops, max edge id)
        let mut best: Vec<Option<Label>> = vec![None; self.vertex_term.len()];
        let mut pred: Vec<Option<(VertexId, OrientedEdge)>> = vec![None; self.vertex_term.len()];
        let mut heap = std::collections::BinaryHeap::new();
        best[s.idx()] = Some((0, 0, 0));
        heap.push(std::cmp::Reverse(((0u64, 0u32, 0u32), s)));

        while let Some(std::cmp::Reverse((label, v))) = heap.pop() {
            if best[v.idx()] != Some(label) {
                continue;
            }
            if v == t {
                break;
            }
            for &eid in &self.adjacency[v.idx()] {
                let Some(w) = weight(eid) else { continue };
                let e = &self.edges[eid.idx()];
                if e.a == e.b {
                    continue;
                }
                let next = e.other(v);
                let cand: Label = (
                    label.0.saturating_add(w),
                    label.1 + 1,
                    label.2.max(eid.0),
                );
                if best[next.idx()].is_none_or(|cur| cand < cur) {
                    best[next.idx()] = Some(cand);
                    pred[next.idx()] = Some((v, OrientedEdge { edge: eid, reversed: e.a != v }));
                    heap.push(std::cmp::Reverse((cand, next)));
                }
            }
        }

        let Some((total, _, _)) = best[t.idx()] else {
            return Err(EngineError::NoFinitePath);
        };
        let mut edges = Vec::new();
        let mut cur = t;
        while cur != s {
            let (prev, oe) = pred[cur.idx()].expect("reached vertex has predecessor");
            edges.push(oe);
            cur = prev;
        }
        edges.reverse();
        Ok(PathResult { total, edges })
    }
}
