//! Matchings, path-and-cycle decompositions and feasibility.
//!
//! The split graph has a left copy (out-role) and a right copy (in-role) of
//! every vertex, with left `u` joined to right `v` for each edge `(u, v)`.
//! A matching leaves some left copies free; those vertices are the tips of
//! the induced path-and-cycle decomposition.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::digraph::{SccDecomposition, StateDigraph, VertexSet};

pub(crate) const NIL: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PncError {
    #[error("sensor set {0:?} is not a feasible solution")]
    Infeasible(Vec<usize>),
}

/// Bipartite matcher over the split graph.
///
/// Left copies may be blocked (deleted). Optionally each left copy carries
/// one extra edge to a "slot" right node standing for its sink-SCC.
#[derive(Clone)]
pub(crate) struct Matcher<'a> {
    g: &'a StateDigraph,
    slot: Vec<usize>,
    blocked: Vec<bool>,
    pub(crate) mate_l: Vec<usize>,
    pub(crate) mate_r: Vec<usize>,
}

impl<'a> Matcher<'a> {
    pub(crate) fn new(g: &'a StateDigraph) -> Self {
        let n = g.n();
        Self { g, slot: vec![NIL; n], blocked: vec![false; n], mate_l: vec![NIL; n], mate_r: vec![NIL; n] }
    }

    /// Matcher with the left copies of `f` (1-indexed) deleted.
    pub(crate) fn blocking<I: IntoIterator<Item = usize>>(g: &'a StateDigraph, f: I) -> Self {
        let mut m = Self::new(g);
        for v in f {
            m.blocked[v - 1] = true;
        }
        m
    }

    pub(crate) fn n(&self) -> usize {
        self.g.n()
    }

    /// Deletes left copy `u`, releasing its matched right node.
    pub(crate) fn block(&mut self, u: usize) {
        self.blocked[u] = true;
        let r = self.mate_l[u];
        if r != NIL {
            self.mate_r[r] = NIL;
            self.mate_l[u] = NIL;
        }
    }

    pub(crate) fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
    }

    /// Adds one slot right node per sink component, reachable from the
    /// left copies of that component's vertices (or only from `allowed`).
    pub(crate) fn add_sink_slots(&mut self, scc: &SccDecomposition, allowed: Option<&VertexSet>) {
        let n = self.n();
        for (k, &c) in scc.sinks.iter().enumerate() {
            for &v in &scc.components[c] {
                if allowed.is_none_or(|a| a.contains(&v)) {
                    self.slot[v - 1] = n + k;
                }
            }
        }
        self.mate_r.resize(n + scc.sinks.len(), NIL);
    }

    fn nbrs(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        let s = self.slot[u];
        (s != NIL).then_some(s).into_iter().chain(self.g.succ0(u).iter().copied())
    }

    /// Number of matched left copies.
    pub(crate) fn size(&self) -> usize {
        self.mate_l.iter().filter(|&&r| r != NIL).count()
    }

    fn loops(&self) -> usize {
        (0..self.n()).filter(|&u| self.mate_l[u] == u).count()
    }

    /// Moves vertices onto their self-loops while the matched left copies
    /// stay the same.
    pub(crate) fn keep_self_loops(&mut self) {
        for u in 0..self.n() {
            if self.blocked[u] || self.mate_l[u] == u || !self.g.has_edge(u + 1, u + 1) {
                continue;
            }
            let mut trial = self.clone();
            let w = trial.mate_r[u];
            let a = trial.mate_l[u];
            if a != NIL {
                trial.mate_r[a] = NIL;
            }
            if w != NIL {
                trial.mate_l[w] = NIL;
            }
            trial.mate_l[u] = u;
            trial.mate_r[u] = u;
            let repaired = w == NIL || a == NIL || trial.augment_from(w);
            let same_lefts = (0..self.n()).all(|x| (trial.mate_l[x] == NIL) == (self.mate_l[x] == NIL));
            if repaired && same_lefts && trial.loops() > self.loops() {
                *self = trial;
            }
        }
    }

    /// Hopcroft-Karp phases from the current matching until maximum.
    pub(crate) fn hopcroft_karp(&mut self) {
        let n = self.n();
        let mut dist = vec![usize::MAX; n];
        loop {
            let mut queue = VecDeque::new();
            for u in 0..n {
                if !self.blocked[u] && self.mate_l[u] == NIL {
                    dist[u] = 0;
                    queue.push_back(u);
                } else {
                    dist[u] = usize::MAX;
                }
            }
            let mut found = false;
            while let Some(u) = queue.pop_front() {
                for r in self.nbrs(u) {
                    let w = self.mate_r[r];
                    if w == NIL {
                        found = true;
                    } else if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if !found {
                return;
            }
            for u in 0..n {
                if !self.blocked[u] && self.mate_l[u] == NIL {
                    self.layered_dfs(u, &mut dist);
                }
            }
        }
    }

    fn layered_dfs(&mut self, u: usize, dist: &mut [usize]) -> bool {
        let d = dist[u];
        dist[u] = usize::MAX;
        let nb: Vec<usize> = self.nbrs(u).collect();
        for r in nb {
            let w = self.mate_r[r];
            if w == NIL || (dist[w] == d + 1 && self.layered_dfs(w, dist)) {
                self.mate_l[u] = r;
                self.mate_r[r] = u;
                return true;
            }
        }
        false
    }

    /// Searches one augmenting path starting at the free left copy `u`
    /// and applies it. Returns whether the matching grew.
    pub(crate) fn augment_from(&mut self, u: usize) -> bool {
        if self.blocked[u] || self.mate_l[u] != NIL {
            return false;
        }
        let mut parent = vec![NIL; self.mate_r.len()];
        let mut seen_l = vec![false; self.n()];
        let mut queue = VecDeque::from([u]);
        seen_l[u] = true;
        let mut end = NIL;
        'search: while let Some(x) = queue.pop_front() {
            for r in self.nbrs(x) {
                if parent[r] != NIL {
                    continue;
                }
                parent[r] = x;
                let w = self.mate_r[r];
                if w == NIL {
                    end = r;
                    break 'search;
                }
                if !seen_l[w] {
                    seen_l[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if end == NIL {
            return false;
        }
        let mut r = end;
        loop {
            let x = parent[r];
            let prev = self.mate_l[x];
            self.mate_l[x] = r;
            self.mate_r[r] = x;
            if x == u {
                return true;
            }
            r = prev;
        }
    }

    /// Whether every unblocked left copy is matched.
    pub(crate) fn saturates(&self) -> bool {
        (0..self.n()).all(|u| self.blocked[u] || self.mate_l[u] != NIL)
    }

    pub(crate) fn to_matching(&self) -> Matching {
        let n = self.n();
        let mut mate_out = vec![None; n];
        let mut mate_in = vec![None; n];
        for u in 0..n {
            let r = self.mate_l[u];
            if r < n {
                mate_out[u] = Some(r + 1);
                mate_in[r] = Some(u + 1);
            }
        }
        let size = mate_out.iter().flatten().count();
        Matching { mate_out, mate_in, size }
    }
}

/// A matching of the split graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    mate_out: Vec<Option<usize>>,
    mate_in: Vec<Option<usize>>,
    size: usize,
}

impl Matching {
    /// Matched successor of `v`.
    pub fn mate_out(&self, v: usize) -> Option<usize> {
        self.mate_out[v - 1]
    }

    /// Matched predecessor of `v`.
    pub fn mate_in(&self, v: usize) -> Option<usize> {
        self.mate_in[v - 1]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Matched edges `(u, v)` in order of `u`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.mate_out.iter().enumerate().filter_map(|(u, v)| v.map(|v| (u + 1, v))).collect()
    }
}

/// Maximum matching of the split graph.
pub fn max_matching(g: &StateDigraph) -> Matching {
    let mut m = Matcher::new(g);
    m.hopcroft_karp();
    m.to_matching()
}

/// Spanning union of disjoint paths and cycles.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PncDecomposition {
    pub paths: Vec<Vec<usize>>,
    pub cycles: Vec<Vec<usize>>,
    pub tips: VertexSet,
}

/// Decomposition induced by following matched successors.
pub fn decomposition_of(g: &StateDigraph, m: &Matching) -> PncDecomposition {
    let n = g.n();
    let mut used = vec![false; n + 1];
    let mut paths = Vec::new();
    for v in 1..=n {
        if m.mate_in(v).is_none() {
            let mut path = vec![v];
            used[v] = true;
            let mut cur = v;
            while let Some(nx) = m.mate_out(cur) {
                path.push(nx);
                used[nx] = true;
                cur = nx;
            }
            paths.push(path);
        }
    }
    let mut cycles = Vec::new();
    for v in 1..=n {
        if !used[v] {
            let mut cyc = vec![v];
            used[v] = true;
            let mut cur = m.mate_out(v).expect("vertex on a cycle is matched");
            while cur != v {
                cyc.push(cur);
                used[cur] = true;
                cur = m.mate_out(cur).expect("vertex on a cycle is matched");
            }
            cycles.push(cyc);
        }
    }
    let tips = paths.iter().map(|p| *p.last().expect("paths are nonempty")).collect();
    PncDecomposition { paths, cycles, tips }
}

/// Minimum path-and-cycle decomposition. Self-loops are kept as cycles
/// where possible and tips follow the same preference as
/// [`minimal_feasible`].
pub fn min_pnc(g: &StateDigraph) -> PncDecomposition {
    let mut m = Matcher::new(g);
    m.hopcroft_karp();
    prefer_high_tips(&mut m);
    m.keep_self_loops();
    decomposition_of(g, &m.to_matching())
}

/// True iff some spanning decomposition has exactly `forced` as its tips,
/// i.e. deleting the left copies of `forced` leaves a saturable side and
/// `|forced| = n - |M|`.
pub fn can_force_tips(g: &StateDigraph, forced: &VertexSet) -> bool {
    let mut m = Matcher::new(g);
    m.hopcroft_karp();
    if forced.len() != g.n() - m.size() {
        return false;
    }
    let mut b = Matcher::blocking(g, forced.iter().copied());
    b.hopcroft_karp();
    b.saturates()
}

/// Every sink-SCC contains a member of `f`.
pub fn covers_sinks(scc: &SccDecomposition, f: &VertexSet) -> bool {
    scc.sink_sets().iter().all(|c| c.iter().any(|v| f.contains(v)))
}

/// Feasibility test: sinks covered and a matching saturates every left copy
/// outside `f`.
pub fn is_feasible(g: &StateDigraph, f: &VertexSet) -> bool {
    if g.n() == 0 {
        return true;
    }
    if !covers_sinks(&g.scc_decompose(), f) {
        return false;
    }
    saturable_outside(g, f)
}

pub(crate) fn saturable_outside(g: &StateDigraph, f: &VertexSet) -> bool {
    let mut m = Matcher::blocking(g, f.iter().copied());
    m.hopcroft_karp();
    m.saturates()
}

/// A feasible sensor set split into path tips `T` and sink picks `S°`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FeasibleSolution {
    pub tips: VertexSet,
    pub sink_part: VertexSet,
}

impl FeasibleSolution {
    pub fn all(&self) -> VertexSet {
        self.tips.union(&self.sink_part).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.tips.len() + self.sink_part.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Members in seed order `x_{τ_1}..x_{τ_p}`: tips ascending, then sink
    /// picks ascending.
    pub fn ordered(&self) -> Vec<usize> {
        self.tips.iter().chain(self.sink_part.iter()).copied().collect()
    }

    /// Splits a feasible set into tips of a minimum decomposition and the
    /// remaining members, putting tips into as many sink-SCCs as possible.
    pub fn from_set(g: &StateDigraph, f: &VertexSet) -> Result<Self, PncError> {
        if !is_feasible(g, f) {
            return Err(PncError::Infeasible(f.iter().copied().collect()));
        }
        let mut m = Matcher::blocking(g, f.iter().copied());
        m.hopcroft_karp();
        for &v in f {
            m.unblock(v - 1);
        }
        for &v in f {
            m.augment_from(v - 1);
        }
        let scc = g.scc_decompose();
        m.add_sink_slots(&scc, Some(f));
        m.hopcroft_karp();
        Ok(split(g, &m, &scc, &|v| f.contains(&v), Some(f)))
    }
}

fn split(
    g: &StateDigraph,
    m: &Matcher<'_>,
    scc: &SccDecomposition,
    allowed: &dyn Fn(usize) -> bool,
    extra: Option<&VertexSet>,
) -> FeasibleSolution {
    let n = g.n();
    let tips: VertexSet = (0..n).filter(|&u| m.mate_l[u] >= n || m.mate_l[u] == NIL).map(|u| u + 1).collect();
    let mut sink_part = BTreeSet::new();
    for c in scc.sink_sets() {
        if !c.iter().any(|v| tips.contains(v)) {
            sink_part.extend(c.iter().copied().find(|&v| allowed(v)));
        }
    }
    if let Some(f) = extra {
        sink_part.extend(f.difference(&tips).copied());
    }
    FeasibleSolution { tips, sink_part }
}

/// Minimum feasible solution.
///
/// A maximum matching fixes a minimum tip count and is steered toward the
/// highest-indexed tips; augmenting further into one slot per sink-SCC
/// exchanges tips into as many distinct sink-SCCs as possible. The remaining
/// sink-SCCs receive their lowest vertex.
pub fn minimal_feasible(g: &StateDigraph) -> FeasibleSolution {
    let scc = g.scc_decompose();
    let mut m = Matcher::new(g);
    m.hopcroft_karp();
    prefer_high_tips(&mut m);
    m.add_sink_slots(&scc, None);
    m.hopcroft_karp();
    split(g, &m, &scc, &|_| true, None)
}

/// Moves the free left copies of a maximum matching onto the
/// lexicographically greatest realizable tip set. Minimum tip sets are the
/// bases of a matroid, so greedy insertion in descending order is exact.
fn prefer_high_tips(m: &mut Matcher<'_>) {
    let n = m.n();
    let nu = m.size();
    let mut locked = 0;
    for u in (0..n).rev() {
        if locked == n - nu {
            break;
        }
        if m.mate_l[u] == NIL {
            m.block(u);
            locked += 1;
            continue;
        }
        let mut trial = m.clone();
        trial.block(u);
        trial.hopcroft_karp();
        if trial.size() == nu {
            *m = trial;
            locked += 1;
        }
    }
    for u in 0..n {
        m.unblock(u);
    }
}

/// Smallest feasible solution containing no vertex of `forbidden`, or
/// `None` when none exists. Forbidden left copies are matched first; later
/// augmentations never unmatch them.
pub fn minimal_feasible_avoiding(g: &StateDigraph, forbidden: &VertexSet) -> Option<FeasibleSolution> {
    let n = g.n();
    let mut m = Matcher::blocking(g, (1..=n).filter(|v| !forbidden.contains(v)));
    m.hopcroft_karp();
    if !m.saturates() {
        return None;
    }
    for v in 1..=n {
        m.unblock(v - 1);
    }
    m.hopcroft_karp();
    let scc = g.scc_decompose();
    let allowed: VertexSet = (1..=n).filter(|v| !forbidden.contains(v)).collect();
    m.add_sink_slots(&scc, Some(&allowed));
    m.hopcroft_karp();
    let f = split(g, &m, &scc, &|v| allowed.contains(&v), None);
    (f.tips.is_disjoint(forbidden) && covers_sinks(&scc, &f.all())).then_some(f)
}
