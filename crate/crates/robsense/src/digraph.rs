//! State digraph, `.sdg` text format, and strongly connected components.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

/// Ordered set of 1-indexed vertices.
pub type VertexSet = BTreeSet<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {vertex} out of range 1..={n}")]
    OutOfRange { vertex: usize, n: usize },
    #[error("duplicate edge ({0}, {1})")]
    Duplicate(usize, usize),
    #[error("structural matrix is not square")]
    NonSquare,
    #[error("link ({0}, {1}) is absent")]
    LinkAbsent(usize, usize),
}

/// Sparse directed graph over states `x_1..x_n`.
///
/// Adjacency is kept 0-indexed and sorted internally; every public method
/// speaks 1-indexed vertices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StateDigraph {
    n: usize,
    succ: Vec<Vec<usize>>,
    pairs: BTreeSet<(usize, usize)>,
    m: usize,
}

impl StateDigraph {
    pub fn new(n: usize) -> Self {
        Self { n, succ: vec![Vec::new(); n], pairs: BTreeSet::new(), m: 0 }
    }

    /// Builds a digraph from directed 1-indexed edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v == 0 || v > self.n {
            Err(GraphError::OutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        let row = &mut self.succ[u - 1];
        match row.binary_search(&(v - 1)) {
            Ok(_) => Err(GraphError::Duplicate(u, v)),
            Err(pos) => {
                row.insert(pos, v - 1);
                self.m += 1;
                Ok(())
            }
        }
    }

    /// Adds both directions of an undirected link plus its pair record.
    pub fn add_undirected(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        if a == b {
            self.check(a)?;
            return Err(GraphError::Duplicate(a, b));
        }
        self.add_edge(a, b)?;
        self.add_edge(b, a)?;
        self.pairs.insert((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u >= 1 && u <= self.n && v >= 1 && v <= self.n && self.succ[u - 1].binary_search(&(v - 1)).is_ok()
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&v| (u + 1, v + 1)))
    }

    /// Unordered bidirectional links as `(a, b)` with `a < b`.
    pub fn undirected_pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    /// Successors of `u`, 1-indexed.
    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[u - 1].iter().map(|&v| v + 1)
    }

    pub(crate) fn succ0(&self, u: usize) -> &[usize] {
        &self.succ[u]
    }

    /// Edge `(i, j)` present iff `pattern[j][i]` is set.
    pub fn from_structural_matrix(pattern: &[Vec<bool>]) -> Result<Self, GraphError> {
        let n = pattern.len();
        if pattern.iter().any(|row| row.len() != n) {
            return Err(GraphError::NonSquare);
        }
        let mut g = Self::new(n);
        for (j, row) in pattern.iter().enumerate() {
            for (i, &nz) in row.iter().enumerate() {
                if nz {
                    g.add_edge(i + 1, j + 1)?;
                }
            }
        }
        Ok(g)
    }

    /// Parses the `.sdg` text format.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut g: Option<Self> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>().map_err(|_| GraphError::Parse { line, msg: format!("bad integer '{s}'") })
            };
            let wrap = |e: GraphError| match e {
                GraphError::Parse { .. } => e,
                other => GraphError::Parse { line, msg: other.to_string() },
            };
            match (parts[0], parts.len(), g.as_mut()) {
                ("n", 2, None) => g = Some(Self::new(num(parts[1])?)),
                ("n", _, Some(_)) => return Err(GraphError::Parse { line, msg: "repeated header".into() }),
                ("e", 3, Some(gr)) => gr.add_edge(num(parts[1])?, num(parts[2])?).map_err(wrap)?,
                ("u", 3, Some(gr)) => gr.add_undirected(num(parts[1])?, num(parts[2])?).map_err(wrap)?,
                ("e" | "u", 3, None) => {
                    return Err(GraphError::Parse { line, msg: "edge before 'n' header".into() })
                }
                _ => return Err(GraphError::Parse { line, msg: format!("malformed line '{t}'") }),
            }
        }
        g.ok_or(GraphError::Parse { line: 0, msg: "missing 'n' header".into() })
    }

    /// Serializes to `.sdg`: header, sorted `e` lines, then sorted `u` lines.
    pub fn to_sdg(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (u, v) in self.edges() {
            if !self.pairs.contains(&(u.min(v), u.max(v))) {
                let _ = writeln!(out, "e {u} {v}");
            }
        }
        for &(a, b) in &self.pairs {
            let _ = writeln!(out, "u {a} {b}");
        }
        out
    }

    /// Copy with one link removed. An undirected removal drops both
    /// directions and the pair record; a directed removal of one half of a
    /// pair drops the pair record only.
    pub fn remove_link(&self, link: (usize, usize), undirected: bool) -> Result<Self, GraphError> {
        let (u, v) = link;
        let mut g = self.clone();
        let key = (u.min(v), u.max(v));
        if undirected {
            if !g.pairs.remove(&key) {
                return Err(GraphError::LinkAbsent(u, v));
            }
            g.drop_edge(u, v);
            g.drop_edge(v, u);
        } else {
            if !self.has_edge(u, v) {
                return Err(GraphError::LinkAbsent(u, v));
            }
            g.pairs.remove(&key);
            g.drop_edge(u, v);
        }
        Ok(g)
    }

    fn drop_edge(&mut self, u: usize, v: usize) {
        let row = &mut self.succ[u - 1];
        if let Ok(pos) = row.binary_search(&(v - 1)) {
            row.remove(pos);
            self.m -= 1;
        }
    }

    pub fn scc_decompose(&self) -> SccDecomposition {
        let raw = tarjan(self.n, &self.succ);
        let mut comps: Vec<Vec<usize>> = raw;
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort_by_key(|c| c[0]);
        let mut component_of = vec![0; self.n];
        for (id, c) in comps.iter().enumerate() {
            for &v in c {
                component_of[v] = id;
            }
        }
        let mut dag_edges = BTreeSet::new();
        for u in 0..self.n {
            for &v in &self.succ[u] {
                let (a, b) = (component_of[u], component_of[v]);
                if a != b {
                    dag_edges.insert((a, b));
                }
            }
        }
        let mut has_out = vec![false; comps.len()];
        for &(a, _) in &dag_edges {
            has_out[a] = true;
        }
        let sinks = (0..comps.len()).filter(|&c| !has_out[c]).collect();
        SccDecomposition {
            component_of,
            components: comps.into_iter().map(|c| c.into_iter().map(|v| v + 1).collect()).collect(),
            dag_edges,
            sinks,
        }
    }
}

/// SCCs, their condensation, and the sink components.
///
/// Component ids are ordered by each component's smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    component_of: Vec<usize>,
    /// Vertex sets (1-indexed, ascending).
    pub components: Vec<Vec<usize>>,
    /// Condensation edges between component ids.
    pub dag_edges: BTreeSet<(usize, usize)>,
    /// Ids of components without outgoing condensation edges.
    pub sinks: Vec<usize>,
}

impl SccDecomposition {
    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v - 1]
    }

    pub fn is_sink(&self, comp: usize) -> bool {
        self.sinks.binary_search(&comp).is_ok()
    }

    /// Vertex sets of the sink components.
    pub fn sink_sets(&self) -> Vec<&[usize]> {
        self.sinks.iter().map(|&c| self.components[c].as_slice()).collect()
    }
}

/// Iterative Tarjan over 0-indexed adjacency.
fn tarjan(n: usize, succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, pos)) = call.last() {
            if pos < succ[v].len() {
                let w = succ[v][pos];
                if let Some(top) = call.last_mut() {
                    top.1 += 1;
                }
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}
