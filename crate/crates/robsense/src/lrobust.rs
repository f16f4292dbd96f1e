//! Robustness against the loss of any single link.
//!
//! A link is sensitive for `F` when its removal makes `F` infeasible. On the
//! corrupted digraph either the saturating matching breaks (tip deficit) or
//! a sink component loses its sensor (sink deficit). Completions are the
//! smallest vertex sets restoring feasibility; one completion per sensitive
//! link is chosen through a set cover.

use itertools::Itertools;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::counters::Counters;
use crate::digraph::{GraphError, StateDigraph, VertexSet};
use crate::pnc::{self, FeasibleSolution, Matcher};
use crate::setcover::{self, Cost, CoverError, CoverInstance};
use crate::srobust;
use crate::Mode;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkError {
    #[error("sensor set {0:?} is not a feasible solution")]
    Infeasible(Vec<usize>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("link ({0}, {1}) is not sensitive")]
    NotSensitive(usize, usize),
    #[error("link ({}, {}) is not a {expected:?} failure", link.0, link.1)]
    WrongCase { link: (usize, usize), expected: Deficit },
    #[error("sensitive link {0} has no completion")]
    Uncoverable(usize),
}

/// Which feasibility condition a link failure breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Deficit {
    /// The remaining vertices can no longer be saturated.
    Tip,
    /// A sink component of the corrupted digraph holds no sensor.
    Sink,
}

/// A sensitive link. Its index is its 1-based position in the list
/// returned by [`sensitive_links`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SensitiveLink {
    pub link: (usize, usize),
    pub undirected: bool,
    pub case: Deficit,
}

impl Serialize for SensitiveLink {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.link.0, self.link.1, self.case).serialize(s)
    }
}

/// Links in lexicographic order. With `undirected`, each undirected pair
/// is one link `(a, b)` with `a < b`; edges outside pairs stay directed.
pub fn links_of(g: &StateDigraph, undirected: bool) -> Vec<((usize, usize), bool)> {
    let pairs = g.undirected_pairs();
    g.edges()
        .filter_map(|(u, v)| {
            if undirected && pairs.contains(&(u.min(v), u.max(v))) {
                (u < v).then_some(((u, v), true))
            } else {
                Some(((u, v), false))
            }
        })
        .collect()
}

/// State of `F` on one corrupted digraph.
struct Damage<'a> {
    matcher: Matcher<'a>,
    deficiency: usize,
    uncovered: Vec<VertexSet>,
}

impl Damage<'_> {
    fn case(&self) -> Option<Deficit> {
        if self.deficiency > 0 {
            Some(Deficit::Tip)
        } else if !self.uncovered.is_empty() {
            Some(Deficit::Sink)
        } else {
            None
        }
    }
}

struct Seed {
    f: VertexSet,
}

impl Seed {
    fn new(g: &StateDigraph, f: &VertexSet) -> Result<Self, LinkError> {
        if !pnc::is_feasible(g, f) {
            return Err(LinkError::Infeasible(f.iter().copied().collect()));
        }
        Ok(Self { f: f.clone() })
    }

    /// Solves the corrupted digraph `h` from scratch: a maximum matching
    /// with the left copies of `F` blocked, plus its sink components.
    fn damage<'b>(&self, h: &'b StateDigraph, ctr: &Counters) -> Damage<'b> {
        ctr.add_links(1);
        ctr.add_matchings(1);
        ctr.add_decompositions(1);
        let mut m = Matcher::blocking(h, self.f.iter().copied());
        m.hopcroft_karp();
        let deficiency = h.n() - self.f.len() - m.size();
        let scc = h.scc_decompose();
        let uncovered = scc
            .sink_sets()
            .into_iter()
            .filter(|c| !c.iter().any(|x| self.f.contains(x)))
            .map(|c| c.iter().copied().collect())
            .collect();
        Damage { matcher: m, deficiency, uncovered }
    }

    /// Vertices outside `F` whose left copy lies on an alternating path
    /// from a free left copy, i.e. whose deletion keeps the matching size.
    fn rank_helpers(&self, d: &Damage<'_>, ctr: &Counters) -> VertexSet {
        let n = d.matcher.n();
        let size = d.matcher.size();
        let mut out = VertexSet::new();
        for x in (1..=n).filter(|x| !self.f.contains(x)) {
            ctr.add_candidates(1);
            ctr.add_decompositions(1);
            let mut trial = d.matcher.clone();
            trial.block(x - 1);
            trial.hopcroft_karp();
            if trial.size() == size {
                out.insert(x);
            }
        }
        out
    }

    /// Inclusion-minimal completions `W` (disjoint from `F`) with
    /// `F ∪ W` feasible on the corrupted digraph.
    fn completions(&self, d: &Damage<'_>, ctr: &Counters) -> Vec<VertexSet> {
        let helpers = if d.deficiency > 0 { self.rank_helpers(d, ctr) } else { VertexSet::new() };
        let mut out: Vec<VertexSet> = Vec::new();
        match (d.deficiency, d.uncovered.as_slice()) {
            (0, []) => {}
            (0, [u]) => out.extend(u.iter().map(|&x| VertexSet::from([x]))),
            (1, []) => out.extend(helpers.iter().map(|&x| VertexSet::from([x]))),
            (1, [u]) => {
                out.extend(helpers.intersection(u).map(|&x| VertexSet::from([x])));
                for a in helpers.difference(u) {
                    for b in u.difference(&helpers) {
                        out.push(VertexSet::from([*a, *b]));
                    }
                }
            }
            _ => out = self.enumerate(d, &helpers, ctr),
        }
        out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        out
    }

    fn enumerate(&self, d: &Damage<'_>, helpers: &VertexSet, ctr: &Counters) -> Vec<VertexSet> {
        let mut pool = helpers.clone();
        for u in &d.uncovered {
            pool.extend(u);
        }
        let mut found: Vec<VertexSet> = Vec::new();
        for k in 1..=d.deficiency + d.uncovered.len() {
            if k > 2 && !found.is_empty() {
                break;
            }
            for combo in pool.iter().copied().combinations(k) {
                let w: VertexSet = combo.into_iter().collect();
                if found.iter().any(|s| s.is_subset(&w)) || !d.uncovered.iter().all(|u| !u.is_disjoint(&w)) {
                    continue;
                }
                ctr.add_candidates(1);
                let mut trial = d.matcher.clone();
                for &x in &w {
                    trial.block(x - 1);
                }
                trial.hopcroft_karp();
                if trial.saturates() {
                    found.push(w);
                }
            }
        }
        found
    }
}

/// Sensitive links of `f`, classified, in lexicographic order.
pub fn sensitive_links(
    g: &StateDigraph,
    f: &VertexSet,
    undirected: bool,
    ctr: &Counters,
) -> Result<Vec<SensitiveLink>, LinkError> {
    let seed = Seed::new(g, f)?;
    let mut out = Vec::new();
    for (link, und) in links_of(g, undirected) {
        let h = g.remove_link(link, und)?;
        if let Some(case) = seed.damage(&h, ctr).case() {
            out.push(SensitiveLink { link, undirected: und, case });
        }
    }
    Ok(out)
}

fn classify<'b>(
    seed: &Seed,
    h: &'b StateDigraph,
    link: &SensitiveLink,
    expected: Deficit,
    ctr: &Counters,
) -> Result<Damage<'b>, LinkError> {
    let d = seed.damage(h, ctr);
    match d.case() {
        None => Err(LinkError::NotSensitive(link.link.0, link.link.1)),
        Some(c) if c != expected => Err(LinkError::WrongCase { link: link.link, expected }),
        Some(_) => Ok(d),
    }
}

/// Vertices `x` outside `F` such that `F ∪ {x}` restores the saturating
/// matching on the corrupted digraph.
pub fn tip_completions(g: &StateDigraph, f: &VertexSet, link: &SensitiveLink, ctr: &Counters) -> Result<VertexSet, LinkError> {
    let seed = Seed::new(g, f)?;
    let h = g.remove_link(link.link, link.undirected)?;
    let d = classify(&seed, &h, link, Deficit::Tip, ctr)?;
    Ok(if d.deficiency == 1 { seed.rank_helpers(&d, ctr) } else { VertexSet::new() })
}

/// Vertices of the sink component of the corrupted digraph that holds no
/// sensor.
pub fn sink_completions(g: &StateDigraph, f: &VertexSet, link: &SensitiveLink) -> Result<VertexSet, LinkError> {
    let ctr = Counters::new();
    let seed = Seed::new(g, f)?;
    let h = g.remove_link(link.link, link.undirected)?;
    let d = classify(&seed, &h, link, Deficit::Sink, &ctr)?;
    Ok(d.uncovered.into_iter().flatten().collect())
}

/// `Θ^1..Θ^ρ`: minimal completions per sensitive link.
pub fn completion_family(
    g: &StateDigraph,
    f: &VertexSet,
    links: &[SensitiveLink],
    ctr: &Counters,
) -> Result<Vec<Vec<VertexSet>>, LinkError> {
    let seed = Seed::new(g, f)?;
    links
        .iter()
        .map(|l| {
            let h = g.remove_link(l.link, l.undirected)?;
            let d = seed.damage(&h, ctr);
            Ok(seed.completions(&d, ctr))
        })
        .collect()
}

/// Cover instance over `{1..ρ}`: `V_j` lists the links completed by `Z_j`;
/// pair sets also absorb their singletons. Unit cost per vertex.
pub fn build_link_cover(n: usize, theta: &[Vec<VertexSet>]) -> CoverInstance {
    srobust::options_cover(n, theta, (1..=theta.len()).collect()).0
}

/// Record of how an l-robust solution was assembled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkCertificate {
    pub seed: FeasibleSolution,
    pub undirected: bool,
    pub sensitive: Vec<SensitiveLink>,
    pub theta: Vec<Vec<VertexSet>>,
    pub cover: CoverInstance,
    pub chosen: Vec<usize>,
    pub added: Vec<usize>,
    #[serde(with = "setcover::cost_str")]
    pub cost: Cost,
    pub solution: Vec<usize>,
    pub mode: Mode,
}

/// l-robust solution extending the minimal feasible solution.
pub fn lrobust_solution(
    g: &StateDigraph,
    mode: Mode,
    undirected: bool,
    ctr: &Counters,
) -> Result<(VertexSet, LinkCertificate), LinkError> {
    ctr.add_matchings(1);
    lrobust_from_seed(g, &pnc::minimal_feasible(g), mode, undirected, ctr)
}

/// l-robust solution extending a given feasible seed.
pub fn lrobust_from_seed(
    g: &StateDigraph,
    seed: &FeasibleSolution,
    mode: Mode,
    undirected: bool,
    ctr: &Counters,
) -> Result<(VertexSet, LinkCertificate), LinkError> {
    let n = g.n();
    let f = seed.all();
    let sensitive = sensitive_links(g, &f, undirected, ctr)?;
    let theta = completion_family(g, &f, &sensitive, ctr)?;
    if let Some(j) = theta.iter().position(Vec::is_empty) {
        return Err(LinkError::Uncoverable(j + 1));
    }
    let needy: Vec<usize> = (1..=theta.len()).collect();
    let (cover, catalog) = srobust::options_cover(n, &theta, needy.clone());
    let chosen = srobust::choose(n, &theta, &needy, &cover, mode).map_err(|e| match e {
        CoverError::Uncoverable(j) => LinkError::Uncoverable(j),
        other => unreachable!("cover built from completions: {other}"),
    })?;
    let (solution, added, cost) = srobust::assemble(&f, &chosen, &cover, &catalog);
    let cert = LinkCertificate {
        seed: seed.clone(),
        undirected,
        sensitive,
        theta,
        cover,
        chosen,
        added,
        cost,
        solution: solution.iter().copied().collect(),
        mode,
    };
    Ok((solution, cert))
}

/// Whether `f` is feasible on `g` and after removing any single link.
pub fn is_lrobust(g: &StateDigraph, f: &VertexSet, undirected: bool) -> bool {
    pnc::is_feasible(g, f)
        && links_of(g, undirected).into_iter().all(|(link, und)| {
            let h = g.remove_link(link, und).expect("link taken from the graph");
            pnc::is_feasible(&h, f)
        })
}
