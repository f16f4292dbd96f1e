//! Robustness against the loss of any single sensor.
//!
//! Each member `x_{τ_i}` of a seed solution `F = T ∪ S°` gets a family of
//! back-ups `Ω^i`: small vertex sets `ω` with `(F \ {x_{τ_i}}) ∪ ω` feasible.
//! Choosing one back-up per member yields an s-robust solution; the choice
//! is posed as a weighted set cover over the index set `{1..p}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counters::Counters;
use crate::digraph::{SccDecomposition, StateDigraph, VertexSet};
use crate::pnc::{self, covers_sinks, FeasibleSolution, Matcher};
use crate::setcover::{self, Cost, CoverError, CoverInstance};
use crate::Mode;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SensorError {
    #[error("vertex {0} is not in a sink component")]
    NotInSink(usize),
    #[error("vertex {0} is not a tip of the decomposition")]
    NotATip(usize),
    #[error("tip set {0:?} is not realizable by a minimum decomposition")]
    BadTips(Vec<usize>),
    #[error("sensor set {0:?} is not a feasible solution")]
    Infeasible(Vec<usize>),
    #[error("pair ({0}, {1}) must satisfy a < b")]
    PairOrder(usize, usize),
    #[error("index {index} out of range for n = {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("seed member {0} has no back-up")]
    Uncoverable(usize),
}

/// All other vertices of the sink component containing `x`.
pub fn sink_alternatives(scc: &SccDecomposition, x: usize) -> Result<VertexSet, SensorError> {
    let c = scc.component_of(x);
    if !scc.is_sink(c) {
        return Err(SensorError::NotInSink(x));
    }
    Ok(scc.components[c].iter().copied().filter(|&v| v != x).collect())
}

/// Vertices `x` such that `(tips \ {t}) ∪ {x}` is again the tip set of a
/// minimum decomposition.
///
/// One warm-started matching query is run per candidate.
pub fn tip_alternatives(g: &StateDigraph, tips: &VertexSet, t: usize, ctr: &Counters) -> Result<VertexSet, SensorError> {
    if !tips.contains(&t) {
        return Err(SensorError::NotATip(t));
    }
    let base = tip_matcher(g, tips, ctr)?;
    Ok(alternatives_from(&base, g, tips, t, ctr).into_iter().collect())
}

fn tip_matcher<'a>(g: &'a StateDigraph, tips: &VertexSet, ctr: &Counters) -> Result<Matcher<'a>, SensorError> {
    ctr.add_matchings(1);
    if !pnc::can_force_tips(g, tips) {
        return Err(SensorError::BadTips(tips.iter().copied().collect()));
    }
    let mut m = Matcher::blocking(g, tips.iter().copied());
    m.hopcroft_karp();
    Ok(m)
}

/// Back-ups for every member of a seed solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackupFamily {
    /// Seed members `x_{τ_1}..x_{τ_p}`: tips first, then sink picks.
    pub seed: Vec<usize>,
    /// Number of leading tip members (`m`).
    pub tips: usize,
    /// `per_index[i - 1] = Ω^i`. A member whose removal keeps the seed
    /// feasible has the single empty back-up.
    pub per_index: Vec<Vec<VertexSet>>,
}

impl BackupFamily {
    /// Whether member `i` (1-based) needs no back-up.
    pub fn is_redundant(&self, i: usize) -> bool {
        self.per_index[i - 1].iter().any(VertexSet::is_empty)
    }
}

/// Builds `Ω^1..Ω^p` for `f`. Every emitted set `ω` satisfies
/// feasibility of `(F \ {x_{τ_i}}) ∪ ω` and is disjoint from `F`.
pub fn backup_family(g: &StateDigraph, f: &FeasibleSolution, ctr: &Counters) -> Result<BackupFamily, SensorError> {
    let all = f.all();
    if !pnc::is_feasible(g, &all) {
        return Err(SensorError::Infeasible(all.into_iter().collect()));
    }
    let scc = g.scc_decompose();
    let seed = f.ordered();
    let mut per_index = Vec::with_capacity(seed.len());
    let base = if f.tips.is_empty() { None } else { Some(tip_matcher(g, &f.tips, ctr)?) };
    for &x in &seed {
        let mut rest = all.clone();
        rest.remove(&x);
        ctr.add_matchings(1);
        if pnc::is_feasible(g, &rest) {
            per_index.push(vec![VertexSet::new()]);
            continue;
        }
        let mut omega: Vec<VertexSet> = Vec::new();
        if f.tips.contains(&x) {
            let base = base.as_ref().expect("tips present");
            let home = scc.component_of(x);
            for d in alternatives_from(base, g, &f.tips, x, ctr) {
                let mut swapped = rest.clone();
                swapped.insert(d);
                if covers_sinks(&scc, &swapped) {
                    omega.push(VertexSet::from([d]));
                    continue;
                }
                for &z in &scc.components[home] {
                    if z == x {
                        continue;
                    }
                    let mut w = swapped.clone();
                    w.insert(z);
                    if covers_sinks(&scc, &w) {
                        omega.push([d, z].into_iter().filter(|v| !all.contains(v)).collect());
                    }
                }
            }
        } else if scc.is_sink(scc.component_of(x)) {
            for y in sink_alternatives(&scc, x)? {
                if !all.contains(&y) {
                    omega.push(VertexSet::from([y]));
                }
            }
        }
        omega.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        omega.dedup();
        let minimal: Vec<VertexSet> =
            omega.iter().filter(|w| !omega.iter().any(|o| o != *w && o.is_subset(w))).cloned().collect();
        per_index.push(minimal);
    }
    Ok(BackupFamily { seed, tips: f.tips.len(), per_index })
}

fn alternatives_from(base: &Matcher<'_>, g: &StateDigraph, tips: &VertexSet, t: usize, ctr: &Counters) -> Vec<usize> {
    let mut out = Vec::new();
    for x in 1..=g.n() {
        if tips.contains(&x) {
            continue;
        }
        ctr.add_candidates(1);
        ctr.add_decompositions(1);
        let mut m = base.clone();
        m.block(x - 1);
        m.unblock(t - 1);
        if m.augment_from(t - 1) {
            out.push(x);
        }
    }
    out
}

/// Index of `Z = {x_a}` or `Z = {x_a, x_b}` in the catalog: `a` for a
/// singleton, `½(a+b−2)(a+b−1) + b − 1 + n` for a pair with `a < b`.
pub fn z_index(n: usize, a: usize, b: Option<usize>) -> Result<usize, SensorError> {
    if a == 0 || a > n {
        return Err(SensorError::OutOfRange { index: a, n });
    }
    match b {
        None => Ok(a),
        Some(b) if b <= a => Err(SensorError::PairOrder(a, b)),
        Some(b) if b > n => Err(SensorError::OutOfRange { index: b, n }),
        Some(b) => Ok((a + b - 2) * (a + b - 1) / 2 + b - 1 + n),
    }
}

/// Inverse of [`z_index`].
pub fn z_decode(n: usize, j: usize) -> Result<(usize, Option<usize>), SensorError> {
    if j == 0 {
        return Err(SensorError::OutOfRange { index: j, n });
    }
    if j <= n {
        return Ok((j, None));
    }
    let k = j - n;
    let mut s = 0usize;
    while (s + 1) * (s + 2) / 2 <= k {
        s += 1;
    }
    let b = k - s * (s + 1) / 2 + 1;
    let a = (s + 2).checked_sub(b).filter(|&a| a >= 1 && a < b && b <= n);
    match a {
        Some(a) => Ok((a, Some(b))),
        None => Err(SensorError::OutOfRange { index: j, n }),
    }
}

/// Members of `Z_j`.
pub fn z_members(n: usize, j: usize) -> Result<VertexSet, SensorError> {
    let (a, b) = z_decode(n, j)?;
    Ok(std::iter::once(a).chain(b).collect())
}

fn z_of(n: usize, w: &VertexSet) -> usize {
    let v: Vec<usize> = w.iter().copied().collect();
    match v.as_slice() {
        [a] => z_index(n, *a, None),
        [a, b] => z_index(n, *a, Some(*b)),
        _ => unreachable!("back-ups have one or two members"),
    }
    .expect("back-up members are in range")
}

/// Weighted cover instance: universe is the set of members needing a
/// back-up; `V_j` collects the members whose `Ω` contains `Z_j`, and a pair
/// set also absorbs the sets of its two singletons. Cost of `V_j` is `|Z_j|`.
pub fn build_sensor_cover(n: usize, fam: &BackupFamily) -> CoverInstance {
    options_cover(n, &fam.per_index, needy(fam)).0
}

fn needy(fam: &BackupFamily) -> Vec<usize> {
    (1..=fam.per_index.len()).filter(|&i| !fam.is_redundant(i)).collect()
}

/// Catalog id of a back-up: its `Z` index for one or two members, else a
/// fresh id past the last pair index.
fn catalog_ids(n: usize, options: &[Vec<VertexSet>]) -> BTreeMap<VertexSet, usize> {
    let mut ids = BTreeMap::new();
    let mut next = if n >= 2 { z_index(n, n - 1, Some(n)).expect("in range") } else { n } + 1;
    let mut large: Vec<&VertexSet> = Vec::new();
    for w in options.iter().flatten().filter(|w| !w.is_empty()) {
        if w.len() <= 2 {
            ids.insert(w.clone(), z_of(n, w));
        } else {
            large.push(w);
        }
    }
    large.sort();
    for w in large {
        if !ids.contains_key(w) {
            ids.insert(w.clone(), next);
            next += 1;
        }
    }
    ids
}

/// Cover instance over `universe` with one set per distinct option `W`:
/// `V_W` holds every index having an option contained in `W`; cost `|W|`.
/// Also returns the catalog from set id to members.
pub(crate) fn options_cover(
    n: usize,
    options: &[Vec<VertexSet>],
    universe: Vec<usize>,
) -> (CoverInstance, BTreeMap<usize, VertexSet>) {
    let ids = catalog_ids(n, options);
    let mut direct: BTreeMap<&VertexSet, VertexSet> = BTreeMap::new();
    for (k, opts) in options.iter().enumerate() {
        for w in opts.iter().filter(|w| !w.is_empty()) {
            direct.entry(w).or_default().insert(k + 1);
        }
    }
    let mut inst = CoverInstance::new(universe);
    let mut catalog = BTreeMap::new();
    for (w, &j) in &ids {
        let elems: Vec<usize> = w.iter().copied().collect();
        let mut v = VertexSet::new();
        for mask in 1..(1u32 << elems.len()) {
            let sub: VertexSet = (0..elems.len()).filter(|b| mask >> b & 1 == 1).map(|b| elems[b]).collect();
            v.extend(direct.get(&sub).into_iter().flatten());
        }
        inst.add_set(j, v, Cost::from_integer(w.len() as i64));
        catalog.insert(j, w.clone());
    }
    (inst, catalog)
}

/// Picks one option per listed requirement and returns the catalog ids
/// used: smallest union in exact mode, weighted greedy otherwise.
pub(crate) fn choose(
    n: usize,
    options: &[Vec<VertexSet>],
    needy: &[usize],
    cover: &CoverInstance,
    mode: Mode,
) -> Result<Vec<usize>, CoverError> {
    match mode {
        Mode::Exact => {
            let ids = catalog_ids(n, options);
            let opts: Vec<Vec<VertexSet>> = needy.iter().map(|&i| options[i - 1].clone()).collect();
            let picks = setcover::min_union_cover(&opts).map_err(|e| match e {
                CoverError::Uncoverable(k) => CoverError::Uncoverable(needy[k - 1]),
                other => other,
            })?;
            let mut js: Vec<usize> = opts.iter().zip(picks).map(|(o, k)| ids[&o[k]]).collect();
            js.sort_unstable();
            js.dedup();
            Ok(js)
        }
        Mode::Greedy => Ok(setcover::greedy_cover(cover)?.chosen.into_iter().collect()),
    }
}

/// Seed plus the members of the chosen sets; returns the solution, the
/// added vertices and the summed cost.
pub(crate) fn assemble(
    seed: &VertexSet,
    chosen: &[usize],
    cover: &CoverInstance,
    catalog: &BTreeMap<usize, VertexSet>,
) -> (VertexSet, Vec<usize>, Cost) {
    let cost = chosen.iter().map(|j| cover.costs[j]).sum();
    let mut solution = seed.clone();
    let mut added = Vec::new();
    for j in chosen {
        for &v in &catalog[j] {
            if solution.insert(v) {
                added.push(v);
            }
        }
    }
    added.sort_unstable();
    (solution, added, cost)
}

/// Record of how an s-robust solution was assembled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensorCertificate {
    pub seed: FeasibleSolution,
    pub omega: BackupFamily,
    pub cover: CoverInstance,
    /// Catalog indices `j` of the chosen `Z_j`.
    pub chosen: Vec<usize>,
    /// Vertices added to the seed.
    pub added: Vec<usize>,
    #[serde(with = "setcover::cost_str")]
    pub cost: Cost,
    pub solution: Vec<usize>,
    pub mode: Mode,
}

/// s-robust solution extending the minimal feasible solution.
pub fn srobust_solution(g: &StateDigraph, mode: Mode, ctr: &Counters) -> Result<(VertexSet, SensorCertificate), SensorError> {
    ctr.add_matchings(1);
    srobust_from_seed(g, &pnc::minimal_feasible(g), mode, ctr)
}

/// s-robust solution extending a given feasible seed.
pub fn srobust_from_seed(
    g: &StateDigraph,
    seed: &FeasibleSolution,
    mode: Mode,
    ctr: &Counters,
) -> Result<(VertexSet, SensorCertificate), SensorError> {
    let n = g.n();
    let fam = backup_family(g, seed, ctr)?;
    if let Some(i) = fam.per_index.iter().position(Vec::is_empty) {
        return Err(SensorError::Uncoverable(i + 1));
    }
    let needy = needy(&fam);
    let (cover, catalog) = options_cover(n, &fam.per_index, needy.clone());
    let chosen = choose(n, &fam.per_index, &needy, &cover, mode).map_err(cover_err)?;
    let (solution, added, cost) = assemble(&seed.all(), &chosen, &cover, &catalog);
    let cert = SensorCertificate {
        seed: seed.clone(),
        omega: fam,
        cover,
        chosen,
        added,
        cost,
        solution: solution.iter().copied().collect(),
        mode,
    };
    Ok((solution, cert))
}

fn cover_err(e: CoverError) -> SensorError {
    match e {
        CoverError::Uncoverable(i) => SensorError::Uncoverable(i),
        other => unreachable!("cover built from a back-up family: {other}"),
    }
}

/// Reference strategy: the union of two disjoint minimal feasible
/// solutions, when a second one exists.
pub fn disjoint_pair_baseline(g: &StateDigraph) -> Option<VertexSet> {
    let first = pnc::minimal_feasible(g).all();
    let second = pnc::minimal_feasible_avoiding(g, &first)?;
    Some(first.union(&second.all()).copied().collect())
}

/// Whether `F \ {x}` is feasible for every `x ∈ F`.
pub fn is_srobust(g: &StateDigraph, f: &VertexSet) -> bool {
    f.iter().all(|x| {
        let mut rest = f.clone();
        rest.remove(x);
        pnc::is_feasible(g, &rest)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    fn g(n: usize, e: &[(usize, usize)]) -> StateDigraph {
        StateDigraph::from_edges(n, e.iter().copied()).unwrap()
    }

    #[test]
    fn z_examples() {
        assert_eq!(z_index(10, 3, None), Ok(3));
        assert_eq!(z_index(10, 1, Some(2)), Ok(12));
        assert_eq!(z_index(10, 2, Some(1)), Err(SensorError::PairOrder(2, 1)));
        assert!(z_index(10, 0, None).is_err());
        assert!(z_index(10, 1, Some(11)).is_err());
        assert_eq!(z_decode(10, 12), Ok((1, Some(2))));
        assert!(z_decode(10, 11).is_err());
    }

    #[test]
    fn cycle_family() {
        let c = g(3, &[(1, 2), (2, 3), (3, 1)]);
        let ctr = Counters::new();
        let f = pnc::minimal_feasible(&c);
        let fam = backup_family(&c, &f, &ctr).unwrap();
        assert_eq!(fam.per_index, vec![vec![set(&[2]), set(&[3])]]);
        let inst = build_sensor_cover(3, &fam);
        assert_eq!(inst.sets[&2], set(&[1]));
        assert_eq!(inst.sets[&3], set(&[1]));
        assert_eq!(inst.sets.len(), 2);
    }

    #[test]
    fn chain_has_no_alternatives() {
        let c = g(3, &[(1, 2), (2, 3)]);
        let ctr = Counters::new();
        assert!(tip_alternatives(&c, &set(&[3]), 3, &ctr).unwrap().is_empty());
        assert_eq!(ctr.snapshot().decompositions_run, 2);
        assert!(tip_alternatives(&c, &set(&[3]), 2, &ctr).is_err());
    }

    #[test]
    fn lone_vertex_is_uncoverable() {
        let r = srobust_solution(&StateDigraph::new(1), Mode::Exact, &Counters::new());
        assert_eq!(r.unwrap_err(), SensorError::Uncoverable(1));
    }

    #[test]
    fn two_cycle_needs_both() {
        let c = g(2, &[(1, 2), (2, 1)]);
        for mode in [Mode::Exact, Mode::Greedy] {
            let (s, _) = srobust_solution(&c, mode, &Counters::new()).unwrap();
            assert_eq!(s, set(&[1, 2]));
        }
    }

    #[test]
    fn redundant_member_needs_nothing() {
        let c = g(3, &[(1, 2), (2, 3), (3, 1)]);
        let seed = FeasibleSolution::from_set(&c, &set(&[1, 2])).unwrap();
        let (s, cert) = srobust_from_seed(&c, &seed, Mode::Exact, &Counters::new()).unwrap();
        assert_eq!(s, set(&[1, 2]));
        assert!(cert.cover.universe.is_empty());
    }

    #[test]
    fn baseline_is_robust() {
        let c = g(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        let b = disjoint_pair_baseline(&c).unwrap();
        assert_eq!(b.len(), 2);
        assert!(is_srobust(&c, &b));
        assert!(disjoint_pair_baseline(&g(2, &[(1, 2)])).is_none());
    }
}
