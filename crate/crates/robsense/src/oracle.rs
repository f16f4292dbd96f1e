//! Independent ground truth: a numeric observability test over a prime
//! field, exhaustive robust-placement search and the reduction gadgets.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::digraph::{StateDigraph, VertexSet};
use crate::lrobust::links_of;
use crate::pnc::is_feasible;

/// Field modulus, the Mersenne prime `2^61 - 1`.
pub const Q: u64 = (1 << 61) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {n} vertices, above the search limit {limit}")]
    LimitExceeded { n: usize, limit: usize },
    #[error("cover instance needs at least one element")]
    EmptyUniverse,
    #[error("element {0} is not covered by any set")]
    Uncovered(usize),
    #[error("set {set} contains element {elem} outside 1..={p}")]
    BadElement { set: usize, elem: usize, p: usize },
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % Q as u128) as u64
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow(a, Q - 2)
}

/// Row space with rows kept reduced against leading pivots.
struct Echelon {
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    fn insert(&mut self, mut r: Vec<u64>) -> bool {
        for (p, b) in &self.rows {
            let c = r[*p];
            if c != 0 {
                for (x, y) in r.iter_mut().zip(b) {
                    *x = (*x + Q - mul(c, *y)) % Q;
                }
            }
        }
        let Some(p) = r.iter().position(|&x| x != 0) else { return false };
        let s = inv(r[p]);
        for x in r.iter_mut() {
            *x = mul(*x, s);
        }
        self.rows.push((p, r));
        true
    }
}

/// Rank of `[C; CA'; ...; CA'^{n-1}]` for one random realization `A'` with
/// `A'[j][i]` nonzero exactly on edges `(i, j)`, and `C` the rows `e_x`,
/// `x ∈ f`.
pub fn observability_rank(g: &StateDigraph, f: &VertexSet, seed: u64) -> usize {
    let n = g.n();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let weights: Vec<Vec<(usize, u64)>> =
        (1..=n).map(|i| g.successors(i).map(|j| (j - 1, rng.gen_range(1..Q))).collect()).collect();
    let mut basis = Echelon { rows: Vec::new() };
    let mut rows: Vec<Vec<u64>> = f
        .iter()
        .map(|&x| {
            let mut r = vec![0; n];
            r[x - 1] = 1;
            r
        })
        .collect();
    for _ in 0..n {
        let mut grew = false;
        for r in &rows {
            grew |= basis.insert(r.clone());
        }
        if basis.rows.len() == n || !grew {
            break;
        }
        rows = rows
            .iter()
            .map(|r| {
                (0..n)
                    .map(|i| weights[i].iter().fold(0, |acc, &(j, w)| (acc + mul(r[j], w)) % Q))
                    .collect()
            })
            .collect();
    }
    basis.rows.len()
}

/// Full-rank test on three realizations drawn from `seed`, by majority.
pub fn numeric_observable(g: &StateDigraph, f: &VertexSet, seed: u64) -> bool {
    let n = g.n();
    let votes = (0..3u64).filter(|k| observability_rank(g, f, seed.wrapping_mul(3).wrapping_add(*k)) == n).count();
    votes >= 2
}

fn check_limit(g: &StateDigraph, limit: usize) -> Result<(), OracleError> {
    if g.n() > limit {
        return Err(OracleError::LimitExceeded { n: g.n(), limit });
    }
    Ok(())
}

/// Feasible and still feasible after dropping any one member.
pub fn survives_sensor_loss(g: &StateDigraph, f: &VertexSet) -> bool {
    is_feasible(g, f)
        && f.iter().all(|x| {
            let mut rest = f.clone();
            rest.remove(x);
            is_feasible(g, &rest)
        })
}

/// Feasible and still feasible after removing any one link.
pub fn survives_link_loss(g: &StateDigraph, f: &VertexSet, undirected: bool) -> bool {
    is_feasible(g, f)
        && links_of(g, undirected)
            .into_iter()
            .all(|(l, u)| is_feasible(&g.remove_link(l, u).expect("link from graph"), f))
}

/// First superset of `base`, by size then lexicographically, passing `pred`.
fn smallest_superset(
    g: &StateDigraph,
    base: &VertexSet,
    limit: usize,
    pred: impl Fn(&VertexSet) -> bool,
) -> Result<Option<VertexSet>, OracleError> {
    check_limit(g, limit)?;
    let free: Vec<usize> = (1..=g.n()).filter(|v| !base.contains(v)).collect();
    for k in 0..=free.len() {
        for extra in free.iter().copied().combinations(k) {
            let mut s = base.clone();
            s.extend(extra);
            if pred(&s) {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

/// Smallest s-robust set, or `None` when no set qualifies.
pub fn exhaustive_srobust(g: &StateDigraph, limit: usize) -> Result<Option<VertexSet>, OracleError> {
    exhaustive_srobust_superset(g, &VertexSet::new(), limit)
}

/// Smallest s-robust superset of `base`.
pub fn exhaustive_srobust_superset(
    g: &StateDigraph,
    base: &VertexSet,
    limit: usize,
) -> Result<Option<VertexSet>, OracleError> {
    smallest_superset(g, base, limit, |s| survives_sensor_loss(g, s))
}

/// Smallest l-robust set, or `None` when no set qualifies.
pub fn exhaustive_lrobust(g: &StateDigraph, undirected: bool, limit: usize) -> Result<Option<VertexSet>, OracleError> {
    exhaustive_lrobust_superset(g, &VertexSet::new(), undirected, limit)
}

/// Smallest l-robust superset of `base`.
pub fn exhaustive_lrobust_superset(
    g: &StateDigraph,
    base: &VertexSet,
    undirected: bool,
    limit: usize,
) -> Result<Option<VertexSet>, OracleError> {
    smallest_superset(g, base, limit, |s| survives_link_loss(g, s, undirected))
}

fn check_cover(p: usize, sets: &[VertexSet]) -> Result<(), OracleError> {
    if p == 0 {
        return Err(OracleError::EmptyUniverse);
    }
    for (j, c) in sets.iter().enumerate() {
        if let Some(&e) = c.iter().find(|&&e| e == 0 || e > p) {
            return Err(OracleError::BadElement { set: j + 1, elem: e, p });
        }
    }
    match (1..=p).find(|e| !sets.iter().any(|c| c.contains(e))) {
        Some(e) => Err(OracleError::Uncovered(e)),
        None => Ok(()),
    }
}

/// Minimum number of sets covering `{1..p}`, by enumeration.
pub fn min_cover_size(p: usize, sets: &[VertexSet]) -> Result<usize, OracleError> {
    check_cover(p, sets)?;
    let full: VertexSet = (1..=p).collect();
    for k in 1..=sets.len() {
        for pick in sets.iter().combinations(k) {
            let u: VertexSet = pick.into_iter().flatten().copied().collect();
            if u == full {
                return Ok(k);
            }
        }
    }
    unreachable!("checked instance is coverable")
}

/// Sensor-failure gadget on `p + k + 4` vertices: element `i` feeds set
/// vertex `p+j` when `i ∈ C_j`; set vertices carry self-loops and feed
/// `b = p+k+2`; the tail is `a ⇄ b`, `b → c`, `d → b` and `c → b` with
/// `a, c, d = p+k+1, p+k+3, p+k+4`.
pub fn sensor_gadget(p: usize, sets: &[VertexSet]) -> Result<StateDigraph, OracleError> {
    check_cover(p, sets)?;
    let k = sets.len();
    let (a, b, c, d) = (p + k + 1, p + k + 2, p + k + 3, p + k + 4);
    let mut e = Vec::new();
    for (j, cj) in sets.iter().enumerate() {
        let s = p + j + 1;
        e.extend(cj.iter().map(|&i| (i, s)));
        e.push((s, s));
        e.push((s, b));
    }
    e.extend([(a, b), (b, a), (b, c), (d, b), (c, b)]);
    Ok(StateDigraph::from_edges(d, e).expect("gadget edges are in range"))
}

/// Link-failure gadget on `p + 2k + 4` vertices: self-loops on the
/// elements; each set has two looped copies `p+j`, `p+k+j` fed by its
/// elements and feeding `p+2k+2`; the tail edges are
/// `p+2k+3 → p+2k+1`, `p+2k+4 → p+2k+1`, `p+2k+3 → p+2k+2`,
/// `p+2k+4 → p+2k+2`.
pub fn link_gadget(p: usize, sets: &[VertexSet]) -> Result<StateDigraph, OracleError> {
    check_cover(p, sets)?;
    let k = sets.len();
    let (s1, s2, t1, t2) = (p + 2 * k + 1, p + 2 * k + 2, p + 2 * k + 3, p + 2 * k + 4);
    let mut e: Vec<(usize, usize)> = (1..=p).map(|i| (i, i)).collect();
    for (j, cj) in sets.iter().enumerate() {
        for copy in [p + j + 1, p + k + j + 1] {
            e.extend(cj.iter().map(|&i| (i, copy)));
            e.push((copy, copy));
            e.push((copy, s2));
        }
    }
    e.extend([(t1, s1), (t2, s1), (t1, s2), (t2, s2)]);
    Ok(StateDigraph::from_edges(t2, e).expect("gadget edges are in range"))
}
