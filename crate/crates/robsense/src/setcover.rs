//! Weighted set covering with exact rational costs.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::VertexSet;

pub type Cost = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("element {0} is not covered by any set")]
    Uncoverable(usize),
    #[error("universe has {size} elements, above the limit {limit}")]
    LimitExceeded { size: usize, limit: usize },
    #[error("set {0} is not a subset of the universe")]
    NotSubset(usize),
}

/// Universe, indexed cover sets and their costs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverInstance {
    pub universe: BTreeSet<usize>,
    pub sets: BTreeMap<usize, BTreeSet<usize>>,
    #[serde(with = "cost_map")]
    pub costs: BTreeMap<usize, Cost>,
}

/// Chosen set ids with their total cost.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSolution {
    pub chosen: BTreeSet<usize>,
    #[serde(with = "cost_str")]
    pub total_cost: Cost,
    pub covered: bool,
}

impl CoverInstance {
    pub fn new<I: IntoIterator<Item = usize>>(universe: I) -> Self {
        Self { universe: universe.into_iter().collect(), ..Self::default() }
    }

    /// Inserts or replaces set `id`.
    pub fn add_set<I: IntoIterator<Item = usize>>(&mut self, id: usize, elems: I, cost: Cost) {
        self.sets.insert(id, elems.into_iter().collect());
        self.costs.insert(id, cost);
    }

    fn validate(&self) -> Result<(), CoverError> {
        for (&id, s) in &self.sets {
            if !s.is_subset(&self.universe) {
                return Err(CoverError::NotSubset(id));
            }
        }
        let mut hit: BTreeSet<usize> = BTreeSet::new();
        for s in self.sets.values() {
            hit.extend(s);
        }
        match self.universe.iter().find(|e| !hit.contains(e)) {
            Some(&e) => Err(CoverError::Uncoverable(e)),
            None => Ok(()),
        }
    }

    fn cost(&self, id: usize) -> Cost {
        self.costs.get(&id).copied().unwrap_or_else(Cost::zero)
    }

    fn solution(&self, chosen: BTreeSet<usize>) -> CoverSolution {
        let total_cost = chosen.iter().map(|&j| self.cost(j)).sum();
        let mut union = BTreeSet::new();
        for j in &chosen {
            union.extend(&self.sets[j]);
        }
        let covered = self.universe.is_subset(&union);
        CoverSolution { chosen, total_cost, covered }
    }

    /// Largest set cardinality.
    pub fn max_set_size(&self) -> usize {
        self.sets.values().map(BTreeSet::len).max().unwrap_or(0)
    }
}

/// Greedy cover: repeatedly take the set of least cost per newly covered
/// element, lowest id on ties. Runs in O(|U| * |sets|).
pub fn greedy_cover(inst: &CoverInstance) -> Result<CoverSolution, CoverError> {
    inst.validate()?;
    let ids: Vec<usize> = inst.sets.keys().copied().collect();
    let mut fresh: Vec<i64> = ids.iter().map(|j| inst.sets[j].len() as i64).collect();
    let mut holders: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, j) in ids.iter().enumerate() {
        for &e in &inst.sets[j] {
            holders.entry(e).or_default().push(k);
        }
    }
    let mut left = inst.universe.len();
    let mut done: BTreeSet<usize> = BTreeSet::new();
    let mut chosen = BTreeSet::new();
    while left > 0 {
        let mut best: Option<(usize, Cost)> = None;
        for (k, &cnt) in fresh.iter().enumerate() {
            if cnt == 0 {
                continue;
            }
            let ratio = inst.cost(ids[k]) / cnt;
            if best.is_none_or(|(_, b)| ratio < b) {
                best = Some((k, ratio));
            }
        }
        let (k, _) = best.expect("validated instance always has a useful set");
        chosen.insert(ids[k]);
        for &e in &inst.sets[&ids[k]] {
            if done.insert(e) {
                left -= 1;
                for &h in &holders[&e] {
                    fresh[h] -= 1;
                }
            }
        }
    }
    Ok(inst.solution(chosen))
}

/// Minimum-cost cover by branch and bound, branching on the uncovered
/// element with the fewest covering sets.
pub fn exact_cover(inst: &CoverInstance, limit: usize) -> Result<CoverSolution, CoverError> {
    if inst.universe.len() > limit {
        return Err(CoverError::LimitExceeded { size: inst.universe.len(), limit });
    }
    inst.validate()?;
    let elems: Vec<usize> = inst.universe.iter().copied().collect();
    let pos: BTreeMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut order: Vec<usize> = inst.sets.keys().copied().collect();
    order.sort_by(|a, b| inst.cost(*a).cmp(&inst.cost(*b)).then(a.cmp(b)));
    let masks: Vec<(usize, u64, Cost)> = order
        .iter()
        .map(|&j| (j, inst.sets[&j].iter().fold(0u64, |m, e| m | 1 << pos[e]), inst.cost(j)))
        .collect();
    let full = if elems.len() == 64 { u64::MAX } else { (1u64 << elems.len()) - 1 };
    let mut best: Option<(Cost, Vec<usize>)> = None;
    let mut stack = Vec::new();
    bb(&masks, full, 0, Cost::zero(), &mut stack, &mut best);
    let (_, picks) = best.expect("validated instance has a cover");
    Ok(inst.solution(picks.into_iter().collect()))
}

fn bb(
    masks: &[(usize, u64, Cost)],
    full: u64,
    have: u64,
    cost: Cost,
    stack: &mut Vec<usize>,
    best: &mut Option<(Cost, Vec<usize>)>,
) {
    if best.as_ref().is_some_and(|(b, _)| cost >= *b) {
        return;
    }
    if have == full {
        *best = Some((cost, stack.clone()));
        return;
    }
    let missing = full & !have;
    let mut pick = (usize::MAX, 0u64);
    let mut bits = missing;
    while bits != 0 {
        let bit = bits & bits.wrapping_neg();
        bits &= bits - 1;
        let cnt = masks.iter().filter(|(_, m, _)| m & bit != 0).count();
        if cnt < pick.0 {
            pick = (cnt, bit);
        }
    }
    for (j, m, c) in masks {
        if m & pick.1 != 0 {
            stack.push(*j);
            bb(masks, full, have | m, cost + c, stack, best);
            stack.pop();
        }
    }
}

/// Harmonic number `H(d)`, with `H(0) = 0`.
pub fn harmonic(d: usize) -> BigRational {
    (1..=d).fold(BigRational::zero(), |acc, k| acc + BigRational::new(BigInt::from(1), BigInt::from(k)))
}

/// Picks one option per requirement so that the union of the picked sets
/// is as small as possible. Returns the picked option index per requirement.
///
/// Requirements with no options make the problem unsolvable; the first such
/// index is reported.
pub fn min_union_cover(options: &[Vec<VertexSet>]) -> Result<Vec<usize>, CoverError> {
    if let Some(i) = options.iter().position(Vec::is_empty) {
        return Err(CoverError::Uncoverable(i + 1));
    }
    let mut best: Option<VertexSet> = None;
    let mut have = VertexSet::new();
    union_bb(options, &mut have, &mut best);
    let w = best.expect("every requirement has an option");
    Ok(options
        .iter()
        .map(|opts| {
            opts.iter()
                .enumerate()
                .filter(|(_, o)| o.is_subset(&w))
                .min_by_key(|(k, o)| (o.len(), *k))
                .map(|(k, _)| k)
                .expect("optimal union satisfies every requirement")
        })
        .collect())
}

fn union_bb(options: &[Vec<VertexSet>], have: &mut VertexSet, best: &mut Option<VertexSet>) {
    let mut worst: Option<(usize, usize, usize)> = None;
    for (i, opts) in options.iter().enumerate() {
        if opts.iter().any(|o| o.is_subset(have)) {
            continue;
        }
        let need = opts.iter().map(|o| o.difference(have).count()).min().unwrap_or(0);
        let key = (need, usize::MAX - opts.len(), i);
        if worst.is_none_or(|w| (key.0, key.1) > (w.0, w.1)) {
            worst = Some(key);
        }
    }
    let Some((need, _, i)) = worst else {
        if best.as_ref().is_none_or(|b| have.len() < b.len()) {
            *best = Some(have.clone());
        }
        return;
    };
    if best.as_ref().is_some_and(|b| have.len() + need >= b.len()) {
        return;
    }
    let mut opts: Vec<&VertexSet> = options[i].iter().collect();
    opts.sort_by_key(|o| (o.difference(have).count(), o.iter().copied().collect::<Vec<_>>()));
    for o in opts {
        let added: Vec<usize> = o.difference(have).copied().collect();
        have.extend(&added);
        union_bb(options, have, best);
        for v in &added {
            have.remove(v);
        }
    }
}

/// Serde helpers writing a [`Cost`] as a `"num/den"` string.
pub mod cost_str {
    use super::Cost;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Cost, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", c.numer(), c.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Cost, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }

    pub fn parse(text: &str) -> Result<Cost, String> {
        let (a, b) = text.split_once('/').unwrap_or((text, "1"));
        let num = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
        let den = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
        if den == 0 {
            return Err("zero denominator".into());
        }
        Ok(Cost::new(num, den))
    }
}

mod cost_map {
    use std::collections::BTreeMap;

    use super::Cost;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, Cost>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, c)| (k.to_string(), format!("{}/{}", c.numer(), c.denom()))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, Cost>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let id = k.parse::<usize>().map_err(serde::de::Error::custom)?;
                let c = super::cost_str::parse(&v).map_err(serde::de::Error::custom)?;
                Ok((id, c))
            })
            .collect()
    }
}
