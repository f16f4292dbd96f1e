//! Seeded random networks: Erdős–Rényi digraphs, Watts–Strogatz small
//! worlds and preferential-attachment scale-free graphs.
//!
//! Streams come from Xoshiro256++ seeded through SplitMix64, so identical
//! specs give identical graphs.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::StateDigraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("n must be at least 1")]
    EmptyGraph,
    #[error("{name} = {value} is outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("ring degree {k} must be even and below n = {n}")]
    RingDegree { k: usize, n: usize },
    #[error("minimum degree {d} must be at least 1 and below n = {n}")]
    MinDegree { d: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    /// Each ordered pair is an edge with probability `p`.
    Er { p: f64 },
    /// Ring lattice of even degree `k`, each edge rewired with probability
    /// `beta`.
    SmallWorld { k: usize, beta: f64 },
    /// Preferential attachment, `d` distinct targets per new node.
    ScaleFree { d: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub model: Model,
    pub n: usize,
    /// Fraction of undirected links that lose one direction.
    pub direct_fraction: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(model: Model, n: usize, seed: u64) -> Self {
        Self { model, n, direct_fraction: 0.10, seed }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let n = self.n;
        if n == 0 {
            return Err(GenError::EmptyGraph);
        }
        let prob = |name, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(GenError::Probability { name, value })
            }
        };
        prob("direct_fraction", self.direct_fraction)?;
        match self.model {
            Model::Er { p } => prob("p", p),
            Model::SmallWorld { k, beta } => {
                if k % 2 == 1 || k >= n {
                    return Err(GenError::RingDegree { k, n });
                }
                prob("beta", beta)
            }
            Model::ScaleFree { d } => {
                if d == 0 || d >= n {
                    return Err(GenError::MinDegree { d, n });
                }
                Ok(())
            }
        }
    }
}

/// Builds the graph for `spec`. Undirected models yield undirected pairs,
/// of which `⌊direct_fraction · pairs⌋` keep only one random direction.
pub fn generate(spec: &GenSpec) -> Result<StateDigraph, GenError> {
    spec.validate()?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let n = spec.n;
    let pairs = match spec.model {
        Model::Er { p } => {
            let mut g = StateDigraph::new(n);
            for u in 1..=n {
                for v in (1..=n).filter(|&v| v != u) {
                    if rng.gen_bool(p) {
                        g.add_edge(u, v).expect("fresh edge");
                    }
                }
            }
            return Ok(g);
        }
        Model::SmallWorld { k, beta } => small_world(n, k, beta, &mut rng),
        Model::ScaleFree { d } => scale_free(n, d, &mut rng),
    };
    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    let switch = (spec.direct_fraction * pairs.len() as f64).floor() as usize;
    let picked: BTreeSet<usize> = sample(&mut rng, pairs.len(), switch).into_iter().collect();
    let mut g = StateDigraph::new(n);
    for (idx, &(a, b)) in pairs.iter().enumerate() {
        if picked.contains(&idx) {
            let (u, v) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            g.add_edge(u, v).expect("fresh edge");
        } else {
            g.add_undirected(a, b).expect("fresh pair");
        }
    }
    Ok(g)
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn small_world(n: usize, k: usize, beta: f64, rng: &mut impl Rng) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for u in 0..n {
        for j in 1..=k / 2 {
            edges.insert(key(u + 1, (u + j) % n + 1));
        }
    }
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            if !rng.gen_bool(beta) || !edges.contains(&key(u + 1, v + 1)) {
                continue;
            }
            let choices: Vec<usize> = (0..n).filter(|&w| w != u && !edges.contains(&key(u + 1, w + 1))).collect();
            if choices.is_empty() {
                continue;
            }
            let w = choices[rng.gen_range(0..choices.len())];
            edges.remove(&key(u + 1, v + 1));
            edges.insert(key(u + 1, w + 1));
        }
    }
    edges
}

fn scale_free(n: usize, d: usize, rng: &mut impl Rng) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    let mut ends: Vec<usize> = Vec::new();
    for a in 1..=d + 1 {
        for b in a + 1..=d + 1 {
            edges.insert((a, b));
            ends.extend([a, b]);
        }
    }
    for v in d + 2..=n {
        let mut targets = BTreeSet::new();
        while targets.len() < d {
            targets.insert(ends[rng.gen_range(0..ends.len())]);
        }
        for t in targets {
            edges.insert(key(v, t));
            ends.extend([v, t]);
        }
    }
    edges
}
