//! Robust minimum dedicated-sensor placement for structural observability.
//!
//! Vertices are 1-indexed in every public signature (`x_1..x_n`); an edge
//! `(i, j)` means state `x_i` influences `x_j`, i.e. `A[j][i] != 0`.
//!
//! Module map:
//! - [`digraph`]: state digraph, `.sdg` I/O, SCCs and sink components
//! - [`pnc`]: matchings, path-and-cycle decompositions, feasibility
//! - [`srobust`]: back-ups against a single sensor failure
//! - [`lrobust`]: sensitive links and completions against a single link failure
//! - [`setcover`]: greedy and exact set covering
//! - [`oracle`]: finite-field rank test, exhaustive searches, reduction gadgets
//! - [`netgen`]: seeded random network families

pub mod counters;
pub mod digraph;
pub mod lrobust;
pub mod netgen;
pub mod oracle;
pub mod pnc;
pub mod setcover;
pub mod srobust;

pub use counters::Counters;
pub use digraph::{StateDigraph, VertexSet};
pub use pnc::FeasibleSolution;

/// How a robust extension is chosen from its cover instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Weighted greedy cover (harmonic-ratio guarantee).
    Greedy,
    /// Minimum number of added sensors via branch and bound.
    Exact,
}
