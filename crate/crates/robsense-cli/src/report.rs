//! Versioned JSON run report.

use std::path::Path;
use std::time::Instant;

use robsense::counters::CounterSnapshot;
use robsense::lrobust::LinkCertificate;
use robsense::srobust::SensorCertificate;
use robsense::{Counters, FeasibleSolution, StateDigraph, VertexSet};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Bundled fixture files whose results are checked verbatim.
pub const REFERENCE_FIXTURES: [&str; 7] =
    ["fig1.sdg", "fig2.sdg", "fig3.sdg", "fig4.sdg", "fig5.sdg", "fig8_p2k2.sdg", "fig9_p2k2.sdg"];

#[derive(Clone, Debug, Serialize)]
pub struct InputInfo {
    pub path: String,
    pub n: usize,
    pub edges: usize,
    pub undirected_pairs: usize,
}

impl InputInfo {
    pub fn of(path: &Path, g: &StateDigraph) -> Self {
        Self {
            path: path.display().to_string(),
            n: g.n(),
            edges: g.edge_count(),
            undirected_pairs: g.undirected_pairs().len(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub input: InputInfo,
    pub reference_example: bool,
    pub seed_solution: FeasibleSolution,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub srobust: Option<SensorCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lrobust: Option<LinkCertificate>,
    pub solution: Vec<usize>,
    pub counters: CounterSnapshot,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn new(command: &str, input: InputInfo, seed: FeasibleSolution, solution: VertexSet) -> Self {
        let reference_example = Path::new(&input.path)
            .file_name()
            .and_then(|s| s.to_str())
            .is_some_and(|s| REFERENCE_FIXTURES.contains(&s));
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input,
            reference_example,
            seed_solution: seed,
            srobust: None,
            lrobust: None,
            solution: solution.into_iter().collect(),
            counters: CounterSnapshot::default(),
            wall_time_ms: 0.0,
        }
    }

    pub fn finish(&mut self, ctr: &Counters, start: Instant) {
        self.counters = ctr.snapshot();
        self.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    }
}
