//! Work counters shared across analyses.

use std::sync::atomic::{AtomicU64, Ordering};

/// Operation counts for one run. Safe to update from several threads.
#[derive(Debug, Default)]
pub struct Counters {
    matchings: AtomicU64,
    decompositions: AtomicU64,
    links: AtomicU64,
    candidates: AtomicU64,
}

/// Plain copy of [`Counters`] for reporting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CounterSnapshot {
    pub matchings_run: u64,
    pub decompositions_run: u64,
    pub links_tested: u64,
    pub candidates_tested: u64,
}

impl Counters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_matchings(&self, k: u64) {
        self.matchings.fetch_add(k, Ordering::Relaxed);
    }

    pub fn add_decompositions(&self, k: u64) {
        self.decompositions.fetch_add(k, Ordering::Relaxed);
    }

    pub fn add_links(&self, k: u64) {
        self.links.fetch_add(k, Ordering::Relaxed);
    }

    pub fn add_candidates(&self, k: u64) {
        self.candidates.fetch_add(k, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            matchings_run: self.matchings.load(Ordering::Relaxed),
            decompositions_run: self.decompositions.load(Ordering::Relaxed),
            links_tested: self.links.load(Ordering::Relaxed),
            candidates_tested: self.candidates.load(Ordering::Relaxed),
        }
    }
}
