//! Scaling campaign: per-trial CSV rows plus per-size medians.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use robsense::netgen::{self, GenSpec};
use robsense::{lrobust, pnc, srobust, Counters, Mode};
use serde::Serialize;

use crate::{Failure, ModelOpts};

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[command(flatten)]
    pub model: ModelOpts,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Minimum-size extensions instead of greedy.
    #[arg(long)]
    pub exact: bool,
    /// Fail undirected pairs as a whole.
    #[arg(long)]
    pub undirected: bool,
    /// Also write per-size medians and enumeration bounds here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

/// One trial. Empty robust sizes mark extensions that do not exist.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub n: usize,
    #[serde(rename = "|F|")]
    pub f: usize,
    #[serde(rename = "|F^s|")]
    pub fs: Option<usize>,
    #[serde(rename = "|F^l|")]
    pub fl: Option<usize>,
    #[serde(rename = "D_s")]
    pub ds: u64,
    #[serde(rename = "D_l")]
    pub dl: u64,
    pub time_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub n: usize,
    pub trials: usize,
    pub failed_s: usize,
    pub failed_l: usize,
    #[serde(rename = "|F|")]
    pub f: f64,
    #[serde(rename = "|F^s|")]
    pub fs: Option<f64>,
    #[serde(rename = "|F^l|")]
    pub fl: Option<f64>,
    #[serde(rename = "D_s")]
    pub ds: f64,
    #[serde(rename = "D_l")]
    pub dl: f64,
    pub time_ms: f64,
    /// Subsets a pure enumeration over non-seed vertices would test.
    #[serde(rename = "D'")]
    pub enumeration_bound: f64,
}

/// Seed of trial `t` at size `n`.
pub fn trial_seed(base: u64, n: usize, t: usize) -> u64 {
    base.wrapping_add((n as u64) << 32).wrapping_add(t as u64)
}

/// `2^(n - |F|) - 1`.
pub fn enumeration_bound(n: usize, f: usize) -> f64 {
    2f64.powi((n - f.min(n)) as i32) - 1.0
}

/// Runs both extensions on one generated graph.
pub fn trial(spec: &GenSpec, mode: Mode, undirected: bool) -> Result<Row, Failure> {
    let g = netgen::generate(spec).map_err(Failure::usage)?;
    let start = Instant::now();
    let seed = pnc::minimal_feasible(&g);
    let cs = Counters::new();
    let fs = srobust::srobust_from_seed(&g, &seed, mode, &cs).ok().map(|(s, _)| s.len());
    let cl = Counters::new();
    let fl = lrobust::lrobust_from_seed(&g, &seed, mode, undirected, &cl).ok().map(|(s, _)| s.len());
    Ok(Row {
        n: spec.n,
        f: seed.len(),
        fs,
        fl,
        ds: cs.snapshot().decompositions_run,
        dl: cl.snapshot().decompositions_run,
        time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[k] } else { (v[k - 1] + v[k]) / 2.0 })
}

pub fn summarize(n: usize, rows: &[Row]) -> Summary {
    let col = |f: &dyn Fn(&Row) -> Option<f64>| median(rows.iter().filter_map(f).collect());
    let f = col(&|r| Some(r.f as f64)).unwrap_or(0.0);
    Summary {
        n,
        trials: rows.len(),
        failed_s: rows.iter().filter(|r| r.fs.is_none()).count(),
        failed_l: rows.iter().filter(|r| r.fl.is_none()).count(),
        f,
        fs: col(&|r| r.fs.map(|x| x as f64)),
        fl: col(&|r| r.fl.map(|x| x as f64)),
        ds: col(&|r| Some(r.ds as f64)).unwrap_or(0.0),
        dl: col(&|r| Some(r.dl as f64)).unwrap_or(0.0),
        time_ms: col(&|r| Some(r.time_ms)).unwrap_or(0.0),
        enumeration_bound: enumeration_bound(n, f.round() as usize),
    }
}

pub fn run(args: &BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mode = if args.exact { Mode::Exact } else { Mode::Greedy };
    let jobs: Vec<(usize, usize)> =
        args.n_list.iter().flat_map(|&n| (0..args.trials).map(move |t| (n, t))).collect();
    for &n in &args.n_list {
        args.model.spec(n, 0).validate().map_err(Failure::usage)?;
    }
    let rows: Vec<Result<Row, Failure>> = jobs
        .par_iter()
        .map(|&(n, t)| trial(&args.model.spec(n, trial_seed(args.seed, n, t)), mode, args.undirected))
        .collect();
    let mut w = csv::Writer::from_writer(out);
    let mut ok = Vec::new();
    for r in rows {
        let r = r?;
        w.serialize(&r).map_err(|e| Failure::input(e.to_string()))?;
        ok.push(r);
    }
    w.flush().map_err(|e| Failure::input(e.to_string()))?;
    if let Some(path) = &args.summary {
        let mut s = csv::Writer::from_path(path).map_err(|e| Failure::input(e.to_string()))?;
        for &n in &args.n_list {
            let of_n: Vec<Row> = ok.iter().filter(|r| r.n == n).cloned().collect();
            s.serialize(summarize(n, &of_n)).map_err(|e| Failure::input(e.to_string()))?;
        }
        s.flush().map_err(|e| Failure::input(e.to_string()))?;
    }
    Ok(())
}
