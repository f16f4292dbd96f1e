//! Command-line front end for `robsense`.
//!
//! [`run`] parses arguments, writes results to `out` and diagnostics to
//! `err`, and returns the process exit code: 0 on success, 1 when no robust
//! extension exists, 2 on usage or input errors.

pub mod bench;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robsense::lrobust::{self, LinkError};
use robsense::netgen::{self, GenSpec, Model};
use robsense::oracle;
use robsense::pnc::{self, FeasibleSolution};
use robsense::srobust::{self, SensorError};
use robsense::{Counters, Mode, StateDigraph, VertexSet};

use crate::report::{InputInfo, RunReport};

#[derive(Parser, Debug)]
#[command(name = "robsense", version, about = "Robust dedicated-sensor placement for structural observability")]
pub struct Cli {
    /// Print errors as JSON on stderr.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test whether a sensor set is a feasible solution.
    Check {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sensors: Vec<usize>,
    },
    /// Print a minimum path-and-cycle decomposition.
    Decompose { file: PathBuf },
    /// Print a minimal feasible solution.
    Place { file: PathBuf },
    /// s-robust extension as a JSON report.
    RobustSensor {
        file: PathBuf,
        #[command(flatten)]
        opts: RobustOpts,
    },
    /// l-robust extension as a JSON report.
    RobustLink {
        file: PathBuf,
        /// Fail undirected pairs as a whole.
        #[arg(long)]
        undirected: bool,
        #[command(flatten)]
        opts: RobustOpts,
    },
    /// Emit a reduction gadget for a set-cover instance as .sdg.
    Gadget {
        kind: GadgetKind,
        /// Cover file: `p N` then one `s e1 e2 ...` line per set.
        #[arg(long)]
        cover: PathBuf,
    },
    /// Generate a random network as .sdg.
    Gen {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write here (plus a `.json` sidecar) instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Scaling campaign as CSV.
    Bench(bench::BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RobustOpts {
    /// Minimum-size extension of the seed.
    #[arg(long, conflicts_with = "greedy")]
    pub exact: bool,
    /// Greedy weighted cover (default).
    #[arg(long)]
    pub greedy: bool,
    /// Seed solution to extend instead of the minimal one.
    #[arg(long, value_delimiter = ',')]
    pub seed_tips: Option<Vec<usize>>,
}

impl RobustOpts {
    fn mode(&self) -> Mode {
        if self.exact {
            Mode::Exact
        } else {
            Mode::Greedy
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GadgetKind {
    Sensor,
    Link,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Er,
    SmallWorld,
    ScaleFree,
}

#[derive(Args, Debug, Clone)]
pub struct ModelOpts {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Edge probability (er).
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    /// Ring degree (small-world).
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Rewiring probability (small-world).
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    /// Minimum degree (scale-free).
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Fraction of undirected links switched to directed.
    #[arg(long, default_value_t = 0.10)]
    pub direct_fraction: f64,
}

impl ModelOpts {
    pub fn spec(&self, n: usize, seed: u64) -> GenSpec {
        let model = match self.model {
            ModelKind::Er => Model::Er { p: self.p },
            ModelKind::SmallWorld => Model::SmallWorld { k: self.k, beta: self.beta },
            ModelKind::ScaleFree => Model::ScaleFree { d: self.d },
        };
        GenSpec { direct_fraction: self.direct_fraction, ..GenSpec::new(model, n, seed) }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self { code: 2, kind: "usage", message: message.to_string() }
    }

    fn input(message: impl ToString) -> Self {
        Self { code: 2, kind: "input", message: message.to_string() }
    }

    fn uncoverable(message: impl ToString) -> Self {
        Self { code: 1, kind: "uncoverable", message: message.to_string() }
    }
}

impl From<SensorError> for Failure {
    fn from(e: SensorError) -> Self {
        match e {
            SensorError::Uncoverable(_) => Failure::uncoverable(e),
            other => Failure::input(other),
        }
    }
}

impl From<LinkError> for Failure {
    fn from(e: LinkError) -> Self {
        match e {
            LinkError::Uncoverable(_) => Failure::uncoverable(e),
            other => Failure::input(other),
        }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let json = argv.iter().any(|a| a == "--json");
    let result = match Cli::try_parse_from(&argv) {
        Ok(cli) => execute(&cli, out),
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            Err(Failure::usage(text.trim_end().trim_start_matches("error: ")))
        }
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            if json {
                let v = serde_json::json!({ "error": f.kind, "message": f.message, "exit_code": f.code });
                let _ = writeln!(err, "{v}");
            } else {
                let _ = writeln!(err, "error: {}", f.message);
            }
            f.code
        }
    }
}

fn load(path: &Path) -> Result<StateDigraph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    StateDigraph::parse_edge_list(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn fmt_set<'a>(s: impl IntoIterator<Item = &'a usize>) -> String {
    format!("{{{}}}", s.into_iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn fmt_walk(w: &[usize]) -> String {
    w.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> ")
}

fn io(e: std::io::Error) -> Failure {
    Failure { code: 2, kind: "io", message: e.to_string() }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Check { file, sensors } => {
            let g = load(file)?;
            let f = sensor_set(&g, sensors)?;
            let verdict = if pnc::is_feasible(&g, &f) { "feasible" } else { "infeasible" };
            writeln!(out, "{verdict}").map_err(io)
        }
        Command::Decompose { file } => {
            let g = load(file)?;
            let d = pnc::min_pnc(&g);
            for p in &d.paths {
                writeln!(out, "path {}", fmt_walk(p)).map_err(io)?;
            }
            for c in &d.cycles {
                writeln!(out, "cycle {}", fmt_walk(c)).map_err(io)?;
            }
            writeln!(out, "tips {}", fmt_set(&d.tips)).map_err(io)
        }
        Command::Place { file } => {
            let g = load(file)?;
            writeln!(out, "F = {}", fmt_set(&pnc::minimal_feasible(&g).all())).map_err(io)
        }
        Command::RobustSensor { file, opts } => {
            let g = load(file)?;
            let ctr = Counters::new();
            let start = Instant::now();
            let seed = seed_solution(&g, opts)?;
            let (sol, cert) = srobust::srobust_from_seed(&g, &seed, opts.mode(), &ctr)?;
            let mut report = RunReport::new("robust-sensor", InputInfo::of(file, &g), seed, sol);
            report.srobust = Some(cert);
            report.finish(&ctr, start);
            emit_json(out, &report)
        }
        Command::RobustLink { file, undirected, opts } => {
            let g = load(file)?;
            let ctr = Counters::new();
            let start = Instant::now();
            let seed = seed_solution(&g, opts)?;
            let (sol, cert) = lrobust::lrobust_from_seed(&g, &seed, opts.mode(), *undirected, &ctr)?;
            let mut report = RunReport::new("robust-link", InputInfo::of(file, &g), seed, sol);
            report.lrobust = Some(cert);
            report.finish(&ctr, start);
            emit_json(out, &report)
        }
        Command::Gadget { kind, cover } => {
            let text = std::fs::read_to_string(cover).map_err(|e| Failure::input(format!("{}: {e}", cover.display())))?;
            let (p, sets) = parse_cover(&text)?;
            let g = match kind {
                GadgetKind::Sensor => oracle::sensor_gadget(p, &sets),
                GadgetKind::Link => oracle::link_gadget(p, &sets),
            }
            .map_err(Failure::input)?;
            write!(out, "{}", g.to_sdg()).map_err(io)
        }
        Command::Gen { model, n, seed, out: path } => {
            let spec = model.spec(*n, *seed);
            let g = netgen::generate(&spec).map_err(Failure::usage)?;
            let sidecar = serde_json::to_string_pretty(&spec).expect("spec serializes");
            let body = format!("# {}\n{}", serde_json::to_string(&spec).expect("spec serializes"), g.to_sdg());
            match path {
                Some(p) => {
                    std::fs::write(p, body).map_err(io)?;
                    std::fs::write(p.with_extension("json"), sidecar + "\n").map_err(io)
                }
                None => write!(out, "{body}").map_err(io),
            }
        }
        Command::Bench(args) => bench::run(args, out),
    }
}

fn sensor_set(g: &StateDigraph, ids: &[usize]) -> Result<VertexSet, Failure> {
    match ids.iter().find(|&&v| v == 0 || v > g.n()) {
        Some(v) => Err(Failure::usage(format!("sensor {v} is outside 1..={}", g.n()))),
        None => Ok(ids.iter().copied().collect()),
    }
}

fn seed_solution(g: &StateDigraph, opts: &RobustOpts) -> Result<FeasibleSolution, Failure> {
    match &opts.seed_tips {
        None => Ok(pnc::minimal_feasible(g)),
        Some(ids) => {
            let f = sensor_set(g, ids)?;
            FeasibleSolution::from_set(g, &f).map_err(Failure::usage)
        }
    }
}

fn emit_json(out: &mut dyn Write, report: &RunReport) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    writeln!(out, "{text}").map_err(io)
}

/// Parses a cover file: a `p N` header, then `s e1 e2 ...` per set.
pub fn parse_cover(text: &str) -> Result<(usize, Vec<VertexSet>), Failure> {
    let mut p = None;
    let mut sets = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let bad = || Failure::input(format!("cover line {}: malformed '{t}'", idx + 1));
        let mut parts = t.split_whitespace();
        let nums = |it: std::str::SplitWhitespace<'_>| -> Result<Vec<usize>, Failure> {
            it.map(|s| s.parse::<usize>().map_err(|_| bad())).collect()
        };
        match parts.next() {
            Some("p") if p.is_none() => match nums(parts)?.as_slice() {
                [n] => p = Some(*n),
                _ => return Err(bad()),
            },
            Some("s") if p.is_some() => sets.push(nums(parts)?.into_iter().collect()),
            _ => return Err(bad()),
        }
    }
    let p = p.ok_or_else(|| Failure::input("cover file lacks a 'p N' header"))?;
    Ok((p, sets))
}
