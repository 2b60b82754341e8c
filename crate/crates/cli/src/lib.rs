//! Experiment dispatch for the `carmen` binary.
//!
//! Each subcommand loads its input files, runs one library operation and
//! produces a JSON report. CSV output is a flattening of that JSON: one
//! `key,value` row per scalar leaf, nested keys joined with `.` and array
//! elements addressed by their index.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use carmen_core::entropy::posterior_table;
use carmen_core::formats::{
    AlgorithmInput, ComplexityJson, DegreeJson, EntropyJson, GameOutcomeJson, GameValueJson, HardDistributionJson,
    HarnessJson, KSetFile, MinMaxDegreeJson, StrategyFile, Theorem1Json,
};
use carmen_core::game::{exact_game_complexity, run_game, strategy_complexity};
use carmen_core::hypercube::{max_induced_degree, min_max_degree, verify_theorem1, KSet, SearchMode};
use carmen_core::query::{
    hard_distribution_exact, hard_distribution_sample, search_success_estimate, search_success_probability,
    theorem2_harness,
};
use carmen_core::{BobStrategy, Caps, Permutation};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] carmen_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_precondition() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "carmen", version, about = "Exact experiments on the Carmen Sandiego clue game")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampled mode.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play one game and list Alice's suspects.
    Play {
        #[arg(long)]
        strategy: PathBuf,
        /// Itinerary as comma-separated 1-based cities, e.g. 2,3,1.
        #[arg(long, value_delimiter = ',')]
        pi: Vec<usize>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        z: u8,
    },
    /// Worst-case cost of a strategy.
    Complexity {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Exact game value by exhaustive search over every table strategy.
    SearchMin {
        #[arg(long)]
        n: usize,
    },
    /// Induced degrees of a K-set, or with --n alone the smallest possible
    /// maximum degree over all large enough K.
    Degree {
        #[arg(long)]
        kset: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        /// Sets must be strictly larger than this (default 2^(n-1)).
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Check the halving strategy of a K-set against its degree bound.
    VerifyT1 {
        #[arg(long)]
        kset: PathBuf,
    },
    /// Exact conditional entropy of the hideout given the clue string.
    Entropy {
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Parity-to-search reduction for a query algorithm.
    Reduce {
        #[arg(long)]
        alg: PathBuf,
    },
    /// Search-success probability of an algorithm against a given strategy.
    Search {
        #[arg(long)]
        alg: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Law of the clue string under the halving strategy of a K-set.
    HardDist {
        #[arg(long)]
        kset: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

/// Whether the operation applied to its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotApplicable,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotApplicable => 2,
            Status::Failed => 1,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub status: Status,
    pub warnings: Vec<String>,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse { path: path.into(), source })
}

fn load_strategy(path: &Path, n: Option<usize>) -> Result<BobStrategy, CliError> {
    let s = read_json::<StrategyFile>(path)?.to_strategy()?;
    check_n(n, s.n())?;
    Ok(s)
}

fn load_kset(path: &Path) -> Result<KSet, CliError> {
    Ok(read_json::<KSetFile>(path)?.to_kset()?)
}

fn check_n(requested: Option<usize>, found: usize) -> Result<(), CliError> {
    match requested {
        Some(n) if n != found => Err(carmen_core::Error::DimensionMismatch { expected: n, found }.into()),
        _ => Ok(()),
    }
}

fn to_value<T: Serialize>(report: &T) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

fn ok(report: Value) -> Outcome {
    Outcome { report, status: Status::Ok, warnings: Vec::new() }
}

/// Runs one subcommand with the given caps and returns its report.
pub fn dispatch(cli: &Cli, caps: &Caps) -> Result<Outcome, CliError> {
    let opts = &cli.opts;
    let mut warnings = Vec::new();
    let sampled_seed = || {
        opts.seed.ok_or_else(|| CliError::Usage("--seed is required with --mode sampled".into()))
    };
    let sampling = matches!(
        cli.command,
        Command::Degree { kset: None, .. } | Command::Search { .. } | Command::HardDist { .. }
    );
    if opts.mode == Mode::Sampled && !sampling {
        return Err(CliError::Usage("this command has no sampled mode".into()));
    }
    if opts.mode == Mode::Exact && opts.seed.is_some() {
        warnings.push("--seed is ignored in exact mode".to_string());
    }

    let mut outcome = match &cli.command {
        Command::Play { strategy, pi, z } => {
            let s = load_strategy(strategy, None)?;
            let pi = Permutation::from_one_based(pi)?;
            let out = run_game(&s, &pi, *z == 1, caps)?;
            ok(to_value(&GameOutcomeJson::from(&out)))
        }
        Command::Complexity { n, strategy } => {
            let s = load_strategy(strategy, *n)?;
            let c = strategy_complexity(&s, caps)?;
            ok(to_value(&ComplexityJson::new(&s, &c)))
        }
        Command::SearchMin { n } => ok(to_value(&GameValueJson::from(&exact_game_complexity(*n, caps)?))),
        Command::Degree { kset: Some(path), n, .. } => {
            let k = load_kset(path)?;
            check_n(*n, k.n())?;
            ok(to_value(&DegreeJson::from(&max_induced_degree(&k)?)))
        }
        Command::Degree { kset: None, n, threshold, samples } => {
            let n = n.ok_or_else(|| CliError::Usage("degree needs --kset or --n".into()))?;
            let mode = match opts.mode {
                Mode::Exact => SearchMode::Exhaustive,
                Mode::Sampled => SearchMode::Sampled { seed: sampled_seed()?, samples: *samples },
            };
            ok(to_value(&MinMaxDegreeJson::from(&min_max_degree(n, *threshold, mode, caps)?)))
        }
        Command::VerifyT1 { kset } => {
            let r = verify_theorem1(&load_kset(kset)?, caps)?;
            let status = if r.passed() { Status::Ok } else { Status::Failed };
            Outcome { report: to_value(&Theorem1Json::from(&r)), status, warnings: Vec::new() }
        }
        Command::Entropy { strategy } => {
            let s = load_strategy(strategy, None)?;
            let table = posterior_table(&s, caps)?;
            ok(to_value(&EntropyJson::new(&s, &table)))
        }
        Command::Reduce { alg } => {
            let alg = read_json::<AlgorithmInput>(alg)?.to_algorithm()?;
            let r = theorem2_harness(&alg, caps)?;
            let status = match (r.premise, r.passed()) {
                (false, _) => Status::NotApplicable,
                (true, true) => Status::Ok,
                (true, false) => Status::Failed,
            };
            Outcome { report: to_value(&HarnessJson::from(&r)), status, warnings: Vec::new() }
        }
        Command::Search { alg, strategy, samples } => {
            let alg = read_json::<AlgorithmInput>(alg)?.to_algorithm()?;
            let s = load_strategy(strategy, Some(alg.n()))?;
            let mut report = serde_json::json!({ "n": alg.n(), "t": alg.t() });
            match opts.mode {
                Mode::Exact => {
                    let p = search_success_probability(&alg, &s, caps)?;
                    report["exact"] = true.into();
                    report["search_success"] = carmen_core::formats::fraction(&p).into();
                }
                Mode::Sampled => {
                    let seed = sampled_seed()?;
                    let est = search_success_estimate(&alg, &s, seed, *samples)?;
                    report["exact"] = false.into();
                    report["seed"] = seed.into();
                    report["estimate"] = to_value(&est);
                }
            }
            ok(report)
        }
        Command::HardDist { kset, count } => {
            let k = load_kset(kset)?;
            let report = match opts.mode {
                Mode::Exact => HardDistributionJson::exact(&k, &hard_distribution_exact(&k, caps)?),
                Mode::Sampled => {
                    let seed = sampled_seed()?;
                    HardDistributionJson::sampled(&k, seed, &hard_distribution_sample(&k, seed, *count)?)
                }
            };
            let status = if report.support_ok { Status::Ok } else { Status::Failed };
            Outcome { report: to_value(&report), status, warnings: Vec::new() }
        }
    };
    outcome.warnings.extend(warnings);
    Ok(outcome)
}

/// Runs [`dispatch`] inside a pool of `opts.workers` threads.
pub fn run(cli: &Cli, caps: &Caps) -> Result<Outcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.opts.workers).build()?;
    pool.install(|| dispatch(cli, caps))
}

/// Serialises a report in the requested format.
pub fn render(report: &Value, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report).expect("valid JSON") + "\n"),
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", report, &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"])?;
            for (k, v) in rows {
                w.write_record([k, v])?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("utf-8"))
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
