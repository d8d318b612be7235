//! Command implementations behind the `sppe` binary.
//!
//! Every command writes its result to the given writer and returns the
//! process exit code, so the whole front-end can be driven from tests.

use std::io::{self, Read, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sppe_core::equilibrium::parse_alpha_x;
use sppe_core::{
    partition_good_types, solve_by_types, solve_with_stats, verify_equilibrium, Instance, Rat, SolveError,
    Solved, SolverConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sppe", version, about = "Exact second-price pacing equilibria for few goods")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and print the equilibrium as JSON.
    Solve(SolveArgs),
    /// Check a proposed equilibrium against an instance.
    Verify {
        instance: PathBuf,
        equilibrium: PathBuf,
    },
    /// Print a random instance as JSON.
    Gen(GenArgs),
    /// Solve a grid of random instances and print one CSV row each.
    Bench(BenchArgs),
    /// Print the partition of goods into types and the aggregated instance.
    Aggregate { instance: PathBuf },
}

#[derive(Debug, Args)]
pub struct SolverFlags {
    /// Largest number of distinct goods accepted.
    #[arg(long, default_value_t = 4)]
    pub max_goods: usize,
    /// Worker threads for the cell search.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub parallel: u64,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            max_goods: self.max_goods,
            threads: self.parallel as usize,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance JSON file, or `-` for standard input.
    pub instance: PathBuf,
    /// Merge goods with identical valuation columns before solving.
    #[arg(long)]
    pub by_types: bool,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Emit without re-checking the equilibrium.
    #[arg(long)]
    pub skip_verify: bool,
    /// Omit run statistics from the output.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args, Clone)]
pub struct GenArgs {
    /// Number of buyers.
    #[arg(long)]
    pub n: usize,
    /// Number of goods.
    #[arg(long, short = 'c', alias = "m")]
    pub goods: usize,
    /// Draw only this many distinct valuation columns and spread them over
    /// the goods.
    #[arg(long)]
    pub types: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Valuations are drawn from this range, e.g. `1..100`.
    #[arg(long, default_value = "1..100", value_parser = parse_range)]
    pub value_range: RangeInclusive<u64>,
    #[arg(long, default_value = "1..50", value_parser = parse_range)]
    pub budget_range: RangeInclusive<u64>,
    /// Largest denominator of generated rationals.
    #[arg(long, default_value_t = 4)]
    pub max_den: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated buyer counts.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
    pub n: Vec<usize>,
    /// Comma-separated good counts.
    #[arg(long, short = 'c', value_delimiter = ',', default_value = "1,2")]
    pub goods: Vec<usize>,
    /// Seeds, e.g. `1..5`.
    #[arg(long, default_value = "1..3", value_parser = parse_range)]
    pub seeds: RangeInclusive<u64>,
    #[arg(long, default_value = "1..100", value_parser = parse_range)]
    pub value_range: RangeInclusive<u64>,
    #[arg(long, default_value = "1..50", value_parser = parse_range)]
    pub budget_range: RangeInclusive<u64>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

/// Parses `a..b` (inclusive) or a single number.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let bad = |_| format!("invalid range {s:?}, expected e.g. 1..100");
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo.trim().parse().map_err(bad)?, hi.trim().parse().map_err(bad)?),
        None => {
            let v = s.trim().parse().map_err(bad)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

fn read_json(path: &Path) -> Result<Value, String> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map_err(|e| format!("stdin: {e}"))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_instance(path: &Path) -> Result<Instance, String> {
    Instance::from_json(&read_json(path)?).map_err(|e| e.to_string())
}

fn emit(out: &mut dyn Write, value: &Value) -> io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("JSON values always serialize"))
}

fn error_json(kind: &str, message: impl std::fmt::Display) -> Value {
    json!({ "error": kind, "message": message.to_string() })
}

fn solve_error_exit(err: &SolveError) -> (i32, Value) {
    match err {
        SolveError::GoodsLimitExceeded { .. } => (EXIT_GUARD, error_json("goods_limit_exceeded", err)),
        SolveError::NoEquilibriumFound => (EXIT_INTERNAL, error_json("no_equilibrium_found", err)),
        SolveError::InternalInconsistency(_) => (EXIT_INTERNAL, error_json("internal_inconsistency", err)),
    }
}

/// Runs one parsed command line.
pub fn run(cli: Cli, out: &mut dyn Write) -> io::Result<i32> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Verify { instance, equilibrium } => cmd_verify(&instance, &equilibrium, out),
        Command::Gen(args) => cmd_gen(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
        Command::Aggregate { instance } => cmd_aggregate(&instance, out),
    }
}

/// Solves `inst` and checks the result against the original instance.
pub fn solve_checked(
    inst: &Instance,
    config: &SolverConfig,
    by_types: bool,
    verify: bool,
) -> Result<Solved, (i32, Value)> {
    let solved = if by_types {
        solve_by_types(inst, config)
    } else {
        solve_with_stats(inst, config)
    }
    .map_err(|e| solve_error_exit(&e))?;
    if verify {
        let eq = &solved.equilibrium;
        let report = verify_equilibrium(inst, &eq.alpha, &eq.x);
        if !report.pass {
            let mut err = error_json("verification_failed", "solver output failed verification");
            err["report"] = report.to_json();
            return Err((EXIT_INTERNAL, err));
        }
    }
    Ok(solved)
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> io::Result<i32> {
    let inst = match read_instance(&args.instance) {
        Ok(inst) => inst,
        Err(e) => {
            emit(out, &error_json("invalid_input", e))?;
            return Ok(EXIT_INPUT);
        }
    };
    match solve_checked(&inst, &args.solver.config(), args.by_types, !args.skip_verify) {
        Ok(solved) => {
            let mut value = solved.equilibrium.to_json();
            if !args.quiet {
                value["stats"] = solved.stats.to_json();
            }
            emit(out, &value)?;
            Ok(EXIT_OK)
        }
        Err((code, value)) => {
            emit(out, &value)?;
            Ok(code)
        }
    }
}

pub fn cmd_verify(instance: &Path, equilibrium: &Path, out: &mut dyn Write) -> io::Result<i32> {
    let parsed = read_instance(instance).and_then(|inst| {
        let (alpha, x) = parse_alpha_x(&read_json(equilibrium)?).map_err(|e| format!("{}: {e}", equilibrium.display()))?;
        Ok((inst, alpha, x))
    });
    let (inst, alpha, x) = match parsed {
        Ok(p) => p,
        Err(e) => {
            emit(out, &error_json("invalid_input", e))?;
            return Ok(EXIT_INPUT);
        }
    };
    let report = verify_equilibrium(&inst, &alpha, &x);
    emit(out, &report.to_json())?;
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// A rational in `range` with denominator at most `max_den`.
fn draw_rat(rng: &mut ChaCha8Rng, range: &RangeInclusive<u64>, max_den: u64) -> Rat {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(range.start() * den..=range.end() * den);
    Rat::new(num.into(), den.into())
}

/// Deterministic random instance; all valuations and budgets positive.
pub fn generate(args: &GenArgs) -> Result<Instance, String> {
    if args.n == 0 || args.goods == 0 {
        return Err("n and the number of goods must be positive".into());
    }
    if args.max_den == 0 || *args.value_range.start() == 0 || *args.budget_range.start() == 0 {
        return Err("value and budget ranges and max-den must be positive".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let column = |rng: &mut ChaCha8Rng| -> Vec<Rat> {
        (0..args.n).map(|_| draw_rat(rng, &args.value_range, args.max_den)).collect()
    };
    let columns: Vec<Vec<Rat>> = match args.types {
        None => (0..args.goods).map(|_| column(&mut rng)).collect(),
        Some(k) => {
            if k == 0 || k > args.goods {
                return Err(format!("types must lie in 1..={}", args.goods));
            }
            let mut distinct: Vec<Vec<Rat>> = Vec::with_capacity(k);
            let mut attempts = 0;
            while distinct.len() < k {
                let c = column(&mut rng);
                if !distinct.contains(&c) {
                    distinct.push(c);
                }
                attempts += 1;
                if attempts > 1000 * k {
                    return Err("value range too narrow for that many distinct types".into());
                }
            }
            // the first k goods cover every type once, the rest are drawn
            let mut assignment: Vec<usize> = (0..k).collect();
            assignment.extend((k..args.goods).map(|_| rng.gen_range(0..k)));
            assignment.iter().map(|&t| distinct[t].clone()).collect()
        }
    };
    let valuations = (0..args.n)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let budgets = (0..args.n)
        .map(|_| draw_rat(&mut rng, &args.budget_range, args.max_den))
        .collect();
    Instance::new(valuations, budgets).map_err(|e| e.to_string())
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> io::Result<i32> {
    match generate(args) {
        Ok(inst) => {
            emit(out, &inst.to_json())?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            emit(out, &error_json("invalid_parameters", e))?;
            Ok(EXIT_INPUT)
        }
    }
}

pub const BENCH_HEADER: [&str; 16] = [
    "n",
    "c",
    "seed",
    "status",
    "verified",
    "states_enumerated",
    "state_space",
    "states_consistent",
    "cells_with_nonempty_witness_sets",
    "witness_tuples_tried",
    "lps_solved",
    "lps_feasible",
    "screen_lps",
    "witness_lps",
    "wall_time_ms",
    "winning_state_index",
];

/// One CSV row of [`BENCH_HEADER`] for the instance generated from `gen`.
pub fn bench_row(gen: &GenArgs, config: &SolverConfig) -> Vec<String> {
    let mut row = vec![gen.n.to_string(), gen.goods.to_string(), gen.seed.to_string()];
    let inst = match generate(gen) {
        Ok(inst) => inst,
        Err(e) => {
            row.push(format!("invalid: {e}"));
            row.resize(BENCH_HEADER.len(), String::new());
            return row;
        }
    };
    match solve_with_stats(&inst, config) {
        Ok(solved) => {
            let eq = &solved.equilibrium;
            let verified = verify_equilibrium(&inst, &eq.alpha, &eq.x).pass;
            let s = &solved.stats;
            row.push("ok".into());
            row.push(verified.to_string());
            for v in [
                s.states_enumerated,
                s.state_space,
                s.states_consistent,
                s.cells_with_nonempty_witness_sets,
                s.witness_tuples_tried,
                s.lps_solved,
                s.lps_feasible,
                s.screen_lps,
                s.witness_lps,
                s.wall_time_ms,
            ] {
                row.push(v.to_string());
            }
            row.push(s.winning_state_index.map(|i| i.to_string()).unwrap_or_default());
        }
        Err(e) => {
            row.push(format!("error: {e}"));
            row.resize(BENCH_HEADER.len(), String::new());
        }
    }
    row
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> io::Result<i32> {
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(BENCH_HEADER)?;
    let config = args.solver.config();
    for &c in &args.goods {
        for &n in &args.n {
            for seed in args.seeds.clone() {
                let gen = GenArgs {
                    n,
                    goods: c,
                    types: None,
                    seed,
                    value_range: args.value_range.clone(),
                    budget_range: args.budget_range.clone(),
                    max_den: 4,
                };
                csv.write_record(bench_row(&gen, &config))?;
                csv.flush()?;
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_aggregate(instance: &Path, out: &mut dyn Write) -> io::Result<i32> {
    match read_instance(instance) {
        Ok(inst) => {
            emit(out, &partition_good_types(&inst).to_json())?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            emit(out, &error_json("invalid_input", e))?;
            Ok(EXIT_INPUT)
        }
    }
}
