//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod vertex_oracle;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sppe_cli::{generate, GenArgs};
use sppe_core::feasibility::{solve_feasibility, Block, FeasibilitySystem, LinExpr, SourceRelation};
use sppe_core::rat::{frac, int};
use sppe_core::{
    grid_oracle, partition_good_types, solve_by_types, solve_with_stats, verify_equilibrium, Condition, Instance,
    Rat, SolverConfig,
};
use tempfile::TempDir;
use vertex_oracle::HalfSpace;

type Outcome = Result<String, String>;

fn gen(n: usize, goods: usize, types: Option<usize>, seed: u64) -> Instance {
    generate(&GenArgs {
        n,
        goods,
        types,
        seed,
        value_range: 1..=100,
        budget_range: 1..=50,
        max_den: 4,
    })
    .expect("generator arguments are valid")
}

fn serial() -> SolverConfig {
    SolverConfig::default()
}

struct SweepRow {
    n: usize,
    c: usize,
    states: u64,
}

/// Buyer count and good count of sweep instance `seed`.
fn sweep_shape(seed: u64) -> (usize, usize) {
    if seed <= 450 {
        (2 + (seed as usize * 13) % 29, 1 + seed as usize % 2)
    } else {
        (2 + (seed as usize * 7) % 11, 3)
    }
}

fn soundness_sweep(rows: &mut Vec<SweepRow>) -> Outcome {
    let mut low = Duration::ZERO;
    let mut high = Duration::ZERO;
    let mut failures = Vec::new();
    for seed in 1..=500u64 {
        let (n, c) = sweep_shape(seed);
        let inst = gen(n, c, None, seed);
        let start = Instant::now();
        let result = solve_with_stats(&inst, &serial());
        let elapsed = start.elapsed();
        if c == 3 {
            high += elapsed;
        } else {
            low += elapsed;
        }
        match result {
            Ok(solved) => {
                let eq = &solved.equilibrium;
                if !verify_equilibrium(&inst, &eq.alpha, &eq.x).pass {
                    failures.push(format!("seed {seed}: verification failed"));
                }
                rows.push(SweepRow { n, c, states: solved.stats.states_enumerated });
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    let timing = format!("c<=2 {:.1}s (limit 600s), c=3 {:.1}s (limit 900s)", low.as_secs_f64(), high.as_secs_f64());
    if !failures.is_empty() {
        return Err(format!("{} failures, first: {}; {timing}", failures.len(), failures[0]));
    }
    if low > Duration::from_secs(600) || high > Duration::from_secs(900) {
        return Err(format!("time limit exceeded: {timing}"));
    }
    Ok(format!("500/500 verified; {timing}"))
}

fn golden() -> Outcome {
    let cases: [(Vec<Vec<Rat>>, Vec<Rat>, Vec<Rat>, Vec<Vec<Rat>>, Vec<Rat>); 3] = [
        (vec![vec![int(2)]], vec![int(1)], vec![int(1)], vec![vec![int(1)]], vec![int(0)]),
        (
            vec![vec![int(2)], vec![int(1)]],
            vec![int(10), int(10)],
            vec![int(1), int(1)],
            vec![vec![int(1)], vec![int(0)]],
            vec![int(1)],
        ),
        (
            vec![vec![int(2)], vec![int(1)]],
            vec![frac(1, 2), int(10)],
            vec![frac(1, 2), int(1)],
            vec![vec![frac(1, 2)], vec![frac(1, 2)]],
            vec![int(1)],
        ),
    ];
    for (k, (values, budgets, alpha, x, prices)) in cases.into_iter().enumerate() {
        let inst = Instance::new(values, budgets).map_err(|e| e.to_string())?;
        let eq = solve_with_stats(&inst, &serial()).map_err(|e| e.to_string())?.equilibrium;
        if eq.alpha != alpha || eq.x != x || eq.prices != prices {
            return Err(format!("golden {}: solver returned alpha {:?}, x {:?}", k + 1, eq.alpha, eq.x));
        }
        let grid = grid_oracle(&inst, 4).map_err(|e| e.to_string())?;
        if !grid.iter().any(|cand| cand.alpha == alpha && cand.x == x) {
            return Err(format!("golden {}: not among {} grid candidates", k + 1, grid.len()));
        }
    }
    Ok("3/3 reproduced exactly and confirmed by the resolution-4 grid".into())
}

/// `(2n+1)^(c(c+1)/2)`, saturating.
fn region_bound(n: usize, c: usize) -> u128 {
    (2 * n as u128 + 1).saturating_pow((c * (c + 1) / 2) as u32)
}

fn cell_count(rows: &[SweepRow]) -> Outcome {
    let mut single = 0;
    for row in rows {
        if row.c == 1 {
            single += 1;
            if row.states > 2 * row.n as u64 + 1 {
                return Err(format!("c=1, n={}: {} states > 2n+1", row.n, row.states));
            }
        }
        if row.states as u128 > region_bound(row.n, row.c) {
            return Err(format!("c={}, n={}: {} states over the region bound", row.c, row.n, row.states));
        }
    }
    Ok(format!("{} rows within bound, {single} of them with c=1 within 2n+1", rows.len()))
}

fn payment_totals(payments: &[Vec<Rat>]) -> Vec<Rat> {
    payments.iter().map(|row| row.iter().sum()).collect()
}

fn aggregation() -> Outcome {
    for seed in 1..=100u64 {
        let n = 2 + seed as usize % 5;
        let m = 10 + (seed as usize * 17) % 51;
        let k = 1 + seed as usize % 3;
        let inst = gen(n, m, Some(k), 10_000 + seed);
        let expanded = solve_by_types(&inst, &serial()).map_err(|e| format!("seed {seed}: {e}"))?.equilibrium;
        if !verify_equilibrium(&inst, &expanded.alpha, &expanded.x).pass {
            return Err(format!("seed {seed}: expanded equilibrium fails verification"));
        }
        let partition = partition_good_types(&inst);
        let aggregated = solve_with_stats(&partition.aggregated, &serial())
            .map_err(|e| format!("seed {seed}: {e}"))?
            .equilibrium;
        if payment_totals(&expanded.payments) != payment_totals(&aggregated.payments) {
            return Err(format!("seed {seed}: payment totals differ"));
        }
    }
    Ok("100/100 verified with matching payment totals".into())
}

fn strict_slack() -> Outcome {
    let relations =
        [SourceRelation::Lt, SourceRelation::Le, SourceRelation::Eq, SourceRelation::Ge, SourceRelation::Gt];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut feasible = 0;
    for case in 0..200 {
        let vars = rng.gen_range(2..=4);
        let count = rng.gen_range(1..=5);
        let mut sys = FeasibilitySystem::new((0..vars).map(|v| format!("z{v}")).collect());
        let mut halves = Vec::new();
        for _ in 0..count {
            let a: Vec<i64> = (0..vars).map(|_| rng.gen_range(-3..=3)).collect();
            let b: i64 = rng.gen_range(-6..=6);
            let rel = relations[rng.gen_range(0..relations.len())];
            let mut expr = LinExpr::constant(int(-b));
            for (v, &coeff) in a.iter().enumerate() {
                if coeff != 0 {
                    expr.add_term(v, int(coeff));
                }
            }
            sys.add(&expr, rel, Block::Other);
            let up: Vec<Rat> = a.iter().map(|&v| int(v)).collect();
            let down: Vec<Rat> = a.iter().map(|&v| int(-v)).collect();
            match rel {
                SourceRelation::Lt | SourceRelation::Le => {
                    halves.push(HalfSpace { a: up, b: int(b), strict: rel.is_strict() })
                }
                SourceRelation::Gt | SourceRelation::Ge => {
                    halves.push(HalfSpace { a: down, b: int(-b), strict: rel.is_strict() })
                }
                SourceRelation::Eq => {
                    halves.push(HalfSpace { a: up, b: int(b), strict: false });
                    halves.push(HalfSpace { a: down, b: int(-b), strict: false });
                }
            }
        }
        let expected = vertex_oracle::feasible(vars, &halves);
        let outcome = solve_feasibility(&sys);
        if outcome.is_feasible() != expected {
            return Err(format!("case {case}: solver says {}, oracle says {expected}\n{sys}", outcome.is_feasible()));
        }
        if let Some(point) = &outcome.point {
            if !sys.satisfied_by(point) {
                return Err(format!("case {case}: returned point violates the system"));
            }
        }
        feasible += expected as usize;
    }
    Ok(format!("200/200 verdicts agree ({feasible} feasible)"))
}

fn run_solve(path: &str, extra: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sppe"))
        .arg("solve")
        .arg("--quiet")
        .args(extra)
        .arg(path)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stdout)));
    }
    Ok(out.stdout)
}

fn parallel_equivalence() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    for seed in 1..=50u64 {
        let c = 1 + seed as usize % 3;
        let n = if c == 3 { 2 + seed as usize % 7 } else { 2 + (seed as usize * 5) % 19 };
        let inst = gen(n, c, None, 20_000 + seed);
        let path = dir.path().join(format!("inst{seed}.json"));
        std::fs::write(&path, inst.to_json().to_string()).map_err(|e| e.to_string())?;
        let path = path.to_str().unwrap();
        let a = run_solve(path, &[])?;
        let b = run_solve(path, &["--parallel", "4"])?;
        if a != b {
            return Err(format!("seed {seed}: serial and parallel outputs differ"));
        }
    }
    Ok("50/50 byte-identical".into())
}

struct Adversarial {
    values: Vec<Vec<Rat>>,
    budgets: Vec<Rat>,
    alpha: Vec<Rat>,
    x: Vec<Vec<Rat>>,
    violates: Condition,
}

fn adversarial_cases() -> Vec<Adversarial> {
    let one = || (vec![vec![int(2)]], vec![int(1)]);
    let rich = || (vec![vec![int(2)], vec![int(1)]], vec![int(10), int(10)]);
    let poor = || (vec![vec![int(2)], vec![int(1)]], vec![frac(1, 2), int(10)]);
    let tight = || (vec![vec![int(2)], vec![int(1)]], vec![int(1), int(10)]);
    let cross = || (vec![vec![int(3), int(1)], vec![int(1), int(3)]], vec![int(10), int(10)]);
    let col = |v: &[Rat]| v.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>();
    let case = |(values, budgets): (Vec<Vec<Rat>>, Vec<Rat>), alpha: Vec<Rat>, x: Vec<Vec<Rat>>, violates| {
        Adversarial { values, budgets, alpha, x, violates }
    };
    vec![
        case(one(), vec![int(1), int(1)], col(&[int(1)]), Condition::Bounds),
        case(rich(), vec![int(1), int(1)], col(&[frac(5, 4), frac(-1, 4)]), Condition::Bounds),
        case(tight(), vec![frac(5, 4), int(1)], col(&[int(1), int(0)]), Condition::Bounds),
        case(rich(), vec![int(1), int(1)], col(&[int(0), int(1)]), Condition::A),
        case(rich(), vec![int(1), int(1)], col(&[frac(1, 2), frac(1, 2)]), Condition::A),
        case(cross(), vec![int(1), int(1)], vec![vec![int(1), int(1)], vec![int(0), int(0)]], Condition::A),
        case(one(), vec![int(1)], col(&[frac(1, 2)]), Condition::B),
        case(rich(), vec![int(1), int(1)], col(&[int(0), int(0)]), Condition::B),
        case(poor(), vec![int(1), int(1)], col(&[int(1), int(0)]), Condition::C),
        case(poor(), vec![frac(1, 2), int(1)], col(&[frac(3, 4), frac(1, 4)]), Condition::C),
        case(rich(), vec![int(1), frac(1, 4)], col(&[int(1), int(0)]), Condition::D),
        case(poor(), vec![frac(1, 2), int(1)], col(&[frac(1, 4), frac(3, 4)]), Condition::D),
    ]
}

fn verifier_adversarial() -> Outcome {
    let cases = adversarial_cases();
    for (k, case) in cases.iter().enumerate() {
        let inst = Instance::new(case.values.clone(), case.budgets.clone()).map_err(|e| e.to_string())?;
        let report = verify_equilibrium(&inst, &case.alpha, &case.x);
        let failing: Vec<Condition> = Condition::ALL.into_iter().filter(|&c| !report.result(c).holds()).collect();
        if report.pass || failing != [case.violates] {
            return Err(format!("case {}: expected only {}, got {:?}", k + 1, case.violates.label(), failing));
        }
        if report.to_json()["first_failure"] != Value::from(case.violates.label()) {
            return Err(format!("case {}: report names the wrong condition", k + 1));
        }
    }
    Ok(format!("{}/{} rejected with the right condition", cases.len(), cases.len()))
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn scaling() -> Outcome {
    let mut states = Vec::new();
    let mut times = Vec::new();
    let mut fractions = Vec::new();
    for n in [10usize, 20, 40] {
        let mut total_states = 0u64;
        let mut total_space = 0u64;
        let start = Instant::now();
        for seed in 1..=5u64 {
            let inst = gen(n, 2, None, 30_000 + seed);
            let solved = solve_with_stats(&inst, &serial()).map_err(|e| format!("n={n}, seed {seed}: {e}"))?;
            total_states += solved.stats.states_enumerated;
            total_space += solved.stats.state_space;
        }
        states.push((n as f64, total_states as f64));
        fractions.push(format!("n={n} {:.2}", total_states as f64 / total_space as f64));
        times.push((n as f64, start.elapsed().as_secs_f64()));
    }
    let (s, t) = (log_log_slope(&states), log_log_slope(&times));
    let detail = format!(
        "states slope {s:.2} (limit 3), time slope {t:.2} (limit 6.4); winner position as share of the state space: {}",
        fractions.join(", ")
    );
    if s <= 3.0 && t <= 6.4 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn report(number: u32, name: &str, outcome: Outcome) -> bool {
    match outcome {
        Ok(detail) => {
            println!("PASS criterion {number} ({name}): {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL criterion {number} ({name}): {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut rows = Vec::new();
    let results = [
        report(1, "soundness sweep", soundness_sweep(&mut rows)),
        report(2, "golden instances", golden()),
        report(3, "cell-count bound", cell_count(&rows)),
        report(4, "aggregation equivalence", aggregation()),
        report(5, "strict-slack correctness", strict_slack()),
        report(6, "parallel equivalence", parallel_equivalence()),
        report(7, "verifier adversarial suite", verifier_adversarial()),
        report(8, "scaling sanity", scaling()),
    ];
    if results.iter().all(|&ok| ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
