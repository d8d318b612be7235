//! The cell-by-cell search for a pacing equilibrium.
//!
//! States of the arrangement are walked in canonical order. Each consistent
//! state yields a cell with fixed `α` expressions and top-bidder sets; for
//! every choice of price witnesses the cell's linear system is solved, and
//! the first feasible one is turned back into an allocation.

use std::time::Instant;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cells::{derive_cell, Arrangement, CellDerivation, CellState, ConsistentStates, Region};
use crate::equilibrium::{Equilibrium, Provenance, Witness};
use crate::feasibility::{
    build_screen_system, build_system, build_witness_system, solve_feasibility, FeasibilityOutcome,
    VarCatalog,
};
use crate::instance::{expand_equilibrium, partition_good_types, preprocess, Instance};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest number of goods (after dropping goods nobody values) the
    /// solver accepts.
    pub max_goods: usize,
    /// Worker threads; 1 runs everything on the calling thread.
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_goods: 4,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("instance has {goods} goods, more than the limit of {limit}")]
    GoodsLimitExceeded { goods: usize, limit: usize },
    #[error("no cell produced an equilibrium; this is a solver bug")]
    NoEquilibriumFound,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

/// `R_j(F)` for every good, plus the sole top bidder where there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSets {
    pub sets: Vec<Vec<Witness>>,
    pub sole_winner: Vec<Option<usize>>,
}

/// One price witness per good.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTuple(pub Vec<Witness>);

/// Exact tallies of one solver run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Canonical position of the winning state plus one: how many states of
    /// the full product a plain scan would have visited.
    pub states_enumerated: u64,
    /// Size of the full product of axis regions.
    pub state_space: u64,
    pub states_consistent: u64,
    pub cells_screened_out: u64,
    pub cells_with_nonempty_witness_sets: u64,
    pub witness_tuples_tried: u64,
    /// Main equilibrium systems only.
    pub lps_solved: u64,
    pub lps_feasible: u64,
    pub screen_lps: u64,
    pub witness_lps: u64,
    pub wall_time_ms: u64,
    pub winning_state_index: Option<u64>,
    pub winning_tuple: Option<Vec<Witness>>,
}

impl RunStats {
    fn absorb(&mut self, t: &Tally) {
        self.states_consistent += t.states_consistent;
        self.cells_screened_out += t.cells_screened_out;
        self.cells_with_nonempty_witness_sets += t.cells_with_sets;
        self.witness_tuples_tried += t.tuples;
        self.lps_solved += t.lps_solved;
        self.lps_feasible += t.lps_feasible;
        self.screen_lps += t.screen_lps;
        self.witness_lps += t.witness_lps;
    }

    pub fn to_json(&self) -> Value {
        json!({
            "states_enumerated": self.states_enumerated,
            "state_space": self.state_space,
            "states_consistent": self.states_consistent,
            "cells_screened_out": self.cells_screened_out,
            "cells_with_nonempty_witness_sets": self.cells_with_nonempty_witness_sets,
            "witness_tuples_tried": self.witness_tuples_tried,
            "lps_solved": self.lps_solved,
            "lps_feasible": self.lps_feasible,
            "screen_lps": self.screen_lps,
            "witness_lps": self.witness_lps,
            "wall_time_ms": self.wall_time_ms,
            "winning_state_index": self.winning_state_index,
            "winning_tuple": self
                .winning_tuple
                .as_ref()
                .map(|t| t.iter().map(|w| w.to_json()).collect::<Vec<_>>()),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Solved {
    pub equilibrium: Equilibrium,
    pub stats: RunStats,
}

#[derive(Debug, Default, Clone)]
struct Tally {
    states_consistent: u64,
    cells_screened_out: u64,
    cells_with_sets: u64,
    tuples: u64,
    lps_solved: u64,
    lps_feasible: u64,
    screen_lps: u64,
    witness_lps: u64,
}

/// Witness sets of a cell, or `None` when some good has no top bidder or no
/// admissible witness.
pub fn witness_sets(
    inst: &Instance,
    arr: &Arrangement,
    state: &CellState,
    cell: &CellDerivation,
) -> Option<WitnessSets> {
    witness_sets_counted(inst, arr, state, cell, &mut Tally::default())
}

fn witness_sets_counted(
    inst: &Instance,
    arr: &Arrangement,
    state: &CellState,
    cell: &CellDerivation,
    tally: &mut Tally,
) -> Option<WitnessSets> {
    let m = inst.m();
    let mut sets = Vec::with_capacity(m);
    let mut sole_winner = Vec::with_capacity(m);
    for j in 0..m {
        match cell.top[j][..] {
            [] => return None,
            [winner] => {
                let candidates = std::iter::once(Witness::Dummy)
                    .chain((0..inst.n()).filter(|&i| i != winner).map(Witness::Buyer));
                let mut set = Vec::new();
                for r in candidates {
                    tally.witness_lps += 1;
                    let sys = build_witness_system(inst, arr, state, cell, j, winner, r);
                    if solve_feasibility(&sys).is_feasible() {
                        set.push(r);
                    }
                }
                if set.is_empty() {
                    return None;
                }
                sets.push(set);
                sole_winner.push(Some(winner));
            }
            _ => {
                sets.push(cell.top[j].iter().map(|&i| Witness::Buyer(i)).collect());
                sole_winner.push(None);
            }
        }
    }
    Some(WitnessSets { sets, sole_winner })
}

/// Tuples of the product of witness sets in lexicographic order, the first
/// good most significant. A good whose top bid is tied contributes only its
/// lowest-index top bidder, since every tied bidder sets the same price.
pub fn enumerate_witness_tuples(ws: &WitnessSets) -> impl Iterator<Item = WitnessTuple> + '_ {
    let choices: Vec<&[Witness]> = ws
        .sets
        .iter()
        .zip(&ws.sole_winner)
        .map(|(set, sole)| if sole.is_some() { &set[..] } else { &set[..1] })
        .collect();
    let mut cursor = vec![0usize; choices.len()];
    let mut done = choices.iter().any(|c| c.is_empty());
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let tuple = WitnessTuple(cursor.iter().zip(&choices).map(|(&k, c)| c[k]).collect());
        done = true;
        for level in (0..cursor.len()).rev() {
            cursor[level] += 1;
            if cursor[level] < choices[level].len() {
                done = false;
                break;
            }
            cursor[level] = 0;
        }
        Some(tuple)
    })
}

/// Turns a feasible point of a cell's system into an equilibrium.
pub fn recover(
    inst: &Instance,
    cell: &CellDerivation,
    tuple: &WitnessTuple,
    outcome: &FeasibilityOutcome,
) -> Result<Equilibrium, SolveError> {
    let point = outcome
        .point
        .as_ref()
        .ok_or_else(|| SolveError::InternalInconsistency("recovering from an infeasible outcome".into()))?;
    let (n, m) = (inst.n(), inst.m());
    let vars = VarCatalog::new(inst);
    let lambda: Vec<Rat> = (0..m).map(|j| point[vars.lambda(j)].clone()).collect();
    let alpha: Vec<Rat> = cell.alpha.iter().map(|a| a.eval(&lambda)).collect();
    let mut eq = Equilibrium::zeroed(n, m);
    for j in 0..m {
        let price = match tuple.0[j] {
            Witness::Dummy => Rat::zero(),
            Witness::Buyer(r) => &alpha[r] * inst.value(r, j),
        };
        let top = &cell.top[j];
        if price.is_zero() {
            let share = Rat::new(1.into(), top.len().into());
            for &i in top {
                eq.x[i][j] = share.clone();
            }
        } else {
            let paid: Rat = top.iter().map(|&i| &point[vars.pay(i, j)]).sum();
            if paid != price {
                return Err(SolveError::InternalInconsistency(format!(
                    "payments on good {j} sum to {paid}, price is {price}"
                )));
            }
            for &i in top {
                eq.x[i][j] = &point[vars.pay(i, j)] / &price;
            }
        }
        for i in 0..n {
            eq.payments[i][j] = &eq.x[i][j] * &price;
        }
        eq.prices[j] = price;
    }
    eq.alpha = alpha;
    eq.lambda = lambda;
    Ok(eq)
}

struct Search<'a> {
    inst: &'a Instance,
    arr: &'a Arrangement,
}

struct Found {
    index: u64,
    state: CellState,
    tuple: WitnessTuple,
    cell: CellDerivation,
    outcome: FeasibilityOutcome,
}

impl Search<'_> {
    /// Every paced buyer spends exactly its budget, and can only spend on
    /// goods it tops, at a price of at most `λ_j`.
    fn budgets_reachable(&self, state: &CellState, cell: &CellDerivation) -> bool {
        let m = self.inst.m();
        let sup: Vec<Option<Rat>> = (0..m)
            .map(|j| match state.coordinate_region(self.arr, j) {
                Region::Point(p) => Some(p),
                Region::Open { hi, .. } => hi,
            })
            .collect();
        let mut total_need = Rat::zero();
        for &i in &cell.paced {
            let mut reach = Some(Rat::zero());
            for j in (0..m).filter(|&j| cell.top[j].contains(&i)) {
                reach = match (reach, &sup[j]) {
                    (Some(r), Some(s)) => Some(r + s),
                    _ => None,
                };
            }
            if let Some(reach) = reach {
                if self.inst.budget(i) > &reach {
                    return false;
                }
            }
            total_need += self.inst.budget(i);
        }
        match sup.iter().cloned().sum::<Option<Rat>>() {
            Some(cap) => total_need <= cap,
            None => true,
        }
    }

    fn process(&self, index: u64, state: &CellState, tally: &mut Tally) -> Result<Option<Found>, SolveError> {
        tally.states_consistent += 1;
        let cell = derive_cell(self.arr, self.inst, state)
            .map_err(|e| SolveError::InternalInconsistency(format!("state {index}: {e}")))?;
        if cell.top.iter().any(|t| t.is_empty()) || !self.budgets_reachable(state, &cell) {
            tally.cells_screened_out += 1;
            return Ok(None);
        }
        tally.screen_lps += 1;
        if !solve_feasibility(&build_screen_system(self.inst, self.arr, state, &cell)).is_feasible() {
            tally.cells_screened_out += 1;
            return Ok(None);
        }
        let Some(sets) = witness_sets_counted(self.inst, self.arr, state, &cell, tally) else {
            return Ok(None);
        };
        tally.cells_with_sets += 1;
        for tuple in enumerate_witness_tuples(&sets) {
            tally.tuples += 1;
            let sys = build_system(self.inst, self.arr, state, &cell, &sets, &tuple)
                .map_err(|e| SolveError::InternalInconsistency(e.to_string()))?;
            tally.lps_solved += 1;
            let outcome = solve_feasibility(&sys);
            if outcome.is_feasible() {
                tally.lps_feasible += 1;
                return Ok(Some(Found {
                    index,
                    state: state.clone(),
                    tuple,
                    cell,
                    outcome,
                }));
            }
        }
        Ok(None)
    }

    fn run_serial(&self, stats: &mut RunStats) -> Result<Option<Found>, SolveError> {
        let mut tally = Tally::default();
        for (index, state) in ConsistentStates::new(self.arr) {
            if let Some(found) = self.process(index, &state, &mut tally)? {
                stats.absorb(&tally);
                return Ok(Some(found));
            }
        }
        stats.absorb(&tally);
        Ok(None)
    }

    /// States are handed out in chunks; within a chunk the lowest index wins,
    /// so the result matches the serial run.
    fn run_parallel(&self, threads: usize, stats: &mut RunStats) -> Result<Option<Found>, SolveError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| SolveError::InternalInconsistency(e.to_string()))?;
        let chunk_size = 4 * threads;
        let mut walker = ConsistentStates::new(self.arr);
        loop {
            let chunk: Vec<(u64, CellState)> = walker.by_ref().take(chunk_size).collect();
            if chunk.is_empty() {
                return Ok(None);
            }
            let results: Vec<(Tally, Result<Option<Found>, SolveError>)> = pool.install(|| {
                chunk
                    .par_iter()
                    .map(|(index, state)| {
                        let mut tally = Tally::default();
                        let result = self.process(*index, state, &mut tally);
                        (tally, result)
                    })
                    .collect()
            });
            for (tally, result) in results {
                stats.absorb(&tally);
                if let Some(found) = result? {
                    return Ok(Some(found));
                }
            }
        }
    }
}

/// Finds an equilibrium; see [`solve_with_stats`].
pub fn solve(inst: &Instance, config: &SolverConfig) -> Result<Equilibrium, SolveError> {
    solve_with_stats(inst, config).map(|s| s.equilibrium)
}

/// Drops goods nobody values, searches the cells of the reduced instance in
/// canonical order and returns the first equilibrium found, with the dropped
/// goods put back unallocated.
pub fn solve_with_stats(inst: &Instance, config: &SolverConfig) -> Result<Solved, SolveError> {
    let start = Instant::now();
    let report = preprocess(inst);
    let reduced = &report.reduced;
    if reduced.m() > config.max_goods {
        return Err(SolveError::GoodsLimitExceeded {
            goods: reduced.m(),
            limit: config.max_goods,
        });
    }
    let mut stats = RunStats::default();
    if reduced.m() == 0 {
        let mut eq = Equilibrium::zeroed(reduced.n(), 0);
        eq.alpha = vec![Rat::one(); reduced.n()];
        stats.wall_time_ms = start.elapsed().as_millis() as u64;
        return Ok(Solved {
            equilibrium: report.reinsert(eq),
            stats,
        });
    }

    let arr = Arrangement::new(reduced);
    stats.state_space = arr.state_count();
    let search = Search { inst: reduced, arr: &arr };
    let found = if config.threads > 1 {
        search.run_parallel(config.threads, &mut stats)?
    } else {
        search.run_serial(&mut stats)?
    };
    let Some(found) = found else {
        return Err(SolveError::NoEquilibriumFound);
    };

    let mut eq = recover(reduced, &found.cell, &found.tuple, &found.outcome)?;
    eq.provenance = Some(Provenance {
        state_index: found.index,
        coordinate_regions: found.state.coordinate.clone(),
        ratio_regions: found.state.ratio.clone(),
        witnesses: found.tuple.0.clone(),
        delta: found.outcome.delta.clone().unwrap_or_default(),
    });
    stats.states_enumerated = found.index + 1;
    stats.winning_state_index = Some(found.index);
    stats.winning_tuple = Some(found.tuple.0);
    stats.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(Solved {
        equilibrium: report.reinsert(eq),
        stats,
    })
}

/// Solves the instance with identical goods merged, then splits the result
/// back over the original goods.
pub fn solve_by_types(inst: &Instance, config: &SolverConfig) -> Result<Solved, SolveError> {
    let partition = partition_good_types(inst);
    let solved = solve_with_stats(&partition.aggregated, config)?;
    let equilibrium = expand_equilibrium(&partition, &solved.equilibrium)
        .map_err(|e| SolveError::InternalInconsistency(e.to_string()))?;
    Ok(Solved {
        equilibrium,
        stats: solved.stats,
    })
}
