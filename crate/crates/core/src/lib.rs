//! Exact pacing equilibria of second-price auctions with budgets, for a
//! small number of goods (or of distinct good types).
//!
//! Every quantity is an exact rational. [`solve`] walks the cells of the
//! bid-level arrangement, solving one small linear feasibility problem per
//! cell and choice of price setters, and [`verify_equilibrium`] checks any
//! proposed multipliers and allocation from scratch.

pub mod cells;
pub mod equilibrium;
pub mod feasibility;
pub mod instance;
pub mod rat;
pub mod solver;
pub mod verify;

pub use equilibrium::{Equilibrium, Provenance, Witness};
pub use instance::{
    expand_equilibrium, partition_good_types, preprocess, validate_instance, Instance, InstanceError,
    PreprocessReport, RawInstance, TypePartition,
};
pub use rat::{parse_rat, Rat};
pub use solver::{solve, solve_by_types, solve_with_stats, RunStats, SolveError, Solved, SolverConfig};
pub use verify::{grid_oracle, verify_equilibrium, Condition, VerificationReport};
