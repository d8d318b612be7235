//! Assembly of the per-cell linear systems.
//!
//! Inside a cell every `α_i(λ)` is a fixed linear function of `λ`, so it is
//! substituted here and the solver only sees `λ`, the payments `y` and `δ`.

use num_traits::One;
use thiserror::Error;

use super::{Block, FeasibilitySystem, LinExpr, SourceRelation};
use crate::cells::{AlphaExpr, Arrangement, CellDerivation, CellState, Region};
use crate::equilibrium::Witness;
use crate::instance::Instance;
use crate::rat::Rat;
use crate::solver::{WitnessSets, WitnessTuple};

/// Variable layout: `λ_0..λ_{m-1}`, then `y_ij` row-major, then `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarCatalog {
    pub buyers: usize,
    pub goods: usize,
}

impl VarCatalog {
    pub fn new(inst: &Instance) -> Self {
        VarCatalog {
            buyers: inst.n(),
            goods: inst.m(),
        }
    }

    pub fn lambda(&self, good: usize) -> usize {
        good
    }

    pub fn pay(&self, buyer: usize, good: usize) -> usize {
        self.goods + buyer * self.goods + good
    }

    pub fn delta(&self) -> usize {
        self.goods * (self.buyers + 1)
    }

    /// Names without `delta`, which [`FeasibilitySystem::new`] appends.
    pub fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.goods).map(|j| format!("lambda_{j}")).collect();
        for i in 0..self.buyers {
            for j in 0..self.goods {
                names.push(format!("y_{i}_{j}"));
            }
        }
        names
    }

    fn system(&self) -> FeasibilitySystem {
        let sys = FeasibilitySystem::new(self.names());
        debug_assert_eq!(sys.delta(), self.delta());
        sys
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("witness {witness:?} for good {good} is not in its witness set")]
    UnknownWitness { good: usize, witness: Witness },
    #[error("witness tuple has {got} entries, expected {expected}")]
    TupleLength { got: usize, expected: usize },
}

struct CellContext<'a> {
    inst: &'a Instance,
    arr: &'a Arrangement,
    state: &'a CellState,
    cell: &'a CellDerivation,
    vars: VarCatalog,
}

impl CellContext<'_> {
    fn lambda(&self, good: usize) -> LinExpr {
        LinExpr::var(self.vars.lambda(good), Rat::one())
    }

    fn alpha(&self, buyer: usize) -> LinExpr {
        match &self.cell.alpha[buyer] {
            AlphaExpr::Unpaced => LinExpr::constant(Rat::one()),
            AlphaExpr::Ratio { good, value } => LinExpr::var(self.vars.lambda(*good), value.recip()),
        }
    }

    /// Paced bid `α_i(λ) v_ij`; the dummy always bids zero.
    fn bid(&self, who: Witness, good: usize) -> LinExpr {
        match who {
            Witness::Dummy => LinExpr::default(),
            Witness::Buyer(i) => self.alpha(i).scaled(self.inst.value(i, good)),
        }
    }

    /// Region bounds on every axis, plus `λ_j > 0`.
    fn cell_rows(&self, sys: &mut FeasibilitySystem) {
        let m = self.inst.m();
        for j in 0..m {
            let lam = self.lambda(j);
            bound_rows(sys, &lam, &LinExpr::constant(Rat::one()), &self.state.coordinate_region(self.arr, j));
        }
        for (p, axis) in self.arr.ratio_axes().iter().enumerate() {
            let (j, k) = axis.goods;
            bound_rows(sys, &self.lambda(j), &self.lambda(k), &self.state.ratio_region(self.arr, p));
        }
        for j in 0..m {
            sys.add(&self.lambda(j), SourceRelation::Gt, Block::Positivity);
        }
    }

    fn consistency_rows(&self, sys: &mut FeasibilitySystem) {
        let (n, m) = (self.inst.n(), self.inst.m());
        for i in 0..n {
            let alpha = self.alpha(i);
            if self.cell.is_paced(i) {
                sys.add(&alpha, SourceRelation::Gt, Block::Pacing);
                sys.add(&alpha.clone().minus(&LinExpr::constant(Rat::one())), SourceRelation::Lt, Block::Pacing);
            } else {
                sys.add(&alpha.clone().minus(&LinExpr::constant(Rat::one())), SourceRelation::Eq, Block::Pacing);
            }
        }
        for j in 0..m {
            for i in 0..n {
                let gap = self.lambda(j).minus(&self.bid(Witness::Buyer(i), j));
                sys.add(&gap, SourceRelation::Ge, Block::BidCap);
            }
            for &i in &self.cell.top[j] {
                let gap = self.lambda(j).minus(&self.bid(Witness::Buyer(i), j));
                sys.add(&gap, SourceRelation::Eq, Block::TopBid);
            }
        }
    }

    /// `bid(r) ≥ bid(i)` for every buyer other than the sole top bidder.
    fn dominance_rows(&self, sys: &mut FeasibilitySystem, good: usize, winner: usize, witness: Witness) {
        let witness_bid = self.bid(witness, good);
        for i in (0..self.inst.n()).filter(|&i| i != winner) {
            let gap = witness_bid.clone().minus(&self.bid(Witness::Buyer(i), good));
            sys.add(&gap, SourceRelation::Ge, Block::Witness);
        }
    }

    /// Payment sign and support rows, per-good totals equal to `price[j]`
    /// (or at most it, when `exact[j]` is false), and budget rows.
    fn payment_rows(&self, sys: &mut FeasibilitySystem, price: &[LinExpr], exact: &[bool]) {
        let (n, m) = (self.inst.n(), self.inst.m());
        for i in 0..n {
            for j in 0..m {
                let y = LinExpr::var(self.vars.pay(i, j), Rat::one());
                sys.add(&y, SourceRelation::Ge, Block::PaymentSign);
                if !self.cell.top[j].contains(&i) {
                    sys.add(&y, SourceRelation::Eq, Block::PaymentSupport);
                }
            }
        }
        for j in 0..m {
            let mut total = LinExpr::default();
            for &i in &self.cell.top[j] {
                total.add_term(self.vars.pay(i, j), Rat::one());
            }
            let rel = if exact[j] { SourceRelation::Eq } else { SourceRelation::Le };
            sys.add(&total.minus(&price[j]), rel, Block::PaymentTotal);
        }
        for i in 0..n {
            let mut spend = LinExpr::constant(-self.inst.budget(i).clone());
            for j in 0..m {
                spend.add_term(self.vars.pay(i, j), Rat::one());
            }
            let rel = if self.cell.is_paced(i) { SourceRelation::Eq } else { SourceRelation::Le };
            sys.add(&spend, rel, Block::Budget);
        }
    }
}

/// `upper / lower` lies in `region`, written as linear rows in both.
fn bound_rows(sys: &mut FeasibilitySystem, upper: &LinExpr, lower: &LinExpr, region: &Region) {
    match region {
        Region::Point(p) => {
            sys.add(&upper.clone().minus(&lower.scaled(p)), SourceRelation::Eq, Block::Cell);
        }
        Region::Open { lo, hi } => {
            if let Some(hi) = hi {
                sys.add(&upper.clone().minus(&lower.scaled(hi)), SourceRelation::Lt, Block::Cell);
            }
            if let Some(lo) = lo {
                sys.add(&upper.clone().minus(&lower.scaled(lo)), SourceRelation::Gt, Block::Cell);
            }
        }
    }
}

/// The full equilibrium system of a cell and witness tuple: cell rows,
/// consistency rows, witness rows for goods with a sole top bidder, payment
/// rows with the tuple's prices, and budget rows.
pub fn build_system(
    inst: &Instance,
    arr: &Arrangement,
    state: &CellState,
    cell: &CellDerivation,
    sets: &WitnessSets,
    tuple: &WitnessTuple,
) -> Result<FeasibilitySystem, BuildError> {
    let m = inst.m();
    if tuple.0.len() != m {
        return Err(BuildError::TupleLength {
            got: tuple.0.len(),
            expected: m,
        });
    }
    for (good, witness) in tuple.0.iter().enumerate() {
        if !sets.sets[good].contains(witness) {
            return Err(BuildError::UnknownWitness {
                good,
                witness: *witness,
            });
        }
    }
    let ctx = CellContext {
        inst,
        arr,
        state,
        cell,
        vars: VarCatalog::new(inst),
    };
    let mut sys = ctx.vars.system();
    ctx.cell_rows(&mut sys);
    ctx.consistency_rows(&mut sys);
    for j in 0..m {
        if let [winner] = cell.top[j][..] {
            ctx.dominance_rows(&mut sys, j, winner, tuple.0[j]);
        }
    }
    let price: Vec<LinExpr> = (0..m).map(|j| ctx.bid(tuple.0[j], j)).collect();
    ctx.payment_rows(&mut sys, &price, &vec![true; m]);
    Ok(sys)
}

/// Cell rows plus "`witness` outbids every buyer except `winner` on `good`".
/// Only the cell's strict rows carry `δ`.
pub fn build_witness_system(
    inst: &Instance,
    arr: &Arrangement,
    state: &CellState,
    cell: &CellDerivation,
    good: usize,
    winner: usize,
    witness: Witness,
) -> FeasibilitySystem {
    let ctx = CellContext {
        inst,
        arr,
        state,
        cell,
        vars: VarCatalog::new(inst),
    };
    let mut sys = ctx.vars.system();
    ctx.cell_rows(&mut sys);
    ctx.dominance_rows(&mut sys, good, winner, witness);
    sys
}

/// A relaxation of every [`build_system`] of the cell: prices are only known
/// to lie in `[0, λ_j]`, or to equal `λ_j` when the top bid is tied. If this
/// is infeasible, no witness tuple of the cell can succeed.
pub fn build_screen_system(
    inst: &Instance,
    arr: &Arrangement,
    state: &CellState,
    cell: &CellDerivation,
) -> FeasibilitySystem {
    let ctx = CellContext {
        inst,
        arr,
        state,
        cell,
        vars: VarCatalog::new(inst),
    };
    let mut sys = ctx.vars.system();
    ctx.cell_rows(&mut sys);
    ctx.consistency_rows(&mut sys);
    let m = inst.m();
    let price: Vec<LinExpr> = (0..m).map(|j| ctx.lambda(j)).collect();
    let exact: Vec<bool> = (0..m).map(|j| cell.top[j].len() >= 2).collect();
    ctx.payment_rows(&mut sys, &price, &exact);
    sys
}
