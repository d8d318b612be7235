//! Exact feasibility of linear systems with strict inequalities.
//!
//! A strict source row `a·z < b` is stored as `a·z + δ ≤ b`; the solver then
//! maximizes `δ` subject to `0 ≤ δ ≤ 1`. The strict system has a solution
//! iff the optimum is positive. All variables are non-negative.

mod simplex;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;
use simplex::{maximize, DenseRow, LpResult, RowKind};

pub use builder::{build_screen_system, build_system, build_witness_system, BuildError, VarCatalog};

mod builder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
}

/// Relation of a row before slack augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceRelation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl SourceRelation {
    pub fn is_strict(self) -> bool {
        matches!(self, SourceRelation::Lt | SourceRelation::Gt)
    }
}

/// Which part of the equilibrium system a row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    /// Region bounds of the cell.
    Cell,
    /// `λ_j > 0`.
    Positivity,
    /// `α_i = 1` or `0 < α_i < 1`.
    Pacing,
    /// `λ_j ≥ α_i v_ij`.
    BidCap,
    /// `λ_j = α_i v_ij` for top bidders.
    TopBid,
    /// The chosen second-price witness outbids every other loser.
    Witness,
    /// `y_ij ≥ 0`.
    PaymentSign,
    /// `y_ij = 0` off the top-bidder set.
    PaymentSupport,
    /// Payments on a good add up to its price.
    PaymentTotal,
    Budget,
    Slack,
    /// Rows of systems built outside the equilibrium pipeline.
    Other,
}

/// Affine expression `Σ coeff·var + constant`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinExpr {
    pub terms: BTreeMap<usize, Rat>,
    pub constant: Rat,
}

impl LinExpr {
    pub fn constant(value: Rat) -> Self {
        LinExpr {
            terms: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn var(index: usize, coeff: Rat) -> Self {
        let mut e = LinExpr::default();
        e.add_term(index, coeff);
        e
    }

    pub fn add_term(&mut self, index: usize, coeff: Rat) {
        let slot = self.terms.entry(index).or_insert_with(Rat::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&index);
        }
    }

    pub fn plus(mut self, other: &LinExpr) -> Self {
        for (&v, c) in &other.terms {
            self.add_term(v, c.clone());
        }
        self.constant += &other.constant;
        self
    }

    pub fn minus(self, other: &LinExpr) -> Self {
        self.plus(&other.scaled(&-Rat::one()))
    }

    pub fn scaled(&self, factor: &Rat) -> Self {
        if factor.is_zero() {
            return LinExpr::default();
        }
        LinExpr {
            terms: self.terms.iter().map(|(&v, c)| (v, c * factor)).collect(),
            constant: &self.constant * factor,
        }
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        self.terms
            .iter()
            .fold(self.constant.clone(), |acc, (&v, c)| acc + c * &point[v])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<(usize, Rat)>,
    pub relation: Relation,
    pub rhs: Rat,
    pub origin: Block,
    /// Source row was strict; its slack coefficient is included in `coeffs`.
    pub strict: bool,
}

impl LinearConstraint {
    pub fn lhs(&self, point: &[Rat]) -> Rat {
        self.coeffs.iter().map(|(v, c)| c * &point[*v]).sum()
    }

    pub fn holds(&self, point: &[Rat]) -> bool {
        let lhs = self.lhs(point);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Variables (the last one is `δ`), slack-augmented rows, objective `max δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilitySystem {
    names: Vec<String>,
    constraints: Vec<LinearConstraint>,
}

impl FeasibilitySystem {
    /// A system over the given variable names plus `delta`, already holding
    /// `0 ≤ δ ≤ 1`.
    pub fn new(names: Vec<String>) -> Self {
        let mut names = names;
        names.push("delta".into());
        let delta = names.len() - 1;
        let mut sys = FeasibilitySystem {
            names,
            constraints: Vec::new(),
        };
        sys.push_row(vec![(delta, Rat::one())], Relation::Le, Rat::one(), Block::Slack, false);
        sys.push_row(vec![(delta, -Rat::one())], Relation::Le, Rat::zero(), Block::Slack, false);
        sys
    }

    pub fn delta(&self) -> usize {
        self.names.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    fn push_row(&mut self, coeffs: Vec<(usize, Rat)>, relation: Relation, rhs: Rat, origin: Block, strict: bool) {
        self.constraints.push(LinearConstraint {
            coeffs,
            relation,
            rhs,
            origin,
            strict,
        });
    }

    /// Adds `expr (rel) 0`. Strict rows get `+δ` on the small side; rows
    /// that reduce to a true constant comparison are dropped, false ones are
    /// kept as `0 (rel) rhs` so the system stays infeasible.
    pub fn add(&mut self, expr: &LinExpr, rel: SourceRelation, origin: Block) {
        let (expr, rel) = match rel {
            SourceRelation::Ge => (expr.scaled(&-Rat::one()), SourceRelation::Le),
            SourceRelation::Gt => (expr.scaled(&-Rat::one()), SourceRelation::Lt),
            other => (expr.clone(), other),
        };
        let rhs = -expr.constant.clone();
        let mut coeffs: Vec<(usize, Rat)> = expr.terms.into_iter().collect();
        let strict = rel == SourceRelation::Lt;
        if coeffs.is_empty() {
            let holds = match rel {
                SourceRelation::Lt => rhs.is_positive(),
                SourceRelation::Le => !rhs.is_negative(),
                _ => rhs.is_zero(),
            };
            if holds {
                return;
            }
        }
        if strict {
            coeffs.push((self.delta(), Rat::one()));
        }
        let relation = if rel == SourceRelation::Eq { Relation::Eq } else { Relation::Le };
        self.push_row(coeffs, relation, rhs, origin, strict);
    }

    /// Checks every stored row at `point` (which includes `δ`).
    pub fn satisfied_by(&self, point: &[Rat]) -> bool {
        point.len() == self.num_vars()
            && point.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.holds(point))
    }
}

impl fmt::Display for FeasibilitySystem {
    /// LP-text dump, one constraint per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "maximize: delta;")?;
        for (k, c) in self.constraints.iter().enumerate() {
            write!(f, "c{k}:")?;
            if c.coeffs.is_empty() {
                write!(f, " 0")?;
            }
            for (idx, (v, a)) in c.coeffs.iter().enumerate() {
                let sign = match (idx, a.is_negative()) {
                    (0, false) => " ",
                    (0, true) => " -",
                    (_, false) => " + ",
                    (_, true) => " - ",
                };
                let mag = a.abs();
                if mag.is_one() {
                    write!(f, "{sign}{}", self.names[*v])?;
                } else {
                    write!(f, "{sign}{mag} {}", self.names[*v])?;
                }
            }
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
            };
            writeln!(f, " {rel} {}; # {:?}", c.rhs, c.origin)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityOutcome {
    pub status: Status,
    /// Values of all variables, `δ` last; present iff feasible.
    pub point: Option<Vec<Rat>>,
    /// Optimal slack; `None` if even the non-strict closure is infeasible.
    pub delta: Option<Rat>,
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }

    fn infeasible(delta: Option<Rat>) -> Self {
        FeasibilityOutcome {
            status: Status::Infeasible,
            point: None,
            delta,
        }
    }
}

/// Maximizes `δ` exactly. Feasible iff `δ* > 0`.
pub fn solve_feasibility(sys: &FeasibilitySystem) -> FeasibilityOutcome {
    let nv = sys.num_vars();
    let delta = sys.delta();

    // variables pinned to zero by `a·x = 0` singleton rows
    let mut fixed = vec![false; nv];
    for c in &sys.constraints {
        if c.relation == Relation::Eq && c.coeffs.len() == 1 && c.rhs.is_zero() {
            fixed[c.coeffs[0].0] = true;
        }
    }
    if fixed[delta] {
        return FeasibilityOutcome::infeasible(Some(Rat::zero()));
    }
    let mut column = vec![usize::MAX; nv];
    let mut free_vars = Vec::new();
    for v in 0..nv {
        if !fixed[v] {
            column[v] = free_vars.len();
            free_vars.push(v);
        }
    }

    let mut kept: Vec<ReducedRow> = Vec::new();
    let mut parallel: HashMap<Vec<(usize, Rat)>, Vec<usize>> = HashMap::new();
    for c in &sys.constraints {
        let coeffs: Vec<(usize, Rat)> = c
            .coeffs
            .iter()
            .filter(|(v, a)| !fixed[*v] && !a.is_zero())
            .map(|(v, a)| (column[*v], a.clone()))
            .collect();
        if coeffs.is_empty() {
            let ok = match c.relation {
                Relation::Le => !c.rhs.is_negative(),
                Relation::Eq => c.rhs.is_zero(),
            };
            if !ok {
                return FeasibilityOutcome::infeasible(None);
            }
            continue;
        }
        // all-negative coefficients with rhs ≥ 0 are implied by x ≥ 0
        if c.relation == Relation::Le && coeffs.iter().all(|(_, a)| a.is_negative()) && !c.rhs.is_negative() {
            continue;
        }
        let row = ReducedRow::normalized(coeffs, c.relation, &c.rhs, column[delta]);
        let key = row.key();
        let group = parallel.entry(key).or_default();
        if group.iter().any(|&k| kept[k].dominates(&row)) {
            continue;
        }
        group.retain(|&k| !row.dominates(&kept[k]));
        group.push(kept.len());
        kept.push(row);
    }
    let live: Vec<usize> = {
        let mut ids: Vec<usize> = parallel.into_values().flatten().collect();
        ids.sort_unstable();
        ids
    };

    let width = free_vars.len();
    let rows: Vec<DenseRow> = live
        .iter()
        .map(|&k| {
            let r = &kept[k];
            let mut coeffs = vec![Rat::zero(); width];
            for (v, a) in &r.other {
                coeffs[*v] = a.clone();
            }
            if let Some(d) = &r.delta_coeff {
                coeffs[column[delta]] = d.clone();
            }
            DenseRow {
                coeffs,
                kind: match r.relation {
                    Relation::Le => RowKind::Le,
                    Relation::Eq => RowKind::Eq,
                },
                rhs: r.rhs.clone(),
            }
        })
        .collect();
    let mut objective = vec![Rat::zero(); width];
    objective[column[delta]] = Rat::one();

    match maximize(width, &objective, &rows) {
        LpResult::Infeasible => FeasibilityOutcome::infeasible(None),
        LpResult::Unbounded => unreachable!("δ ≤ 1 bounds the objective"),
        LpResult::Optimal { x, value } => {
            if !value.is_positive() {
                return FeasibilityOutcome::infeasible(Some(value));
            }
            let mut point = vec![Rat::zero(); nv];
            for (col, &v) in free_vars.iter().enumerate() {
                point[v] = x[col].clone();
            }
            debug_assert!(sys.satisfied_by(&point), "simplex point violates the system");
            FeasibilityOutcome {
                status: Status::Feasible,
                point: Some(point),
                delta: Some(value),
            }
        }
    }
}

/// A presolved row, scaled so its first non-`δ` coefficient has magnitude 1.
struct ReducedRow {
    other: Vec<(usize, Rat)>,
    delta_coeff: Option<Rat>,
    relation: Relation,
    rhs: Rat,
}

impl ReducedRow {
    fn normalized(coeffs: Vec<(usize, Rat)>, relation: Relation, rhs: &Rat, delta_col: usize) -> Self {
        let (d, other): (Vec<_>, Vec<_>) = coeffs.into_iter().partition(|(v, _)| *v == delta_col);
        let mut delta_coeff = d.into_iter().next().map(|(_, a)| a);
        let mut other = other;
        other.sort_by_key(|(v, _)| *v);
        let mut rhs = rhs.clone();
        let lead = other.first().map(|(_, a)| a.abs());
        if let Some(lead) = lead {
            let mut scale = lead.recip();
            // equalities are also sign-normalized so duplicates share a key
            if relation == Relation::Eq && other[0].1.is_negative() {
                scale = -scale;
            }
            for (_, a) in other.iter_mut() {
                *a *= &scale;
            }
            if let Some(d) = delta_coeff.as_mut() {
                *d *= &scale;
            }
            rhs *= &scale;
        }
        ReducedRow {
            other,
            delta_coeff,
            relation,
            rhs,
        }
    }

    fn key(&self) -> Vec<(usize, Rat)> {
        self.other.clone()
    }

    fn delta(&self) -> Rat {
        self.delta_coeff.clone().unwrap_or_else(Rat::zero)
    }

    /// `self` implies `other` for every point with `δ ≥ 0` (same key assumed).
    fn dominates(&self, other: &ReducedRow) -> bool {
        match (self.relation, other.relation) {
            (Relation::Le, Relation::Le) => self.delta() >= other.delta() && self.rhs <= other.rhs,
            (Relation::Eq, Relation::Eq) => self.delta() == other.delta() && self.rhs == other.rhs,
            _ => false,
        }
    }
}
