//! Exact checking of the equilibrium conditions, independent of the solver.
//!
//! Highest bids and prices are recomputed from `α` alone. The second price
//! of a good with a single bidder is 0, as if a dummy bidder always bid 0.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::instance::Instance;
use crate::rat::{rat_to_json, Rat};

/// The checked conditions, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// Shapes and ranges of `α` and `x`.
    Bounds,
    /// Allocated goods go to highest bidders.
    A,
    /// Goods with a positive bid are fully allocated.
    B,
    /// Nobody overspends.
    C,
    /// Whoever underspends is not paced.
    D,
}

impl Condition {
    pub const ALL: [Condition; 5] = [Condition::Bounds, Condition::A, Condition::B, Condition::C, Condition::D];

    pub fn label(self) -> &'static str {
        match self {
            Condition::Bounds => "bounds",
            Condition::A => "a",
            Condition::B => "b",
            Condition::C => "c",
            Condition::D => "d",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub buyer: Option<usize>,
    pub good: Option<usize>,
    pub detail: String,
}

impl Violation {
    fn to_json(&self) -> Value {
        json!({ "buyer": self.buyer, "good": self.good, "detail": self.detail })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConditionResult {
    /// First violation in buyer-major, then good order.
    pub first_violation: Option<Violation>,
    pub violations: usize,
}

impl ConditionResult {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, buyer: Option<usize>, good: Option<usize>, detail: String) {
        if self.first_violation.is_none() {
            self.first_violation = Some(Violation { buyer, good, detail });
        }
        self.violations += 1;
    }

    fn to_json(&self) -> Value {
        json!({
            "holds": self.holds(),
            "violations": self.violations,
            "first_violation": self.first_violation.as_ref().map(Violation::to_json),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub pass: bool,
    pub bounds: ConditionResult,
    pub a: ConditionResult,
    pub b: ConditionResult,
    pub c: ConditionResult,
    pub d: ConditionResult,
    /// `h_j`: highest paced bid per good.
    pub highest_bid: Vec<Rat>,
    /// `p_j`: second-highest paced bid, `h_j` on ties.
    pub price: Vec<Rat>,
    pub spend: Vec<Rat>,
}

impl VerificationReport {
    pub fn result(&self, condition: Condition) -> &ConditionResult {
        match condition {
            Condition::Bounds => &self.bounds,
            Condition::A => &self.a,
            Condition::B => &self.b,
            Condition::C => &self.c,
            Condition::D => &self.d,
        }
    }

    /// The first failing condition in report order.
    pub fn first_failure(&self) -> Option<Condition> {
        Condition::ALL.into_iter().find(|&c| !self.result(c).holds())
    }

    pub fn to_json(&self) -> Value {
        let vec = |v: &[Rat]| Value::Array(v.iter().map(rat_to_json).collect());
        let mut conditions = serde_json::Map::new();
        for c in Condition::ALL {
            conditions.insert(c.label().into(), self.result(c).to_json());
        }
        json!({
            "pass": self.pass,
            "first_failure": self.first_failure().map(Condition::label),
            "conditions": conditions,
            "highest_bid": vec(&self.highest_bid),
            "price": vec(&self.price),
            "spend": vec(&self.spend),
            "single_bidder_price": "zero",
        })
    }
}

/// `h_j`, `p_j` for every good under `alpha`.
fn bids_and_prices(inst: &Instance, alpha: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut highest = Vec::with_capacity(inst.m());
    let mut price = Vec::with_capacity(inst.m());
    for j in 0..inst.m() {
        let bids: Vec<Rat> = (0..inst.n()).map(|i| &alpha[i] * inst.value(i, j)).collect();
        let h = bids.iter().max().cloned().unwrap_or_else(Rat::zero);
        let winners = bids.iter().filter(|&b| *b == h).count();
        let p = if winners >= 2 {
            h.clone()
        } else {
            bids.iter().filter(|&b| *b != h).max().cloned().unwrap_or_else(Rat::zero)
        };
        highest.push(h);
        price.push(p);
    }
    (highest, price)
}

/// Checks every equilibrium condition exactly. Shape errors are reported
/// under [`Condition::Bounds`] and leave the other conditions unchecked.
pub fn verify_equilibrium(inst: &Instance, alpha: &[Rat], x: &[Vec<Rat>]) -> VerificationReport {
    let (n, m) = (inst.n(), inst.m());
    let mut report = VerificationReport {
        pass: false,
        bounds: ConditionResult::default(),
        a: ConditionResult::default(),
        b: ConditionResult::default(),
        c: ConditionResult::default(),
        d: ConditionResult::default(),
        highest_bid: Vec::new(),
        price: Vec::new(),
        spend: Vec::new(),
    };
    if alpha.len() != n {
        report.bounds.record(None, None, format!("alpha has {} entries, expected {n}", alpha.len()));
    }
    if x.len() != n || x.iter().any(|row| row.len() != m) {
        report.bounds.record(None, None, format!("x must be {n} rows of {m} entries"));
    }
    if !report.bounds.holds() {
        return report;
    }

    let unit = Rat::zero()..=Rat::one();
    for (i, a) in alpha.iter().enumerate() {
        if !unit.contains(a) {
            report.bounds.record(Some(i), None, format!("alpha = {a} outside [0, 1]"));
        }
    }
    for i in 0..n {
        for j in 0..m {
            if !unit.contains(&x[i][j]) {
                report.bounds.record(Some(i), Some(j), format!("x = {} outside [0, 1]", x[i][j]));
            }
        }
    }
    let allocated: Vec<Rat> = (0..m).map(|j| (0..n).map(|i| &x[i][j]).sum()).collect();
    for (j, total) in allocated.iter().enumerate() {
        if total > &Rat::one() {
            report.bounds.record(None, Some(j), format!("allocations sum to {total} > 1"));
        }
    }

    let (highest, price) = bids_and_prices(inst, alpha);
    for i in 0..n {
        for j in 0..m {
            let bid = &alpha[i] * inst.value(i, j);
            if x[i][j].is_positive() && bid != highest[j] {
                report.a.record(
                    Some(i),
                    Some(j),
                    format!("x = {} but bid {bid} is below the highest bid {}", x[i][j], highest[j]),
                );
            }
        }
    }
    for j in 0..m {
        if highest[j].is_positive() && !allocated[j].is_one() {
            report.b.record(
                None,
                Some(j),
                format!("highest bid {} > 0 but allocations sum to {}", highest[j], allocated[j]),
            );
        }
    }
    let spend: Vec<Rat> = (0..n)
        .map(|i| (0..m).map(|j| &x[i][j] * &price[j]).sum())
        .collect();
    for i in 0..n {
        let budget = inst.budget(i);
        if &spend[i] > budget {
            report.c.record(Some(i), None, format!("spend {} exceeds budget {budget}", spend[i]));
        }
        if &spend[i] < budget && !alpha[i].is_one() {
            report.d.record(
                Some(i),
                None,
                format!("spend {} below budget {budget} with alpha = {}", spend[i], alpha[i]),
            );
        }
    }

    report.highest_bid = highest;
    report.price = price;
    report.spend = spend;
    report.pass = Condition::ALL.iter().all(|&c| report.result(c).holds());
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("grid oracle handles at most 3 buyers and 2 goods, got {n} and {m}")]
    InstanceTooLarge { n: usize, m: usize },
    #[error("resolution must be positive")]
    ZeroResolution,
}

/// A grid point together with an allocation that satisfies every condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub alpha: Vec<Rat>,
    pub x: Vec<Vec<Rat>>,
}

/// Scans `α ∈ {k / resolution}^n` and, for each grid point, the allocations
/// giving each good wholly to one of its highest bidders (plus, with one
/// good and a tie, the split in which paced bidders exhaust their budgets).
/// Returns the pairs that pass [`verify_equilibrium`].
pub fn grid_oracle(inst: &Instance, resolution: u32) -> Result<Vec<Candidate>, OracleError> {
    let (n, m) = (inst.n(), inst.m());
    if n > 3 || m > 2 {
        return Err(OracleError::InstanceTooLarge { n, m });
    }
    if resolution == 0 {
        return Err(OracleError::ZeroResolution);
    }
    let steps = resolution as usize + 1;
    let total = steps.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let alpha: Vec<Rat> = (0..n)
            .map(|i| {
                let k = (code / steps.pow((n - 1 - i) as u32)) % steps;
                Rat::new(k.into(), resolution.into())
            })
            .collect();
        let (highest, price) = bids_and_prices(inst, &alpha);
        let options: Vec<Vec<Vec<Rat>>> = (0..m)
            .map(|j| good_options(inst, &alpha, j, &highest[j], &price[j]))
            .collect();
        // every combination of one option per good
        let mut columns: Vec<Vec<&Vec<Rat>>> = vec![Vec::new()];
        for opts in &options {
            columns = columns
                .into_iter()
                .flat_map(|prefix| {
                    opts.iter().map(move |o| {
                        let mut next = prefix.clone();
                        next.push(o);
                        next
                    })
                })
                .collect();
        }
        for cols in columns {
            let x: Vec<Vec<Rat>> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
            if verify_equilibrium(inst, &alpha, &x).pass {
                out.push(Candidate { alpha: alpha.clone(), x });
            }
        }
    }
    Ok(out)
}

/// Candidate columns of `x` for one good.
fn good_options(inst: &Instance, alpha: &[Rat], j: usize, highest: &Rat, price: &Rat) -> Vec<Vec<Rat>> {
    let n = inst.n();
    if highest.is_zero() {
        return vec![vec![Rat::zero(); n]];
    }
    let winners: Vec<usize> = (0..n).filter(|&i| &(&alpha[i] * inst.value(i, j)) == highest).collect();
    let mut options: Vec<Vec<Rat>> = winners
        .iter()
        .map(|&w| (0..n).map(|i| if i == w { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    if inst.m() == 1 && winners.len() >= 2 && price.is_positive() {
        // paced winners take exactly their budget; one unpaced winner takes the rest
        let paced: Vec<usize> = winners.iter().copied().filter(|&i| !alpha[i].is_one()).collect();
        let unpaced: Vec<usize> = winners.iter().copied().filter(|&i| alpha[i].is_one()).collect();
        let mut split = vec![Rat::zero(); n];
        for &i in &paced {
            split[i] = inst.budget(i) / price;
        }
        let used: Rat = split.iter().sum();
        if let Some(&u) = unpaced.first() {
            split[u] = Rat::one() - &used;
        }
        options.push(split);
    }
    options
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{frac, int};

    fn tie_instance() -> Instance {
        Instance::new(vec![vec![int(2)], vec![int(1)]], vec![frac(1, 2), int(10)]).unwrap()
    }

    #[test]
    fn tie_equilibrium_passes() {
        let r = verify_equilibrium(&tie_instance(), &[frac(1, 2), int(1)], &[vec![frac(1, 2)], vec![frac(1, 2)]]);
        assert!(r.pass, "{:?}", r);
        assert_eq!(r.highest_bid, vec![int(1)]);
        assert_eq!(r.price, vec![int(1)]);
        assert_eq!(r.spend, vec![frac(1, 2), frac(1, 2)]);
    }

    #[test]
    fn overspending_fails_c() {
        let r = verify_equilibrium(&tie_instance(), &[int(1), int(1)], &[vec![int(1)], vec![int(0)]]);
        assert!(!r.pass);
        assert_eq!(r.first_failure(), Some(Condition::C));
        assert_eq!(r.c.first_violation.as_ref().unwrap().buyer, Some(0));
        assert_eq!(r.spend[0], int(1));
    }

    #[test]
    fn tie_with_whole_good_to_paced_buyer_flags_c_first() {
        let r = verify_equilibrium(&tie_instance(), &[frac(1, 2), int(1)], &[vec![int(1)], vec![int(0)]]);
        assert_eq!(r.first_failure(), Some(Condition::C));
        assert!(r.a.holds());
        assert!(r.d.holds());
    }

    #[test]
    fn single_bidder_price_is_zero() {
        let inst = Instance::new(vec![vec![int(2)]], vec![int(1)]).unwrap();
        let r = verify_equilibrium(&inst, &[int(1)], &[vec![int(1)]]);
        assert!(r.pass);
        assert_eq!(r.price, vec![int(0)]);
        let r = verify_equilibrium(&inst, &[frac(1, 2)], &[vec![int(1)]]);
        assert_eq!(r.first_failure(), Some(Condition::D));
    }

    #[test]
    fn split_with_unique_winner_fails_a() {
        let inst = Instance::new(vec![vec![int(2)], vec![int(1)]], vec![int(10), int(10)]).unwrap();
        let r = verify_equilibrium(&inst, &[int(1), int(1)], &[vec![frac(1, 2)], vec![frac(1, 2)]]);
        assert_eq!(r.first_failure(), Some(Condition::A));
        assert_eq!(r.a.first_violation.as_ref().unwrap().buyer, Some(1));
    }

    #[test]
    fn bounds_reported() {
        let inst = tie_instance();
        let r = verify_equilibrium(&inst, &[int(1), int(1)], &[vec![frac(3, 4)], vec![frac(3, 4)]]);
        assert_eq!(r.first_failure(), Some(Condition::Bounds));
        let r = verify_equilibrium(&inst, &[int(1)], &[vec![int(1)], vec![int(0)]]);
        assert_eq!(r.first_failure(), Some(Condition::Bounds));
        assert!(r.price.is_empty());
    }

    #[test]
    fn oracle_single_buyer() {
        let inst = Instance::new(vec![vec![int(2)]], vec![int(1)]).unwrap();
        let cands = grid_oracle(&inst, 4).unwrap();
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].alpha, vec![int(1)]);
    }

    #[test]
    fn oracle_depends_on_resolution() {
        let inst = tie_instance();
        let paced = vec![frac(1, 2), int(1)];
        assert!(grid_oracle(&inst, 2).unwrap().iter().any(|c| c.alpha == paced));
        assert!(grid_oracle(&inst, 1).unwrap().iter().all(|c| c.alpha != paced));
    }

    #[test]
    fn oracle_size_guard() {
        let inst = Instance::new(vec![vec![int(1); 3]], vec![int(1)]).unwrap();
        assert_eq!(grid_oracle(&inst, 2).unwrap_err(), OracleError::InstanceTooLarge { n: 1, m: 3 });
    }
}
