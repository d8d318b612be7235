//! Second-price pacing games: validation, zero-value good removal, and
//! aggregation of goods that share a valuation column.

use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::equilibrium::Equilibrium;
use crate::rat::{rat_from_json, rat_to_json, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("buyer {buyer} has non-positive budget {budget}")]
    NonPositiveBudget { buyer: usize, budget: Rat },
    #[error("buyer {buyer} has negative valuation {value} for good {good}")]
    NegativeValuation { buyer: usize, good: usize, value: Rat },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("malformed instance: {0}")]
    Parse(String),
}

/// Unchecked input, as read from a file or built by hand.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub n: usize,
    pub m: usize,
    pub valuations: Vec<Vec<Rat>>,
    pub budgets: Vec<Rat>,
}

/// A validated game: `n >= 1` buyers, `m` goods, non-negative valuations and
/// strictly positive budgets. Buyers and goods are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    goods: usize,
    valuations: Vec<Vec<Rat>>,
    budgets: Vec<Rat>,
}

impl Instance {
    pub fn new(valuations: Vec<Vec<Rat>>, budgets: Vec<Rat>) -> Result<Self, InstanceError> {
        let n = budgets.len();
        let m = valuations.first().map_or(0, Vec::len);
        validate_instance(RawInstance {
            n,
            m,
            valuations,
            budgets,
        })
    }

    pub fn n(&self) -> usize {
        self.budgets.len()
    }

    pub fn m(&self) -> usize {
        self.goods
    }

    pub fn value(&self, buyer: usize, good: usize) -> &Rat {
        &self.valuations[buyer][good]
    }

    pub fn valuations(&self) -> &[Vec<Rat>] {
        &self.valuations
    }

    pub fn budget(&self, buyer: usize) -> &Rat {
        &self.budgets[buyer]
    }

    pub fn budgets(&self) -> &[Rat] {
        &self.budgets
    }

    pub fn column(&self, good: usize) -> Vec<Rat> {
        self.valuations.iter().map(|row| row[good].clone()).collect()
    }

    pub fn from_json(value: &Value) -> Result<Self, InstanceError> {
        let field = |name: &str| {
            value
                .get(name)
                .ok_or_else(|| InstanceError::Parse(format!("missing field {name:?}")))
        };
        let count = |name: &str| {
            field(name)?
                .as_u64()
                .map(|v| v as usize)
                .ok_or_else(|| InstanceError::Parse(format!("{name:?} must be a non-negative integer")))
        };
        let rats = |v: &Value, what: &str| -> Result<Vec<Rat>, InstanceError> {
            v.as_array()
                .ok_or_else(|| InstanceError::Parse(format!("{what} must be an array")))?
                .iter()
                .map(|x| rat_from_json(x).map_err(|e| InstanceError::Parse(e.to_string())))
                .collect()
        };
        let n = count("n")?;
        let m = count("m")?;
        let valuations = field("valuations")?
            .as_array()
            .ok_or_else(|| InstanceError::Parse("\"valuations\" must be an array".into()))?
            .iter()
            .map(|row| rats(row, "valuation row"))
            .collect::<Result<Vec<_>, _>>()?;
        let budgets = rats(field("budgets")?, "\"budgets\"")?;
        validate_instance(RawInstance {
            n,
            m,
            valuations,
            budgets,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n(),
            "m": self.m(),
            "valuations": self.valuations.iter()
                .map(|row| row.iter().map(rat_to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "budgets": self.budgets.iter().map(rat_to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn validate_instance(raw: RawInstance) -> Result<Instance, InstanceError> {
    if raw.n == 0 {
        return Err(InstanceError::ShapeMismatch("instance has no buyers".into()));
    }
    if raw.budgets.len() != raw.n {
        return Err(InstanceError::ShapeMismatch(format!(
            "n = {} but {} budgets given",
            raw.n,
            raw.budgets.len()
        )));
    }
    if raw.valuations.len() != raw.n {
        return Err(InstanceError::ShapeMismatch(format!(
            "n = {} but {} valuation rows given",
            raw.n,
            raw.valuations.len()
        )));
    }
    if let Some((buyer, row)) = raw.valuations.iter().enumerate().find(|(_, r)| r.len() != raw.m) {
        return Err(InstanceError::ShapeMismatch(format!(
            "m = {} but buyer {buyer} has {} valuations",
            raw.m,
            row.len()
        )));
    }
    for (buyer, budget) in raw.budgets.iter().enumerate() {
        if !budget.is_positive() {
            return Err(InstanceError::NonPositiveBudget {
                buyer,
                budget: budget.clone(),
            });
        }
    }
    for (buyer, row) in raw.valuations.iter().enumerate() {
        for (good, value) in row.iter().enumerate() {
            if value.is_negative() {
                return Err(InstanceError::NegativeValuation {
                    buyer,
                    good,
                    value: value.clone(),
                });
            }
        }
    }
    Ok(Instance {
        goods: raw.m,
        valuations: raw.valuations,
        budgets: raw.budgets,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessReport {
    pub reduced: Instance,
    /// Original indices of goods nobody values.
    pub removed_goods: Vec<usize>,
    /// `good_index_map[k]` is the original index of reduced good `k`.
    pub good_index_map: Vec<usize>,
    original_goods: usize,
}

impl PreprocessReport {
    pub fn original_goods(&self) -> usize {
        self.original_goods
    }

    /// Lifts an equilibrium of the reduced instance back to the original
    /// goods. Removed goods get no allocation, price zero and bid level zero.
    pub fn reinsert(&self, reduced: Equilibrium) -> Equilibrium {
        let n = reduced.alpha.len();
        let m = self.original_goods;
        let mut eq = Equilibrium::zeroed(n, m);
        eq.alpha = reduced.alpha;
        for (k, &j) in self.good_index_map.iter().enumerate() {
            eq.prices[j] = reduced.prices[k].clone();
            eq.lambda[j] = reduced.lambda[k].clone();
            for i in 0..n {
                eq.x[i][j] = reduced.x[i][k].clone();
                eq.payments[i][j] = reduced.payments[i][k].clone();
            }
        }
        eq.provenance = reduced.provenance;
        eq.zero_value_goods = self.removed_goods.clone();
        eq
    }
}

/// Drops every good whose valuation column is identically zero.
pub fn preprocess(inst: &Instance) -> PreprocessReport {
    let (kept, removed): (Vec<usize>, Vec<usize>) = (0..inst.m())
        .partition(|&j| inst.valuations.iter().any(|row| !row[j].is_zero()));
    let valuations = inst
        .valuations
        .iter()
        .map(|row| kept.iter().map(|&j| row[j].clone()).collect())
        .collect();
    PreprocessReport {
        reduced: Instance {
            goods: kept.len(),
            valuations,
            budgets: inst.budgets.clone(),
        },
        removed_goods: removed,
        good_index_map: kept,
        original_goods: inst.m(),
    }
}

/// Goods grouped by identical valuation columns. Type order follows the
/// first occurrence of each column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypePartition {
    pub types: Vec<Vec<usize>>,
    pub aggregated: Instance,
    original_goods: usize,
}

impl TypePartition {
    /// The goods of type `tau` (the expansion map).
    pub fn members(&self, tau: usize) -> &[usize] {
        &self.types[tau]
    }

    pub fn original_goods(&self) -> usize {
        self.original_goods
    }

    pub fn to_json(&self) -> Value {
        json!({
            "types": self.types,
            "aggregated": self.aggregated.to_json(),
        })
    }
}

pub fn partition_good_types(inst: &Instance) -> TypePartition {
    let mut columns: Vec<Vec<Rat>> = Vec::new();
    let mut types: Vec<Vec<usize>> = Vec::new();
    for j in 0..inst.m() {
        let column = inst.column(j);
        match columns.iter().position(|c| *c == column) {
            Some(tau) => types[tau].push(j),
            None => {
                columns.push(column);
                types.push(vec![j]);
            }
        }
    }
    let valuations = (0..inst.n())
        .map(|i| {
            types
                .iter()
                .map(|members| members.iter().map(|&j| inst.valuations[i][j].clone()).sum())
                .collect()
        })
        .collect();
    TypePartition {
        aggregated: Instance {
            goods: types.len(),
            valuations,
            budgets: inst.budgets.clone(),
        },
        types,
        original_goods: inst.m(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dimension mismatch: {0}")]
pub struct DimensionMismatch(pub String);

/// Copies each aggregate good's allocation onto every member good. Bid
/// levels, prices and payments are divided by the type size, so per-buyer
/// totals are unchanged.
pub fn expand_equilibrium(
    part: &TypePartition,
    agg: &Equilibrium,
) -> Result<Equilibrium, DimensionMismatch> {
    let n = part.aggregated.n();
    let k = part.types.len();
    let shape_ok = agg.alpha.len() == n
        && agg.prices.len() == k
        && agg.lambda.len() == k
        && agg.x.len() == n
        && agg.payments.len() == n
        && agg.x.iter().chain(&agg.payments).all(|row| row.len() == k);
    if !shape_ok {
        return Err(DimensionMismatch(format!(
            "equilibrium does not match an aggregated instance with {n} buyers and {k} types"
        )));
    }
    let mut eq = Equilibrium::zeroed(n, part.original_goods);
    eq.alpha = agg.alpha.clone();
    for (tau, members) in part.types.iter().enumerate() {
        let size = Rat::from_integer(members.len().into());
        for &j in members {
            eq.prices[j] = &agg.prices[tau] / &size;
            eq.lambda[j] = &agg.lambda[tau] / &size;
            for i in 0..n {
                eq.x[i][j] = agg.x[i][tau].clone();
                eq.payments[i][j] = &agg.payments[i][tau] / &size;
            }
        }
    }
    eq.zero_value_goods = agg
        .zero_value_goods
        .iter()
        .flat_map(|&tau| part.types[tau].iter().copied())
        .collect();
    eq.zero_value_goods.sort_unstable();
    eq.provenance = agg.provenance.clone();
    Ok(eq)
}
