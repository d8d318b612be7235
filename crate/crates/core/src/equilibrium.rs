use serde_json::{json, Map, Value};

use crate::rat::{rat_from_json, rat_to_json, zero, Rat};

/// Whose paced bid sets a good's price. `Dummy` stands for the always-zero
/// bid, i.e. a price of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Witness {
    Dummy,
    Buyer(usize),
}

impl Witness {
    pub fn to_json(self) -> Value {
        match self {
            Witness::Dummy => Value::Null,
            Witness::Buyer(i) => json!(i),
        }
    }
}

/// Which enumeration step produced an equilibrium.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// Position of the cell in the canonical state order.
    pub state_index: u64,
    pub coordinate_regions: Vec<usize>,
    pub ratio_regions: Vec<usize>,
    pub witnesses: Vec<Witness>,
    /// Optimal strictness slack of the winning system.
    pub delta: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equilibrium {
    pub alpha: Vec<Rat>,
    /// `x[i][j]`: fraction of good `j` allocated to buyer `i`.
    pub x: Vec<Vec<Rat>>,
    pub prices: Vec<Rat>,
    /// `payments[i][j] = x[i][j] * prices[j]`.
    pub payments: Vec<Vec<Rat>>,
    /// Highest paced bid on each good.
    pub lambda: Vec<Rat>,
    pub provenance: Option<Provenance>,
    /// Goods nobody values; reported with zero allocation and zero price.
    pub zero_value_goods: Vec<usize>,
}

impl Equilibrium {
    pub fn zeroed(n: usize, m: usize) -> Self {
        Equilibrium {
            alpha: vec![zero(); n],
            x: vec![vec![zero(); m]; n],
            prices: vec![zero(); m],
            payments: vec![vec![zero(); m]; n],
            lambda: vec![zero(); m],
            provenance: None,
            zero_value_goods: Vec::new(),
        }
    }

    pub fn spend(&self, buyer: usize) -> Rat {
        self.payments[buyer].iter().sum()
    }

    /// JSON with every rational as a `"p/q"` string. Key order is fixed, so
    /// equal equilibria serialize to identical bytes.
    pub fn to_json(&self) -> Value {
        let vec = |v: &[Rat]| Value::Array(v.iter().map(rat_to_json).collect());
        let mat = |m: &[Vec<Rat>]| Value::Array(m.iter().map(|r| vec(r)).collect());
        let mut out = Map::new();
        out.insert("alpha".into(), vec(&self.alpha));
        out.insert("x".into(), mat(&self.x));
        out.insert("prices".into(), vec(&self.prices));
        out.insert("lambda".into(), vec(&self.lambda));
        out.insert("payments".into(), mat(&self.payments));
        out.insert("zero_value_goods".into(), json!(self.zero_value_goods));
        out.insert(
            "provenance".into(),
            match &self.provenance {
                None => Value::Null,
                Some(p) => json!({
                    "state_index": p.state_index,
                    "coordinate_regions": p.coordinate_regions,
                    "ratio_regions": p.ratio_regions,
                    "witnesses": p.witnesses.iter().map(|w| w.to_json()).collect::<Vec<_>>(),
                    "delta": rat_to_json(&p.delta),
                }),
            },
        );
        Value::Object(out)
    }
}

/// Reads the `alpha` and `x` fields of a proposed equilibrium; everything
/// else is recomputed by the verifier.
pub fn parse_alpha_x(value: &Value) -> Result<(Vec<Rat>, Vec<Vec<Rat>>), String> {
    let rats = |v: &Value| -> Result<Vec<Rat>, String> {
        v.as_array()
            .ok_or("expected an array")?
            .iter()
            .map(|x| rat_from_json(x).map_err(|e| e.to_string()))
            .collect()
    };
    let alpha = rats(value.get("alpha").ok_or("missing field \"alpha\"")?)?;
    let x = value
        .get("x")
        .ok_or("missing field \"x\"")?
        .as_array()
        .ok_or("\"x\" must be an array of rows")?
        .iter()
        .map(rats)
        .collect::<Result<Vec<_>, _>>()?;
    Ok((alpha, x))
}
