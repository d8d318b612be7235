#![allow(dead_code)]

use proptest::prelude::*;
use sppe_core::rat::frac;
use sppe_core::{Instance, Rat};

/// Small positive rational `num / den`.
pub fn small_rat() -> impl Strategy<Value = Rat> {
    (1i64..=12, 1i64..=3).prop_map(|(num, den)| frac(num, den))
}

/// Valuation that is zero about a quarter of the time.
pub fn valuation() -> impl Strategy<Value = Rat> {
    prop_oneof![1 => Just(frac(0, 1)), 3 => small_rat()]
}

pub fn instance(max_n: usize, max_m: usize) -> impl Strategy<Value = Instance> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        (
            proptest::collection::vec(proptest::collection::vec(valuation(), m), n),
            proptest::collection::vec(small_rat(), n),
        )
            .prop_map(|(v, b)| Instance::new(v, b).unwrap())
    })
}

pub fn ints(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
    rows.iter().map(|r| r.iter().map(|&x| frac(x, 1)).collect()).collect()
}
