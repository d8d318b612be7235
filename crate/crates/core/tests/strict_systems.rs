//! `solve_feasibility` against Fourier–Motzkin elimination, which decides
//! mixed strict and weak systems exactly.

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use sppe_core::feasibility::{solve_feasibility, Block, FeasibilitySystem, LinExpr, SourceRelation};
use sppe_core::rat::int;
use sppe_core::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Lt,
    Le,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<i64>,
    rel: Rel,
    rhs: i64,
}

/// `a·z ≤ b` or `a·z < b`.
#[derive(Debug, Clone, PartialEq)]
struct Ineq {
    a: Vec<Rat>,
    b: Rat,
    strict: bool,
}

fn fourier_motzkin(vars: usize, rows: &[Row]) -> bool {
    let mut ineqs: Vec<Ineq> = Vec::new();
    for row in rows {
        let a: Vec<Rat> = row.coeffs.iter().map(|&c| int(c)).collect();
        let b = int(row.rhs);
        ineqs.push(Ineq { a: a.clone(), b: b.clone(), strict: row.rel == Rel::Lt });
        if row.rel == Rel::Eq {
            ineqs.push(Ineq { a: a.iter().map(|v| -v).collect(), b: -b, strict: false });
        }
    }
    for v in 0..vars {
        let mut a = vec![Rat::zero(); vars];
        a[v] = int(-1);
        ineqs.push(Ineq { a, b: Rat::zero(), strict: false });
    }
    for v in 0..vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for q in ineqs {
            if q.a[v].is_positive() {
                pos.push(q);
            } else if q.a[v].is_negative() {
                neg.push(q);
            } else {
                rest.push(q);
            }
        }
        for p in &pos {
            for n in &neg {
                let (sp, sn) = (-n.a[v].clone(), p.a[v].clone());
                let a: Vec<Rat> = p.a.iter().zip(&n.a).map(|(x, y)| x * &sp + y * &sn).collect();
                let q = Ineq { a, b: &p.b * &sp + &n.b * &sn, strict: p.strict || n.strict };
                if !rest.contains(&q) {
                    rest.push(q);
                }
            }
        }
        ineqs = rest;
    }
    ineqs.iter().all(|q| if q.strict { q.b.is_positive() } else { !q.b.is_negative() })
}

fn build(vars: usize, rows: &[Row]) -> FeasibilitySystem {
    let mut sys = FeasibilitySystem::new((0..vars).map(|v| format!("z{v}")).collect());
    for row in rows {
        let mut e = LinExpr::constant(int(-row.rhs));
        for (v, &c) in row.coeffs.iter().enumerate() {
            if c != 0 {
                e.add_term(v, int(c));
            }
        }
        let rel = match row.rel {
            Rel::Lt => SourceRelation::Lt,
            Rel::Le => SourceRelation::Le,
            Rel::Eq => SourceRelation::Eq,
        };
        sys.add(&e, rel, Block::Other);
    }
    sys
}

fn system() -> impl Strategy<Value = (usize, Vec<Row>)> {
    (2usize..=3, 1usize..=5).prop_flat_map(|(vars, count)| {
        let row = (
            proptest::collection::vec(-3i64..=3, vars),
            prop_oneof![Just(Rel::Lt), Just(Rel::Le), Just(Rel::Eq)],
            -4i64..=6,
        )
            .prop_map(|(coeffs, rel, rhs)| Row { coeffs, rel, rhs });
        (Just(vars), proptest::collection::vec(row, count))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn verdict_matches_elimination((vars, rows) in system()) {
        let sys = build(vars, &rows);
        let outcome = solve_feasibility(&sys);
        prop_assert_eq!(outcome.is_feasible(), fourier_motzkin(vars, &rows), "{}", sys);
        if let Some(point) = outcome.point {
            for row in &rows {
                let lhs: Rat = row.coeffs.iter().zip(&point).map(|(&c, z)| int(c) * z).sum();
                let rhs = int(row.rhs);
                let ok = match row.rel {
                    Rel::Lt => lhs < rhs,
                    Rel::Le => lhs <= rhs,
                    Rel::Eq => lhs == rhs,
                };
                prop_assert!(ok, "witness violates {:?}", row);
            }
        }
    }
}

#[test]
fn strict_pair_with_empty_interior() {
    // z0 < z1 and z1 < z0
    let rows = [
        Row { coeffs: vec![1, -1], rel: Rel::Lt, rhs: 0 },
        Row { coeffs: vec![-1, 1], rel: Rel::Lt, rhs: 0 },
    ];
    assert!(!fourier_motzkin(2, &rows));
    assert!(!solve_feasibility(&build(2, &rows)).is_feasible());
}

#[test]
fn strict_row_touching_a_face() {
    // z0 + z1 ≤ 1, z0 + z1 > 1 is empty; z0 + z1 ≥ 1 with z0 < 1 is not
    let empty = [
        Row { coeffs: vec![1, 1], rel: Rel::Le, rhs: 1 },
        Row { coeffs: vec![-1, -1], rel: Rel::Lt, rhs: -1 },
    ];
    assert!(!solve_feasibility(&build(2, &empty)).is_feasible());
    let open = [
        Row { coeffs: vec![-1, -1], rel: Rel::Le, rhs: -1 },
        Row { coeffs: vec![1, 0], rel: Rel::Lt, rhs: 1 },
    ];
    assert!(solve_feasibility(&build(2, &open)).is_feasible());
}
