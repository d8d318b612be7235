//! Brute-force decision procedure for small mixed strict/weak systems over
//! `z ≥ 0`: enumerate the vertices of the closure intersected with a box.

use sppe_core::rat::int;
use sppe_core::Rat;

use num_traits::{One, Zero};

/// `a·z ≤ b`, or `a·z < b` when `strict`.
#[derive(Debug, Clone)]
pub struct HalfSpace {
    pub a: Vec<Rat>,
    pub b: Rat,
    pub strict: bool,
}

/// Box side large enough that any feasible system with coefficients in
/// `[-3, 3]`, right-hand sides in `[-6, 6]` and at most four variables has a
/// strictly feasible point inside it (Hadamard bound on the Cramer numerators).
pub const BOX: i64 = 10_000;

fn solve_square(mut rows: Vec<Vec<Rat>>, mut rhs: Vec<Rat>) -> Option<Vec<Rat>> {
    let d = rows.len();
    for col in 0..d {
        let pivot = (col..d).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..d {
            if r != col && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &rows[col][col];
                for k in col..d {
                    let sub = &f * &rows[col][k];
                    rows[r][k] -= sub;
                }
                let sub = &f * &rhs[col];
                rhs[r] -= sub;
            }
        }
    }
    Some((0..d).map(|i| &rhs[i] / &rows[i][i]).collect())
}

fn combinations(total: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, total: usize, k: usize, pick: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if pick.len() == k {
            f(pick);
            return;
        }
        for i in start..total {
            pick.push(i);
            go(i + 1, total, k, pick, f);
            pick.pop();
        }
    }
    go(0, total, k, &mut Vec::new(), f);
}

fn dot(a: &[Rat], z: &[Rat]) -> Rat {
    a.iter().zip(z).map(|(x, y)| x * y).sum()
}

/// True iff some `z ≥ 0` satisfies every half-space, strict ones strictly.
pub fn feasible(vars: usize, system: &[HalfSpace]) -> bool {
    let mut all = system.to_vec();
    for v in 0..vars {
        let mut a = vec![Rat::zero(); vars];
        a[v] = -Rat::one();
        all.push(HalfSpace { a: a.clone(), b: Rat::zero(), strict: false });
        a[v] = Rat::one();
        all.push(HalfSpace { a, b: int(BOX), strict: false });
    }
    let mut vertices: Vec<Vec<Rat>> = Vec::new();
    combinations(all.len(), vars, &mut |pick| {
        let rows = pick.iter().map(|&i| all[i].a.clone()).collect();
        let rhs = pick.iter().map(|&i| all[i].b.clone()).collect();
        if let Some(z) = solve_square(rows, rhs) {
            if all.iter().all(|h| dot(&h.a, &z) <= h.b) && !vertices.contains(&z) {
                vertices.push(z);
            }
        }
    });
    !vertices.is_empty()
        && system
            .iter()
            .filter(|h| h.strict)
            .all(|h| vertices.iter().any(|z| dot(&h.a, z) < h.b))
}

