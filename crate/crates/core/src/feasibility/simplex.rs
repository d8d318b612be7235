//! Dense two-phase primal simplex over exact rationals.
//!
//! Rows are scaled to integers up front and the tableau is kept
//! fraction-free: every entry is stored multiplied by the determinant of
//! the current basis, and a pivot divides exactly by the previous one.
//!
//! Bland's rule picks both the entering column (lowest index with positive
//! reduced cost) and the leaving row (minimum ratio, ties to the lowest basic
//! variable), so the method terminates and is fully deterministic.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowKind {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct DenseRow {
    pub coeffs: Vec<Rat>,
    pub kind: RowKind,
    pub rhs: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LpResult {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// Entries times `det`; the last column is the right-hand side.
    rows: Vec<Vec<BigInt>>,
    /// Reduced costs times `det`; the last entry is minus the objective.
    cost: Vec<BigInt>,
    basis: Vec<usize>,
    cols: usize,
    /// Determinant of the current basis, kept positive.
    det: BigInt,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &BigInt {
        &self.rows[r][self.cols]
    }

    fn eliminate(target: &mut [BigInt], pivot_row: &[BigInt], col: usize, p: &BigInt, det: &BigInt) {
        let factor = target[col].clone();
        if factor.is_zero() {
            if p != det {
                for v in target.iter_mut().filter(|v| !v.is_zero()) {
                    *v = &*v * p / det;
                }
            }
            return;
        }
        for (v, a) in target.iter_mut().zip(pivot_row) {
            let next = &*v * p - &factor * a;
            *v = next / det;
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        let pivot_row = std::mem::take(&mut self.rows[row]);
        for target in self.rows.iter_mut().filter(|r| !r.is_empty()) {
            Self::eliminate(target, &pivot_row, col, &p, &self.det);
        }
        Self::eliminate(&mut self.cost, &pivot_row, col, &p, &self.det);
        self.rows[row] = pivot_row;
        self.basis[row] = col;
        self.det = p;
        if self.det.sign() == Sign::Minus {
            for v in self.rows.iter_mut().flatten().chain(self.cost.iter_mut()) {
                *v = -&*v;
            }
            self.det = -&self.det;
        }
    }

    /// Maximizes over the columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&c| self.cost[c].is_positive()) else {
                return true;
            };
            let mut leave: Option<usize> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][enter].is_positive() {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(best) => {
                        // rhs_r / a_r against rhs_best / a_best, both a > 0
                        let lhs = self.rhs(r) * &self.rows[best][enter];
                        let rhs = self.rhs(best) * &self.rows[r][enter];
                        match lhs.cmp(&rhs) {
                            Ordering::Less => true,
                            Ordering::Equal => self.basis[r] < self.basis[best],
                            Ordering::Greater => false,
                        }
                    }
                };
                if better {
                    leave = Some(r);
                }
            }
            match leave {
                Some(r) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// `values` times the least common denominator, then divided by the
/// common factor of the numerators.
fn integer_row(values: &[&Rat]) -> Vec<BigInt> {
    let lcm = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = values.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if gcd.is_zero() || gcd.is_one() {
        ints
    } else {
        ints.into_iter().map(|v| v / &gcd).collect()
    }
}

/// Maximizes `objective · x` subject to `rows` and `x ≥ 0`.
pub(crate) fn maximize(num_vars: usize, objective: &[Rat], rows: &[DenseRow]) -> LpResult {
    let m = rows.len();
    // column layout: structural | slack or surplus per Le row | artificial
    let slack_count = rows.iter().filter(|r| r.kind == RowKind::Le).count();
    let mut needs_artificial = Vec::with_capacity(m);
    let mut signs = Vec::with_capacity(m);
    for row in rows {
        let flip = row.rhs.is_negative();
        signs.push(flip);
        // a ≤ row with non-negative rhs starts on its slack
        needs_artificial.push(row.kind == RowKind::Eq || flip);
    }
    let art_count = needs_artificial.iter().filter(|&&b| b).count();
    let art_start = num_vars + slack_count;
    let cols = art_start + art_count;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        cost: vec![BigInt::zero(); cols + 1],
        basis: Vec::with_capacity(m),
        cols,
        det: BigInt::one(),
    };
    let (mut next_slack, mut next_art) = (num_vars, art_start);
    for (r, row) in rows.iter().enumerate() {
        let values: Vec<&Rat> = row.coeffs.iter().chain(std::iter::once(&row.rhs)).collect();
        let scaled = integer_row(&values);
        let sign = if signs[r] { -BigInt::one() } else { BigInt::one() };
        let mut t = vec![BigInt::zero(); cols + 1];
        for (c, a) in scaled[..num_vars].iter().enumerate() {
            if !a.is_zero() {
                t[c] = a * &sign;
            }
        }
        t[cols] = &scaled[num_vars] * &sign;
        let mut basic = None;
        if row.kind == RowKind::Le {
            t[next_slack] = sign.clone();
            if !signs[r] {
                basic = Some(next_slack);
            }
            next_slack += 1;
        }
        if needs_artificial[r] {
            t[next_art] = BigInt::one();
            basic = Some(next_art);
            next_art += 1;
        }
        tab.rows.push(t);
        tab.basis.push(basic.expect("every row has a starting basic column"));
    }

    if art_count > 0 {
        // phase 1: maximize −Σ artificials, priced out against the basis
        for (r, &b) in tab.basis.iter().enumerate() {
            if b >= art_start {
                for c in (0..art_start).chain(std::iter::once(cols)) {
                    let v = tab.rows[r][c].clone();
                    tab.cost[c] += v;
                }
            }
        }
        tab.optimize(cols);
        if !tab.cost[cols].is_zero() {
            return LpResult::Infeasible;
        }
        // drive zero-level artificials out of the basis; a row with no other
        // nonzero entry is redundant and keeps its artificial at zero
        for r in 0..tab.rows.len() {
            if tab.basis[r] >= art_start {
                if let Some(c) = (0..art_start).find(|&c| !tab.rows[r][c].is_zero()) {
                    tab.pivot(r, c);
                }
            }
        }
    }

    // phase 2 on the original objective; artificial columns stay non-basic
    let obj_values: Vec<&Rat> = objective.iter().collect();
    let obj = integer_row(&obj_values);
    let obj_scale = objective
        .iter()
        .zip(&obj)
        .find(|(o, _)| !o.is_zero())
        .map(|(o, i)| Rat::from_integer(i.clone()) / o)
        .unwrap_or_else(Rat::one);
    tab.cost = vec![BigInt::zero(); cols + 1];
    for (c, v) in obj.iter().enumerate() {
        tab.cost[c] = v * &tab.det;
    }
    for r in 0..tab.rows.len() {
        let b = tab.basis[r];
        if b < num_vars && !obj[b].is_zero() {
            for c in 0..=cols {
                if !tab.rows[r][c].is_zero() {
                    let delta = &obj[b] * &tab.rows[r][c];
                    tab.cost[c] -= delta;
                }
            }
        }
    }
    if !tab.optimize(art_start) {
        return LpResult::Unbounded;
    }
    let mut x = vec![Rat::zero(); num_vars];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < num_vars {
            x[b] = Rat::new(tab.rhs(r).clone(), tab.det.clone());
        }
    }
    let value = Rat::new(-tab.cost[cols].clone(), tab.det.clone()) / obj_scale;
    LpResult::Optimal { x, value }
}
