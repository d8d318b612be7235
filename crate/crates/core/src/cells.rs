//! Candidate cells of the bid-level arrangement.
//!
//! Bid levels `λ_j > 0` are cut by the hyperplanes `λ_j = v_ij` and
//! `λ_j / λ_k = v_ij / v_ik`. Projecting each family onto its own line gives
//! one axis per good (breakpoints `v_ij`) and one per pair of goods
//! (breakpoints `v_ij / v_ik`). A [`CellState`] picks one region on every
//! axis; the product of those choices over-covers the faces of the
//! arrangement, and [`check_consistency`] discards the empty ones.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::instance::Instance;
use crate::rat::Rat;

/// One region of an axis: an open interval between consecutive breakpoints
/// (`None` meaning 0 on the left or +∞ on the right) or a breakpoint itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    Open { lo: Option<Rat>, hi: Option<Rat> },
    Point(Rat),
}

impl Region {
    pub fn contains(&self, t: &Rat) -> bool {
        match self {
            Region::Point(p) => t == p,
            Region::Open { lo, hi } => {
                lo.as_ref().map_or(t > &Rat::zero(), |lo| t > lo)
                    && hi.as_ref().is_none_or(|hi| t < hi)
            }
        }
    }

    /// Some positive value inside the region.
    pub fn sample(&self) -> Rat {
        match self {
            Region::Point(p) => p.clone(),
            Region::Open { lo: None, hi: None } => Rat::one(),
            Region::Open { lo: None, hi: Some(hi) } => hi / Rat::from_integer(2.into()),
            Region::Open { lo: Some(lo), hi: None } => lo + Rat::one(),
            Region::Open { lo: Some(lo), hi: Some(hi) } => (lo + hi) / Rat::from_integer(2.into()),
        }
    }
}

/// Sorted distinct positive breakpoints on `(0, ∞)`. Region `2t + 1` is the
/// point `breakpoints[t]`; region `2t` is the open interval just left of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    breakpoints: Vec<Rat>,
}

impl Axis {
    fn new(mut values: Vec<Rat>) -> Self {
        values.sort();
        values.dedup();
        Axis {
            breakpoints: values,
        }
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn region_count(&self) -> usize {
        2 * self.breakpoints.len() + 1
    }

    pub fn region(&self, r: usize) -> Region {
        assert!(r < self.region_count(), "region {r} out of range");
        if r % 2 == 1 {
            return Region::Point(self.breakpoints[r / 2].clone());
        }
        let t = r / 2;
        Region::Open {
            lo: t.checked_sub(1).map(|s| self.breakpoints[s].clone()),
            hi: self.breakpoints.get(t).cloned(),
        }
    }

    /// Index of the region containing `t > 0`.
    pub fn locate(&self, t: &Rat) -> usize {
        match self.breakpoints.binary_search(t) {
            Ok(pos) => 2 * pos + 1,
            Err(pos) => 2 * pos,
        }
    }

    fn position(&self, value: &Rat) -> usize {
        self.breakpoints
            .binary_search(value)
            .expect("breakpoint value missing from its own axis")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateAxis {
    pub good: usize,
    pub axis: Axis,
}

/// Axis for the ratio `λ_j / λ_k`, `j < k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioAxis {
    pub goods: (usize, usize),
    pub axis: Axis,
}

pub fn build_axes(inst: &Instance) -> (Vec<CoordinateAxis>, Vec<RatioAxis>) {
    let coords = (0..inst.m())
        .map(|j| CoordinateAxis {
            good: j,
            axis: Axis::new(
                (0..inst.n())
                    .map(|i| inst.value(i, j))
                    .filter(|v| !v.is_zero())
                    .cloned()
                    .collect(),
            ),
        })
        .collect();
    let ratios = goods_pairs(inst.m())
        .map(|(j, k)| RatioAxis {
            goods: (j, k),
            axis: Axis::new(
                (0..inst.n())
                    .filter(|&i| !inst.value(i, j).is_zero() && !inst.value(i, k).is_zero())
                    .map(|i| inst.value(i, j) / inst.value(i, k))
                    .collect(),
            ),
        })
        .collect();
    (coords, ratios)
}

fn goods_pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |j| (j + 1..m).map(move |k| (j, k)))
}

/// The axes of an instance together with, for every valuation, its
/// breakpoint position, so that signs can be read off region indices
/// without arithmetic.
#[derive(Debug, Clone)]
pub struct Arrangement {
    n: usize,
    m: usize,
    coords: Vec<CoordinateAxis>,
    ratios: Vec<RatioAxis>,
    /// `coord_pos[i][j]`: position of `v_ij` on axis `j`, `None` if `v_ij = 0`.
    coord_pos: Vec<Vec<Option<usize>>>,
    /// `ratio_pos[p][i]`: position of `v_ij / v_ik` on ratio axis `p`.
    ratio_pos: Vec<Vec<Option<usize>>>,
    pair_index: Vec<Vec<usize>>,
}

impl Arrangement {
    pub fn new(inst: &Instance) -> Self {
        let (coords, ratios) = build_axes(inst);
        let (n, m) = (inst.n(), inst.m());
        let coord_pos = (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let v = inst.value(i, j);
                        (!v.is_zero()).then(|| coords[j].axis.position(v))
                    })
                    .collect()
            })
            .collect();
        let ratio_pos = ratios
            .iter()
            .map(|ra| {
                let (j, k) = ra.goods;
                (0..n)
                    .map(|i| {
                        let (vj, vk) = (inst.value(i, j), inst.value(i, k));
                        (!vj.is_zero() && !vk.is_zero()).then(|| ra.axis.position(&(vj / vk)))
                    })
                    .collect()
            })
            .collect();
        let mut pair_index = vec![vec![usize::MAX; m]; m];
        for (p, (j, k)) in goods_pairs(m).enumerate() {
            pair_index[j][k] = p;
            pair_index[k][j] = p;
        }
        Arrangement {
            n,
            m,
            coords,
            ratios,
            coord_pos,
            ratio_pos,
            pair_index,
        }
    }

    pub fn goods(&self) -> usize {
        self.m
    }

    pub fn buyers(&self) -> usize {
        self.n
    }

    pub fn coordinate_axes(&self) -> &[CoordinateAxis] {
        &self.coords
    }

    pub fn ratio_axes(&self) -> &[RatioAxis] {
        &self.ratios
    }

    pub fn pair_index(&self, j: usize, k: usize) -> usize {
        self.pair_index[j][k]
    }

    /// Axes in canonical order: coordinates by good, then ratios by pair.
    fn axis(&self, level: usize) -> &Axis {
        if level < self.m {
            &self.coords[level].axis
        } else {
            &self.ratios[level - self.m].axis
        }
    }

    fn levels(&self) -> usize {
        self.coords.len() + self.ratios.len()
    }

    pub fn region_counts(&self) -> Vec<usize> {
        (0..self.levels()).map(|l| self.axis(l).region_count()).collect()
    }

    /// Size of the full product of regions, saturating at `u64::MAX`.
    pub fn state_count(&self) -> u64 {
        self.region_counts()
            .iter()
            .fold(1u64, |acc, &r| acc.saturating_mul(r as u64))
    }

    /// Canonical (lexicographic, first axis most significant) index.
    pub fn state_index(&self, state: &CellState) -> u64 {
        state
            .choices()
            .zip(self.region_counts())
            .fold(0u64, |acc, (r, count)| {
                acc.saturating_mul(count as u64).saturating_add(r as u64)
            })
    }

    /// The state whose regions contain the point `lambda` (all entries > 0).
    pub fn locate(&self, lambda: &[Rat]) -> CellState {
        assert_eq!(lambda.len(), self.m);
        CellState {
            coordinate: self.coords.iter().map(|c| c.axis.locate(&lambda[c.good])).collect(),
            ratio: self
                .ratios
                .iter()
                .map(|r| r.axis.locate(&(&lambda[r.goods.0] / &lambda[r.goods.1])))
                .collect(),
        }
    }

    /// `sign(λ_j − v_ij)` in the state, `None` when `v_ij = 0`.
    pub fn coordinate_sign(&self, state: &CellState, buyer: usize, good: usize) -> Option<Ordering> {
        self.coord_pos[buyer][good].map(|t| state.coordinate[good].cmp(&(2 * t + 1)))
    }

    /// `sign(v_ik λ_j − v_ij λ_k)` for `j < k`, `None` unless both values are positive.
    pub fn ratio_sign(&self, state: &CellState, buyer: usize, j: usize, k: usize) -> Option<Ordering> {
        debug_assert!(j < k);
        let p = self.pair_index[j][k];
        self.ratio_pos[p][buyer].map(|t| state.ratio[p].cmp(&(2 * t + 1)))
    }

    pub fn sign_table(&self, state: &CellState) -> SignTable {
        SignTable {
            coordinate: (0..self.n)
                .map(|i| (0..self.m).map(|j| self.coordinate_sign(state, i, j)).collect())
                .collect(),
            ratio: (0..self.n)
                .map(|i| {
                    goods_pairs(self.m)
                        .map(|(j, k)| self.ratio_sign(state, i, j, k))
                        .collect()
                })
                .collect(),
        }
    }

    /// Region bounds of a state as multiplicative constraints on the bid levels.
    fn region_edges(&self, level: usize, region: &Region) -> [Option<Edge>; 2] {
        // node 0 is the constant 1, node j + 1 is λ_j
        let (below, above) = if level < self.m {
            (0, level + 1)
        } else {
            let (j, k) = self.ratios[level - self.m].goods;
            (k + 1, j + 1)
        };
        match region {
            Region::Point(p) => [
                Some(Edge::new(below, above, p.clone(), false)),
                Some(Edge::new(above, below, p.recip(), false)),
            ],
            Region::Open { lo, hi } => [
                hi.as_ref().map(|hi| Edge::new(below, above, hi.clone(), true)),
                lo.as_ref().map(|lo| Edge::new(above, below, lo.recip(), true)),
            ],
        }
    }
}

/// Derived signs of every defining comparison in a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignTable {
    /// `[i][j]`: `sign(λ_j − v_ij)`.
    pub coordinate: Vec<Vec<Option<Ordering>>>,
    /// `[i][p]`: `sign(v_ik λ_j − v_ij λ_k)` for the `p`-th pair `(j, k)`.
    pub ratio: Vec<Vec<Option<Ordering>>>,
}

/// A choice of one region per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellState {
    pub coordinate: Vec<usize>,
    pub ratio: Vec<usize>,
}

impl CellState {
    fn choices(&self) -> impl Iterator<Item = usize> + '_ {
        self.coordinate.iter().chain(&self.ratio).copied()
    }

    fn from_choices(arr: &Arrangement, choices: &[usize]) -> Self {
        CellState {
            coordinate: choices[..arr.m].to_vec(),
            ratio: choices[arr.m..].to_vec(),
        }
    }

    pub fn coordinate_region(&self, arr: &Arrangement, good: usize) -> Region {
        arr.coords[good].axis.region(self.coordinate[good])
    }

    pub fn ratio_region(&self, arr: &Arrangement, pair: usize) -> Region {
        arr.ratios[pair].axis.region(self.ratio[pair])
    }
}

/// Every combination of one region per axis, in canonical order.
pub fn enumerate_states(arr: &Arrangement) -> impl Iterator<Item = CellState> + '_ {
    let counts = arr.region_counts();
    let mut next = Some(vec![0usize; counts.len()]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for level in (0..succ.len()).rev() {
            succ[level] += 1;
            if succ[level] < counts[level] {
                next = Some(succ);
                break;
            }
            succ[level] = 0;
        }
        Some(CellState::from_choices(arr, &current))
    })
}

/// `λ_to / λ_from ≤ weight` (strictly if `strict`), with `λ_0 = 1`.
#[derive(Debug, Clone)]
struct Edge {
    from: usize,
    to: usize,
    bound: Bound,
}

impl Edge {
    fn new(from: usize, to: usize, weight: Rat, strict: bool) -> Self {
        let (num, den) = weight.into();
        Edge {
            from,
            to,
            bound: Bound { num, den, strict },
        }
    }
}

/// Upper bound `num / den` on a ratio. Products along paths are only ever
/// compared, so the fraction is left unreduced; `den` stays positive.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bound {
    num: BigInt,
    den: BigInt,
    strict: bool,
}

impl Bound {
    fn unit() -> Self {
        Bound {
            num: BigInt::one(),
            den: BigInt::one(),
            strict: false,
        }
    }

    fn then(&self, other: &Bound) -> Bound {
        Bound {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
            strict: self.strict || other.strict,
        }
    }

    fn tighter_than(&self, other: &Bound) -> bool {
        match (&self.num * &other.den).cmp(&(&other.num * &self.den)) {
            Ordering::Less => true,
            Ordering::Equal => self.strict && !other.strict,
            Ordering::Greater => false,
        }
    }

    /// A cycle with this product bound admits no positive point.
    fn is_contradictory_cycle(&self) -> bool {
        self.tighter_than(&Bound::unit())
    }
}

/// Tightest implied bounds on every ratio `λ_b / λ_a`, closed under
/// composition. Taking logarithms turns this into a system of difference
/// constraints, so emptiness is exactly a contradictory cycle.
#[derive(Debug, Clone)]
struct RatioBounds {
    nodes: usize,
    tight: Vec<Option<Bound>>,
}

impl RatioBounds {
    fn new(goods: usize) -> Self {
        let nodes = goods + 1;
        let mut tight = vec![None; nodes * nodes];
        for a in 0..nodes {
            tight[a * nodes + a] = Some(Bound::unit());
        }
        RatioBounds { nodes, tight }
    }

    fn get(&self, a: usize, b: usize) -> Option<&Bound> {
        self.tight[a * self.nodes + b].as_ref()
    }

    fn admits(&self, edge: &Edge) -> bool {
        match self.get(edge.to, edge.from) {
            Some(back) => !edge.bound.then(back).is_contradictory_cycle(),
            None => true,
        }
    }

    /// Adds an edge that [`admits`](Self::admits) accepted.
    fn insert(&mut self, edge: &Edge) {
        let v = self.nodes;
        let mut updated = self.tight.clone();
        for p in 0..v {
            let Some(head) = self.get(p, edge.from) else { continue };
            let via = head.then(&edge.bound);
            for q in 0..v {
                let Some(tail) = self.get(edge.to, q) else { continue };
                let cand = via.then(tail);
                let slot = &mut updated[p * v + q];
                if slot.as_ref().is_none_or(|cur| cand.tighter_than(cur)) {
                    *slot = Some(cand);
                }
            }
        }
        self.tight = updated;
    }

    /// Tries to add both bounds of a region; `None` if the result is empty.
    fn with_region(&self, edges: &[Option<Edge>; 2]) -> Option<RatioBounds> {
        if !edges.iter().flatten().all(|e| self.admits(e)) {
            return None;
        }
        let mut next = self.clone();
        for e in edges.iter().flatten() {
            next.insert(e);
        }
        Some(next)
    }

    /// Region lies entirely on the low side of the implied range.
    fn rejects_upper(&self, edges: &[Option<Edge>; 2]) -> bool {
        edges[0].as_ref().is_some_and(|e| !self.admits(e))
    }

    /// Region lies entirely on the high side of the implied range.
    fn rejects_lower(&self, edges: &[Option<Edge>; 2]) -> bool {
        edges[1].as_ref().is_some_and(|e| !self.admits(e))
    }
}

/// Whether the state's regions have a common point with all `λ_j > 0`.
///
/// This is an exact emptiness test, so it also rules out every per-buyer
/// cyclic ordering of the terms `{1} ∪ {λ_j / v_ij}`.
pub fn check_consistency(arr: &Arrangement, state: &CellState) -> bool {
    let mut bounds = RatioBounds::new(arr.m);
    for (level, r) in state.choices().enumerate() {
        let edges = arr.region_edges(level, &arr.axis(level).region(r));
        match bounds.with_region(&edges) {
            Some(next) => bounds = next,
            None => return false,
        }
    }
    true
}

/// The consistent states in canonical order, paired with their canonical
/// index. Yields exactly `enumerate_states(arr).filter(check_consistency)`
/// but skips every subtree whose prefix is already empty.
pub struct ConsistentStates<'a> {
    arr: &'a Arrangement,
    counts: Vec<usize>,
    choice: Vec<usize>,
    /// `bounds[l]` holds the closure after fixing levels `< l`.
    bounds: Vec<RatioBounds>,
    depth: usize,
    /// End of the admissible run on the last level.
    last_end: usize,
    fresh: bool,
    done: bool,
}

impl<'a> ConsistentStates<'a> {
    pub fn new(arr: &'a Arrangement) -> Self {
        let counts = arr.region_counts();
        let levels = counts.len();
        ConsistentStates {
            arr,
            choice: vec![0; levels],
            bounds: vec![RatioBounds::new(arr.m); levels + 1],
            counts,
            depth: 0,
            last_end: 0,
            fresh: true,
            done: false,
        }
    }

    /// First region at `level` not lying below the implied range. Admissible
    /// regions form a contiguous run, so this is a binary search.
    fn first_candidate(&self, level: usize) -> usize {
        let (axis, bounds) = (self.arr.axis(level), &self.bounds[level]);
        let (mut lo, mut hi) = (0, self.counts[level]);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if bounds.rejects_upper(&self.arr.region_edges(level, &axis.region(mid))) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// One past the last region at `level` not lying above the implied range.
    fn end_candidate(&self, level: usize, from: usize) -> usize {
        let (axis, bounds) = (self.arr.axis(level), &self.bounds[level]);
        let (mut lo, mut hi) = (from, self.counts[level]);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if bounds.rejects_lower(&self.arr.region_edges(level, &axis.region(mid))) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    /// Tries region `choice[level]`; past the end of the admissible run the
    /// level is exhausted. On the last level the run is known up front and
    /// no closure is built.
    fn try_descend(&mut self, level: usize) -> bool {
        let r = self.choice[level];
        if level + 1 == self.counts.len() {
            return r < self.last_end;
        }
        if r >= self.counts[level] {
            return false;
        }
        let edges = self.arr.region_edges(level, &self.arr.axis(level).region(r));
        match self.bounds[level].with_region(&edges) {
            Some(next) => {
                self.bounds[level + 1] = next;
                true
            }
            None => false,
        }
    }
}

impl ConsistentStates<'_> {
    fn enter_level(&mut self, level: usize) {
        self.choice[level] = self.first_candidate(level);
        if level + 1 == self.counts.len() {
            self.last_end = self.end_candidate(level, self.choice[level]);
        }
    }
}

impl Iterator for ConsistentStates<'_> {
    type Item = (u64, CellState);

    fn next(&mut self) -> Option<Self::Item> {
        let levels = self.counts.len();
        if self.done {
            return None;
        }
        if !self.fresh {
            // resume after the previously yielded leaf
            if levels == 0 {
                self.done = true;
                return None;
            }
            self.depth = levels - 1;
            self.choice[self.depth] += 1;
        }
        if self.fresh && levels > 0 {
            self.enter_level(0);
        }
        self.fresh = false;
        loop {
            if self.depth == levels {
                let state = CellState::from_choices(self.arr, &self.choice);
                let index = self.arr.state_index(&state);
                return Some((index, state));
            }
            if self.try_descend(self.depth) {
                self.depth += 1;
                if self.depth < levels {
                    self.enter_level(self.depth);
                }
            } else {
                if self.depth == 0 {
                    self.done = true;
                    return None;
                }
                self.depth -= 1;
                self.choice[self.depth] += 1;
            }
        }
    }
}

/// `α_i(λ)` inside a cell: 1, or `λ_good / value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaExpr {
    Unpaced,
    Ratio { good: usize, value: Rat },
}

impl AlphaExpr {
    pub fn eval(&self, lambda: &[Rat]) -> Rat {
        match self {
            AlphaExpr::Unpaced => Rat::one(),
            AlphaExpr::Ratio { good, value } => &lambda[*good] / value,
        }
    }
}

/// `M_i(F)`: the terms attaining the minimum in `α_i(λ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minimizers {
    /// The constant term 1 is among the minimizers.
    pub constant: bool,
    pub goods: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellDerivation {
    pub minimizers: Vec<Minimizers>,
    pub alpha: Vec<AlphaExpr>,
    /// `T_j(F)`, sorted.
    pub top: Vec<Vec<usize>>,
    /// `E(F)`: unpaced buyers.
    pub unpaced: Vec<usize>,
    /// `L(F)`: paced buyers.
    pub paced: Vec<usize>,
}

impl CellDerivation {
    pub fn is_paced(&self, buyer: usize) -> bool {
        matches!(self.alpha[buyer], AlphaExpr::Ratio { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("state orders buyer {buyer}'s terms cyclically")]
    InconsistentState { buyer: usize },
}

/// Reads off `M_i`, the `α` expressions, `T_j`, `E` and `L` from the signs.
pub fn derive_cell(
    arr: &Arrangement,
    inst: &Instance,
    state: &CellState,
) -> Result<CellDerivation, CellError> {
    let (n, m) = (inst.n(), inst.m());
    let mut minimizers = Vec::with_capacity(n);
    let mut alpha = Vec::with_capacity(n);
    let mut top = vec![Vec::new(); m];
    let mut unpaced = Vec::new();
    let mut paced = Vec::new();
    for i in 0..n {
        // term 0 is the constant, term j + 1 is λ_j / v_ij
        let terms: Vec<usize> = std::iter::once(0)
            .chain((0..m).filter(|&j| !inst.value(i, j).is_zero()).map(|j| j + 1))
            .collect();
        let cmp = |a: usize, b: usize| -> Ordering {
            match (a, b) {
                _ if a == b => Ordering::Equal,
                (0, b) => arr.coordinate_sign(state, i, b - 1).unwrap().reverse(),
                (a, 0) => arr.coordinate_sign(state, i, a - 1).unwrap(),
                (a, b) if a < b => arr.ratio_sign(state, i, a - 1, b - 1).unwrap(),
                (a, b) => arr.ratio_sign(state, i, b - 1, a - 1).unwrap().reverse(),
            }
        };
        for &a in &terms {
            for &b in &terms {
                for &c in &terms {
                    let (ab, bc, ac) = (cmp(a, b), cmp(b, c), cmp(a, c));
                    if ab != Ordering::Greater && bc != Ordering::Greater {
                        let expect = if ab == Ordering::Less || bc == Ordering::Less {
                            Ordering::Less
                        } else {
                            Ordering::Equal
                        };
                        if ac != expect {
                            return Err(CellError::InconsistentState { buyer: i });
                        }
                    }
                }
            }
        }
        let mins: Vec<usize> = terms
            .iter()
            .copied()
            .filter(|&a| terms.iter().all(|&b| cmp(b, a) != Ordering::Less))
            .collect();
        let constant = mins.contains(&0);
        let goods: Vec<usize> = mins.iter().filter(|&&t| t > 0).map(|t| t - 1).collect();
        for &j in &goods {
            top[j].push(i);
        }
        if constant {
            unpaced.push(i);
            alpha.push(AlphaExpr::Unpaced);
        } else {
            paced.push(i);
            let good = goods[0];
            alpha.push(AlphaExpr::Ratio {
                good,
                value: inst.value(i, good).clone(),
            });
        }
        minimizers.push(Minimizers { constant, goods });
    }
    Ok(CellDerivation {
        minimizers,
        alpha,
        top,
        unpaced,
        paced,
    })
}
