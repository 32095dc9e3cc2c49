//! Lower and upper bounds on the minimum pseudo-weight.
//!
//! Minimizing the pseudo-weight over the cone is the same as maximizing
//! `|x|^2` over the slice `K ∩ {sum x = 1}`. Lower bounds come from relaxing
//! that slice to a box (first order) or to a box plus pairwise caps split by
//! the position of the largest entry (second order); the upper bound is any
//! feasible point, found by linearized norm ascent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codes::ParityCheckMatrix;
use crate::error::{Error, Result};
use crate::generators::PseudoCodeword;
use crate::linprog::{AnySliceSolver, Direction, FloatSliceSolver, LpStatus, Mode};
use crate::polytope::{ConstraintSystem, Sense, SystemKind};

/// Coordinates per independent LP solver when computing the caps.
const ALPHA_CHUNK: usize = 16;

/// `min column weight + 1` when no two columns share more than one row.
pub fn column_weight_bound(h: &ParityCheckMatrix) -> Option<f64> {
    if !h.is_four_cycle_free() {
        return None;
    }
    h.column_weights().into_iter().min().map(|m| (m + 1) as f64)
}

/// Maximum of `|x|^2` over `{0 <= x <= alpha, sum x = budget}` together with
/// the greedy maximizer: fill the largest caps first (ties by index).
pub fn box_max_norm<T>(alpha: &[T], budget: &T) -> Result<(T, Vec<T>)>
where
    T: Clone + PartialOrd + Num,
{
    if alpha.iter().any(|a| *a < T::zero()) {
        return Err(Error::InvalidArgument("caps must be nonnegative".into()));
    }
    if *budget <= T::zero() {
        return Err(Error::InvalidArgument("budget must be positive".into()));
    }
    let total = alpha.iter().fold(T::zero(), |s, a| s + a.clone());
    if total < *budget {
        return Err(Error::Infeasible("caps sum below budget".into()));
    }
    let mut order: Vec<usize> = (0..alpha.len()).collect();
    order.sort_by(|&i, &j| {
        alpha[j]
            .partial_cmp(&alpha[i])
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });
    let mut x = vec![T::zero(); alpha.len()];
    let mut left = budget.clone();
    let mut value = T::zero();
    for i in order {
        if left <= T::zero() {
            break;
        }
        let take = if alpha[i] < left {
            alpha[i].clone()
        } else {
            left.clone()
        };
        left = left - take.clone();
        value = value + take.clone() * take.clone();
        x[i] = take;
    }
    Ok((value, x))
}

/// `|x|^2` maximum of the box problem for caps already sorted descending.
/// Returns `None` when the caps cannot carry the budget.
fn sorted_box_value(sorted: &[f64], budget: f64) -> Option<f64> {
    if budget <= 0.0 {
        return (budget > -1e-15).then_some(0.0);
    }
    let mut left = budget;
    let mut value = 0.0;
    for &c in sorted {
        if c >= left {
            return Some(value + left * left);
        }
        value += c * c;
        left -= c;
    }
    (left <= 1e-15).then_some(value)
}

/// Orbits of coordinates and of coordinate pairs under a group of column
/// automorphisms. Caps are constant on orbits, so only one LP per orbit is
/// needed; the representative is the smallest member.
#[derive(Clone, Debug)]
pub struct Symmetry {
    n: usize,
    coord_rep: Vec<usize>,
    pair_rep: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

impl Symmetry {
    pub fn trivial(n: usize) -> Self {
        Symmetry {
            n,
            coord_rep: (0..n).collect(),
            pair_rep: (0..n * (n + 1) / 2).collect(),
        }
    }

    /// Checks every generator against `h` before using it.
    pub fn new(h: &ParityCheckMatrix, generators: &[Vec<usize>]) -> Result<Self> {
        let n = h.cols();
        if generators.iter().any(|g| !h.is_column_automorphism(g)) {
            return Err(Error::InvalidArgument("generator is not a column automorphism".into()));
        }
        let mut coord: Vec<usize> = (0..n).collect();
        let mut pair: Vec<usize> = (0..n * (n + 1) / 2).collect();
        for g in generators {
            for i in 0..n {
                union(&mut coord, i, g[i]);
                for j in i..n {
                    union(&mut pair, pair_index(n, i, j), pair_index(n, g[i], g[j]));
                }
            }
        }
        let coord_rep = (0..n).map(|i| find(&mut coord, i)).collect();
        let pair_rep = (0..pair.len()).map(|p| find(&mut pair, p)).collect();
        Ok(Symmetry { n, coord_rep, pair_rep })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coordinate_orbits(&self) -> usize {
        (0..self.n).filter(|&i| self.coord_rep[i] == i).count()
    }

    pub fn pair_orbits(&self) -> usize {
        (0..self.pair_rep.len()).filter(|&p| self.pair_rep[p] == p).count()
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.n,
            });
        }
        Ok(())
    }
}

/// Solves `max x_i` (first order) over the normalized slice for every i.
pub fn compute_alpha(cone: &ConstraintSystem) -> Result<Vec<f64>> {
    compute_alpha_with(cone, &Symmetry::trivial(cone.dim()))
}

/// [`compute_alpha`] solving one LP per coordinate orbit.
pub fn compute_alpha_with(cone: &ConstraintSystem, sym: &Symmetry) -> Result<Vec<f64>> {
    check_cone(cone)?;
    let n = cone.dim();
    sym.check_dim(n)?;
    let mode = Mode::auto(n);
    let reps: Vec<usize> = (0..n).filter(|&i| sym.coord_rep[i] == i).collect();
    let chunks: Vec<Vec<f64>> = reps
        .par_chunks(ALPHA_CHUNK)
        .map(|chunk| {
            let mut solver = AnySliceSolver::new(cone, mode)?;
            if !solver.is_feasible() {
                return Err(Error::Infeasible("the cone is {0}".into()));
            }
            chunk
                .iter()
                .map(|&i| {
                    let mut obj = vec![0.0; n];
                    obj[i] = 1.0;
                    optimum(solver.solve(&obj, Direction::Maximize)?)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut value = vec![0.0; n];
    for (&i, v) in reps.iter().zip(chunks.concat()) {
        value[i] = v;
    }
    Ok((0..n).map(|i| value[sym.coord_rep[i]]).collect())
}

fn optimum(res: crate::linprog::LpResult) -> Result<f64> {
    match res.status {
        LpStatus::Optimal => Ok(res.optimum.expect("optimal")),
        s => Err(Error::Numerical(format!("slice LP not optimal: {s:?}"))),
    }
}

fn check_cone(cone: &ConstraintSystem) -> Result<()> {
    if cone.kind() != SystemKind::Cone {
        return Err(Error::InvalidArgument("expected a cone system".into()));
    }
    Ok(())
}

/// Symmetric matrix of pairwise caps `beta[i][j] = max x_i + x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCaps {
    n: usize,
    upper: Vec<f64>,
}

impl PairCaps {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        PairCaps { n, upper }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        pair_index(self.n, i, j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.offset(i, j)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxCaps {
    pub alpha: Vec<f64>,
    #[serde(skip)]
    pub beta: Option<PairCaps>,
}

/// Solves `max x_i + x_j` for all pairs; row i shares one warm solver.
pub fn compute_beta(cone: &ConstraintSystem, alpha: &[f64]) -> Result<PairCaps> {
    compute_beta_with(cone, alpha, &Symmetry::trivial(cone.dim()))
}

/// [`compute_beta`] solving one LP per pair orbit.
pub fn compute_beta_with(cone: &ConstraintSystem, alpha: &[f64], sym: &Symmetry) -> Result<PairCaps> {
    check_cone(cone)?;
    let n = cone.dim();
    sym.check_dim(n)?;
    if alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: alpha.len(),
        });
    }
    let mode = Mode::auto(n);
    let work: Vec<(usize, Vec<usize>)> = (0..n)
        .map(|i| {
            let js = (i + 1..n).filter(|&j| {
                let p = pair_index(n, i, j);
                sym.pair_rep[p] == p
            });
            (i, js.collect::<Vec<_>>())
        })
        .filter(|(_, js)| !js.is_empty())
        .collect();
    let rows: Vec<Vec<f64>> = work
        .par_iter()
        .map(|(i, js)| {
            let mut solver = AnySliceSolver::new(cone, mode)?;
            if !solver.is_feasible() {
                return Err(Error::Infeasible("the cone is {0}".into()));
            }
            let mut obj = vec![0.0; n];
            js.iter()
                .map(|&j| {
                    obj.iter_mut().for_each(|v| *v = 0.0);
                    obj[*i] = 1.0;
                    obj[j] = 1.0;
                    optimum(solver.solve(&obj, Direction::Maximize)?)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut value = vec![f64::NAN; n * (n + 1) / 2];
    for ((i, js), vals) in work.iter().zip(rows) {
        for (&j, v) in js.iter().zip(vals) {
            value[pair_index(n, *i, j)] = v;
        }
    }
    Ok(PairCaps::from_fn(n, |i, j| {
        if i == j {
            2.0 * alpha[i]
        } else {
            value[sym.pair_rep[pair_index(n, i, j)]]
        }
    }))
}

/// `1 / box_max_norm(alpha, 1)`.
pub fn first_order_from_alpha(alpha: &[f64]) -> Result<f64> {
    Ok(1.0 / box_max_norm(alpha, &1.0)?.0)
}

pub fn first_order_bound(cone: &ConstraintSystem) -> Result<f64> {
    first_order_from_alpha(&compute_alpha(cone)?)
}

/// Sub-problem k of the second-order relaxation, with `x_k = t` fixed:
/// coordinate i != k is capped by `min(alpha_i, beta_ki - t, t)` and the
/// others must carry `1 - t`.
struct SubProblem<'a> {
    k: usize,
    alpha: &'a [f64],
    beta: &'a PairCaps,
    lo: f64,
    hi: f64,
    scratch: Vec<f64>,
}

impl<'a> SubProblem<'a> {
    fn new(k: usize, alpha: &'a [f64], beta: &'a PairCaps) -> Option<Self> {
        let n = alpha.len();
        let mut hi = alpha[k];
        for i in (0..n).filter(|&i| i != k) {
            hi = hi.min(beta.get(k, i));
        }
        let lo = 1.0 / n as f64;
        (lo <= hi + 1e-15).then(|| SubProblem {
            k,
            alpha,
            beta,
            lo,
            hi: hi.max(lo),
            scratch: Vec::with_capacity(n),
        })
    }

    /// Caps over `t in [t0, t1]`: each one maximized over the interval.
    fn fill_caps(&mut self, t0: f64, t1: f64) {
        self.scratch.clear();
        for i in 0..self.alpha.len() {
            if i != self.k {
                let c = self.alpha[i].min(self.beta.get(self.k, i) - t0).min(t1);
                self.scratch.push(c);
            }
        }
    }

    /// Exact objective at a single `t`; `None` when infeasible.
    fn value_at(&mut self, t: f64) -> Option<f64> {
        self.fill_caps(t, t);
        if self.scratch.iter().any(|&c| c < -1e-15) {
            return None;
        }
        self.scratch.iter_mut().for_each(|c| *c = c.max(0.0));
        self.scratch.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        sorted_box_value(&self.scratch, 1.0 - t).map(|v| t * t + v)
    }

    /// Upper bound on the objective over `t in [t0, t1]`. Caps only grow when
    /// relaxed to their interval maxima, `t^2 <= t1^2`, and the box value is
    /// nondecreasing in the budget, so the largest feasible budget is used.
    fn cell_bound(&mut self, t0: f64, t1: f64) -> Option<f64> {
        self.fill_caps(t0, t1);
        if self.scratch.iter().any(|&c| c < -1e-15) {
            return None;
        }
        self.scratch.iter_mut().for_each(|c| *c = c.max(0.0));
        let total: f64 = self.scratch.iter().sum();
        if total < 1.0 - t1 - 1e-15 {
            return None;
        }
        self.scratch.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        let budget = (1.0 - t0).min(total);
        sorted_box_value(&self.scratch, budget).map(|v| t1 * t1 + v)
    }

    /// Breakpoints where some cap switches its active term, plus a grid.
    fn initial_points(&self, grid: usize) -> Vec<f64> {
        let mut pts = vec![self.lo, self.hi];
        for i in (0..self.alpha.len()).filter(|&i| i != self.k) {
            let b = self.beta.get(self.k, i);
            pts.extend([self.alpha[i], b / 2.0, b - self.alpha[i]]);
        }
        let step = (self.hi - self.lo) / grid as f64;
        pts.extend((1..grid).map(|g| self.lo + g as f64 * step));
        pts.retain(|&t| t >= self.lo && t <= self.hi);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
        pts
    }
}

#[derive(PartialEq)]
struct Cell {
    bound: f64,
    t0: f64,
    t1: f64,
}

impl Eq for Cell {}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then(other.t0.total_cmp(&self.t0))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Relative gap at which the sweep of one sub-problem stops refining.
const SWEEP_REL_GAP: f64 = 1e-9;
const SWEEP_MAX_SPLITS: usize = 20_000;
const SWEEP_GRID: usize = 256;

/// Certified upper bound on `max |x|^2` for relaxed sub-problem `k` (the
/// largest coordinate is `x_k`), or `None` if it is infeasible. Branch and
/// bound over intervals of `x_k`: each interval carries a valid upper bound
/// and the interval with the largest bound is bisected until that bound is
/// within a relative gap of the best value attained.
pub fn second_order_subproblem(k: usize, alpha: &[f64], beta: &PairCaps) -> Option<f64> {
    let mut sp = SubProblem::new(k, alpha, beta)?;
    let pts = sp.initial_points(SWEEP_GRID);
    let mut best = f64::NEG_INFINITY;
    for &t in &pts {
        if let Some(v) = sp.value_at(t) {
            best = best.max(v);
        }
    }
    let mut heap = BinaryHeap::new();
    for w in pts.windows(2) {
        if let Some(b) = sp.cell_bound(w[0], w[1]) {
            heap.push(Cell {
                bound: b,
                t0: w[0],
                t1: w[1],
            });
        }
    }
    if pts.len() == 1 {
        return sp.value_at(pts[0]);
    }
    let mut splits = 0;
    while let Some(cell) = heap.pop() {
        let gap = cell.bound - best;
        if gap <= SWEEP_REL_GAP * best.abs() || splits >= SWEEP_MAX_SPLITS || cell.t1 - cell.t0 <= 1e-14 {
            return Some(cell.bound.max(best));
        }
        splits += 1;
        let mid = 0.5 * (cell.t0 + cell.t1);
        if let Some(v) = sp.value_at(mid) {
            best = best.max(v);
        }
        for (a, b) in [(cell.t0, mid), (mid, cell.t1)] {
            if let Some(bound) = sp.cell_bound(a, b) {
                heap.push(Cell { bound, t0: a, t1: b });
            }
        }
    }
    best.is_finite().then_some(best)
}

/// Lower bound `1 / max_k (sub-problem k)`; never below the first-order
/// bound since both relaxations contain the slice.
pub fn second_order_bound(alpha: &[f64], beta: &PairCaps) -> Result<f64> {
    let n = alpha.len();
    if beta.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: beta.dim(),
        });
    }
    let first = box_max_norm(alpha, &1.0)?.0;
    let per_k: Vec<Option<f64>> = (0..n)
        .into_par_iter()
        .map(|k| second_order_subproblem(k, alpha, beta))
        .collect();
    let worst = per_k.into_iter().flatten().fold(f64::NEG_INFINITY, f64::max);
    if !worst.is_finite() {
        return Err(Error::Infeasible("every sub-problem is infeasible".into()));
    }
    Ok(1.0 / worst.min(first))
}

/// Best feasible point found by the search and its pseudo-weight.
#[derive(Clone, Debug)]
pub struct UpperBound {
    pub pseudo_weight: f64,
    pub witness: PseudoCodeword,
    /// The witness was reconstructed as an exact rational vertex and checked
    /// against every cone inequality.
    pub verified: bool,
    pub restart: usize,
}

/// Multi-restart linearized norm ascent on `max |x|^2` over the slice.
/// Every step solves `max x_cur . x`, which cannot decrease `|x|^2` by
/// convexity; the fixed point is a vertex of the slice.
pub fn upper_bound_search(cone: &ConstraintSystem, restarts: usize, seed: u64) -> Result<UpperBound> {
    check_cone(cone)?;
    let n = cone.dim();
    let restarts = restarts.max(1);
    let runs: Vec<(f64, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|r| ascend_from_random_start(cone, seed, r))
        .collect::<Result<_>>()?;
    // Smallest pseudo-weight, ties to the earliest restart.
    let (restart, (_, point)) = runs
        .into_iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| b.0.total_cmp(&a.0))
        .expect("at least one restart");
    let exact = rationalize_vertex(cone, &point);
    let verified = exact.is_some();
    let vector = match exact {
        Some(v) => v,
        None => point
            .iter()
            .map(|&v| BigRational::from_float(v.max(0.0)).unwrap_or_else(BigRational::zero))
            .collect(),
    };
    let witness = PseudoCodeword::from_vector(vector, None)?;
    debug_assert_eq!(witness.vector().len(), n);
    Ok(UpperBound {
        pseudo_weight: witness.pseudo_weight(),
        witness,
        verified,
        restart,
    })
}

/// Returns `(|x|^2, x)` at the fixed point reached from restart `r`.
fn ascend_from_random_start(cone: &ConstraintSystem, seed: u64, r: usize) -> Result<(f64, Vec<f64>)> {
    let n = cone.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    let mut solver = FloatSliceSolver::new(cone)?;
    if !solver.is_feasible() {
        return Err(Error::Infeasible("the cone is {0}".into()));
    }
    // Start at the vertex maximizing a random objective concentrated near a
    // few coordinates, which favours points of large norm.
    let focus: Vec<usize> = (0..1 + r % 3).map(|_| rng.random_range(0..n)).collect();
    let mut obj: Vec<f64> = (0..n).map(|_| 0.05 * rng.random::<f64>()).collect();
    for &i in &focus {
        obj[i] += 1.0;
    }
    let mut x = point_of(solver.solve(&obj, Direction::Maximize)?)?;
    let mut norm = norm2(&x);
    for _ in 0..10 * n {
        let next = point_of(solver.solve(&x, Direction::Maximize)?)?;
        let next_norm = norm2(&next);
        if next_norm <= norm * (1.0 + 1e-12) {
            break;
        }
        x = next;
        norm = next_norm;
    }
    Ok((norm, x))
}

fn point_of(res: crate::linprog::LpResult) -> Result<Vec<f64>> {
    match res.status {
        LpStatus::Optimal => Ok(res.point.expect("optimal")),
        s => Err(Error::Numerical(format!("ascent LP not optimal: {s:?}"))),
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Recovers the exact vertex near a float point from the constraints it
/// makes tight, then verifies it. `None` if the tight set does not pin down a
/// unique feasible point.
pub fn rationalize_vertex(cone: &ConstraintSystem, x: &[f64]) -> Option<Vec<BigRational>> {
    const TIGHT: f64 = 1e-9;
    let n = cone.dim();
    let support: Vec<usize> = (0..n).filter(|&i| x[i] > TIGHT).collect();
    let pos: Vec<Option<usize>> = {
        let mut p = vec![None; n];
        for (k, &i) in support.iter().enumerate() {
            p[i] = Some(k);
        }
        p
    };
    let m = support.len();
    // Equations over the support: tight cone rows, then sum = 1.
    let mut eqs: Vec<Vec<BigRational>> = Vec::new();
    for c in cone.non_bound_constraints() {
        if c.sense() != Sense::LessEq || c.violation_f64(x) > TIGHT || c.lhs_f64(x) < -TIGHT {
            continue;
        }
        let mut row = vec![BigRational::zero(); m + 1];
        for &(i, a) in c.terms() {
            if let Some(k) = pos[i] {
                row[k] = crate::polytope::to_big(a);
            }
        }
        if row.iter().any(|v| !v.is_zero()) {
            eqs.push(row);
        }
    }
    let mut sum = vec![BigRational::from_integer(1.into()); m + 1];
    sum[m] = BigRational::from_integer(1.into());
    eqs.push(sum);
    let sol = solve_exact(eqs, m)?;
    let mut full = vec![BigRational::zero(); n];
    for (k, &i) in support.iter().enumerate() {
        full[i] = sol[k].clone();
    }
    if full.iter().any(Signed::is_negative) {
        return None;
    }
    cone.contains_exact(&full).ok()?.then_some(full)
}

/// Gaussian elimination on an augmented system; `None` unless the solution
/// is unique and consistent.
fn solve_exact(mut rows: Vec<Vec<BigRational>>, m: usize) -> Option<Vec<BigRational>> {
    let mut rank = 0;
    let mut pivot_cols = Vec::new();
    for col in 0..m {
        let p = (rank..rows.len()).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[m].is_zero()) {
        return None;
    }
    Some((0..m).map(|k| rows[k][m].clone()).collect())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StageTimings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_s: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub code: String,
    pub n: usize,
    pub column_weight_bound: Option<f64>,
    pub first_order: f64,
    pub second_order: Option<f64>,
    pub upper: Option<UpperBound>,
    pub caps: BoxCaps,
    pub timings: StageTimings,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundOptions {
    pub second_order: bool,
    pub upper_restarts: Option<usize>,
    pub seed: u64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            second_order: true,
            upper_restarts: None,
            seed: 0,
        }
    }
}

/// Runs every requested stage for one code.
pub fn bound_report(
    code: &str,
    h: &ParityCheckMatrix,
    automorphisms: &[Vec<usize>],
    opts: &BoundOptions,
) -> Result<BoundReport> {
    use std::time::Instant;
    let cone = crate::polytope::fundamental_cone(h);
    let sym = Symmetry::new(h, automorphisms)?;
    let mut timings = StageTimings::default();
    let t = Instant::now();
    let alpha = compute_alpha_with(&cone, &sym)?;
    timings.alpha_s = Some(t.elapsed().as_secs_f64());
    let first_order = first_order_from_alpha(&alpha)?;
    let (second_order, beta) = if opts.second_order {
        let t = Instant::now();
        let beta = compute_beta_with(&cone, &alpha, &sym)?;
        timings.beta_s = Some(t.elapsed().as_secs_f64());
        let t = Instant::now();
        let s = second_order_bound(&alpha, &beta)?;
        timings.sweep_s = Some(t.elapsed().as_secs_f64());
        (Some(s), Some(beta))
    } else {
        (None, None)
    };
    let upper = match opts.upper_restarts {
        Some(r) => {
            let t = Instant::now();
            let u = upper_bound_search(&cone, r, opts.seed)?;
            timings.upper_s = Some(t.elapsed().as_secs_f64());
            Some(u)
        }
        None => None,
    };
    Ok(BoundReport {
        code: code.to_string(),
        n: h.cols(),
        column_weight_bound: column_weight_bound(h),
        first_order,
        second_order,
        upper,
        caps: BoxCaps { alpha, beta },
        timings,
    })
}

impl BoundReport {
    /// JSON document; timings only when requested.
    pub fn to_json(&self, with_timings: bool) -> serde_json::Value {
        use crate::report::round_sig6;
        use serde_json::json;
        let opt = |v: Option<f64>| v.map(round_sig6);
        let witness: Option<Vec<String>> = self
            .upper
            .as_ref()
            .map(|u| u.witness.vector().iter().map(crate::linprog::format_rational).collect());
        let timings = if with_timings {
            serde_json::to_value(&self.timings).expect("serializable")
        } else {
            json!({})
        };
        json!({
            "code": self.code,
            "n": self.n,
            "bounds": {
                "cw": opt(self.column_weight_bound),
                "first": round_sig6(self.first_order),
                "second": opt(self.second_order),
                "upper": opt(self.upper.as_ref().map(|u| u.pseudo_weight)),
            },
            "witness_verified": self.upper.as_ref().map(|u| u.verified),
            "alpha": self.caps.alpha.iter().map(|&a| round_sig6(a)).collect::<Vec<_>>(),
            "witness": witness,
            "timings": timings,
        })
    }

    pub const CSV_HEADER: &'static str = "code,n,cw,first,second,upper";

    pub fn to_csv_row(&self) -> String {
        use crate::report::sig6;
        let opt = |v: Option<f64>| v.map(sig6).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.code,
            self.n,
            opt(self.column_weight_bound),
            sig6(self.first_order),
            opt(self.second_order),
            opt(self.upper.as_ref().map(|u| u.pseudo_weight)),
        )
    }
}

/// One exchange step from the greedy-optimality argument: move mass from
/// the last positive coordinate `m` to the first unsaturated one `k` (caps
/// sorted descending). Returns `None` at the greedy fixed point.
pub fn exchange_step(alpha: &[f64], x: &[f64]) -> Option<Vec<f64>> {
    let k = (0..x.len()).find(|&i| x[i] < alpha[i])?;
    let m = (0..x.len()).rev().find(|&i| x[i] > 0.0)?;
    if m <= k {
        return None;
    }
    let mut y = x.to_vec();
    let room = alpha[k] - x[k];
    if room <= x[m] {
        y[k] = alpha[k];
        y[m] = x[m] - room;
    } else {
        y[k] = x[k] + x[m];
        y[m] = 0.0;
    }
    Some(y)
}

/// Exact value of `1/p` for a rational vector normalized to sum one.
pub fn max_norm_value(x: &[BigRational]) -> f64 {
    x.iter()
        .fold(BigRational::zero(), |a, b| a + b * b)
        .to_f64()
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{hamming_code, tanner_group_code};
    use crate::polytope::fundamental_cone;
    use num_rational::Rational64;

    fn single_row(w: usize) -> ParityCheckMatrix {
        ParityCheckMatrix::from_rows(&[vec![1; w]]).unwrap()
    }

    #[test]
    fn column_weight_examples() {
        assert_eq!(column_weight_bound(&single_row(3)), Some(2.0));
        assert_eq!(column_weight_bound(&hamming_code(3).unwrap()), None);
        assert_eq!(column_weight_bound(&tanner_group_code(31).unwrap()), Some(4.0));
    }

    #[test]
    fn box_max_norm_examples() {
        let (v, x) = box_max_norm(&[0.6, 0.5, 0.3], &1.0).unwrap();
        assert!((v - 0.52).abs() < 1e-15);
        assert!((x[0] - 0.6).abs() < 1e-15 && (x[1] - 0.4).abs() < 1e-15 && x[2] == 0.0);

        let (v, x) = box_max_norm(&[1.0; 5], &1.0).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(x, vec![1.0, 0.0, 0.0, 0.0, 0.0]);

        let (v, _) = box_max_norm(&[0.25; 8], &1.0).unwrap();
        assert_eq!(v, 0.25);

        let q = |p, d| Rational64::new(p, d);
        let (v, _) = box_max_norm(&[q(3, 5), q(1, 2), q(3, 10)], &q(1, 1)).unwrap();
        assert_eq!(v, q(13, 25));

        assert!(matches!(box_max_norm(&[0.2, 0.3], &1.0), Err(Error::Infeasible(_))));
        assert!(box_max_norm(&[-0.2, 1.3], &1.0).is_err());
    }

    #[test]
    fn sorted_value_matches_generic() {
        let caps = [0.5, 0.4, 0.4, 0.1];
        assert!((sorted_box_value(&caps, 1.0).unwrap() - box_max_norm(&caps, &1.0).unwrap().0).abs() < 1e-15);
        assert_eq!(sorted_box_value(&caps, 2.0), None);
        assert_eq!(sorted_box_value(&caps, 0.0), Some(0.0));
    }

    #[test]
    fn alpha_small_cases() {
        assert_eq!(
            compute_alpha(&fundamental_cone(&single_row(2))).unwrap(),
            vec![0.5, 0.5]
        );
        assert_eq!(compute_alpha(&fundamental_cone(&single_row(3))).unwrap(), vec![0.5; 3]);
    }

    #[test]
    fn first_order_single_check() {
        let b = first_order_bound(&fundamental_cone(&single_row(3))).unwrap();
        assert_eq!(b, 2.0);
    }

    #[test]
    fn beta_small_cases() {
        let k = fundamental_cone(&single_row(2));
        let alpha = compute_alpha(&k).unwrap();
        assert_eq!(compute_beta(&k, &alpha).unwrap().get(0, 1), 1.0);
        let k = fundamental_cone(&single_row(3));
        let alpha = compute_alpha(&k).unwrap();
        let beta = compute_beta(&k, &alpha).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(beta.get(i, j), 1.0);
                    assert!(beta.get(i, j) <= (alpha[i] + alpha[j]).min(1.0) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn second_order_at_least_first_order() {
        for h in [single_row(3), single_row(4), hamming_code(3).unwrap()] {
            let k = fundamental_cone(&h);
            let alpha = compute_alpha(&k).unwrap();
            let beta = compute_beta(&k, &alpha).unwrap();
            let first = first_order_from_alpha(&alpha).unwrap();
            let second = second_order_bound(&alpha, &beta).unwrap();
            assert!(second >= first - 1e-9, "{second} < {first}");
        }
    }

    #[test]
    fn upper_bound_on_hamming_reaches_three() {
        let k = fundamental_cone(&hamming_code(3).unwrap());
        let ub = upper_bound_search(&k, 20, 1).unwrap();
        assert!(ub.verified);
        assert!((ub.pseudo_weight - 3.0).abs() < 1e-12, "{}", ub.pseudo_weight);
        assert!(k.contains_exact(ub.witness.vector()).unwrap());
    }

    #[test]
    fn exchange_step_never_decreases_norm() {
        let alpha = [0.5, 0.3, 0.2, 0.2];
        let mut x = vec![0.25, 0.25, 0.25, 0.25];
        let mut steps = 0;
        while let Some(y) = exchange_step(&alpha, &x) {
            assert!(norm2(&y) >= norm2(&x) - 1e-15);
            x = y;
            steps += 1;
        }
        assert!(steps > 0);
        assert!((norm2(&x) - box_max_norm(&alpha, &1.0).unwrap().0).abs() < 1e-12);
    }

    #[test]
    fn pair_caps_indexing() {
        let p = PairCaps::from_fn(4, |i, j| (10 * i + j) as f64);
        assert_eq!(p.get(1, 3), 13.0);
        assert_eq!(p.get(3, 1), 13.0);
        assert_eq!(p.get(2, 2), 22.0);
    }
}
