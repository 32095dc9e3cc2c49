//! Dense two-phase tableau simplex over exact rationals or `f64`.
//!
//! All variables are nonnegative (every [`ConstraintSystem`] carries the
//! nonnegativity rows, which become variable bounds here). Pivoting uses
//! Dantzig pricing with a permanent switch to Bland's rule after a run of
//! degenerate pivots, so the pivot sequence is a pure function of the input.
//!
//! In float mode the ratio test runs on a guide right-hand side in which
//! every inequality is relaxed by a small, fixed, row-dependent amount. This
//! breaks the massive degeneracy at the apex of a cone. The answer is read
//! from the unperturbed right-hand side, which is carried through every
//! pivot; if it ends up infeasible, dual simplex pivots repair it.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::polytope::{to_big, ConstraintSystem, LinearConstraint, Sense, SystemKind};

/// Pivot and reduced-cost tolerance in float mode.
const FLOAT_EPS: f64 = 1e-9;
/// Entries below this magnitude are flushed to zero after a float pivot.
const FLUSH: f64 = 1e-13;
/// Relative KKT residual accepted in float mode.
pub const FLOAT_RESIDUAL: f64 = 1e-8;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 64;
/// Scale of the guide perturbation in float mode.
const GUIDE_SCALE: f64 = 1e-6;

/// Problems up to this many variables are solved exactly by [`Mode::auto`].
pub const EXACT_MAX_VARS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn auto(n: usize) -> Mode {
        if n <= EXACT_MAX_VARS {
            Mode::Exact
        } else {
            Mode::Float
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

/// Optimal value and point; `exact` is populated in exact mode.
#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    pub optimum: Option<f64>,
    pub point: Option<Vec<f64>>,
    pub exact_optimum: Option<BigRational>,
    pub exact_point: Option<Vec<BigRational>>,
    pub pivots: usize,
}

impl LpResult {
    fn without_point(status: LpStatus, pivots: usize) -> Self {
        LpResult {
            status,
            optimum: None,
            point: None,
            exact_optimum: None,
            exact_point: None,
            pivots,
        }
    }
}

/// Optimize a linear objective over a constraint system plus extra rows.
#[derive(Clone, Debug)]
pub struct LpProblem<'a> {
    pub system: &'a ConstraintSystem,
    pub extra: Vec<LinearConstraint>,
    pub objective: Vec<f64>,
    pub direction: Direction,
}

impl<'a> LpProblem<'a> {
    pub fn new(system: &'a ConstraintSystem, objective: Vec<f64>, direction: Direction) -> Self {
        LpProblem {
            system,
            extra: Vec::new(),
            objective,
            direction,
        }
    }

    pub fn with_constraint(mut self, c: LinearConstraint) -> Self {
        self.extra.push(c);
        self
    }

    /// Adds the normalization `sum x_i = 1`.
    pub fn normalized(self) -> Self {
        let n = self.system.dim();
        self.with_constraint(sum_to_one(n))
    }

    fn validate(&self) -> Result<()> {
        let n = self.system.dim();
        if n == 0 {
            return Err(Error::InvalidArgument("no variables".into()));
        }
        if self.objective.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.objective.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("objective must be finite".into()));
        }
        if let Some(c) = self.extra.iter().find(|c| c.max_index() >= n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.max_index() + 1,
            });
        }
        Ok(())
    }

    fn rows(&self) -> impl Iterator<Item = &LinearConstraint> {
        self.system.non_bound_constraints().chain(self.extra.iter())
    }
}

pub fn sum_to_one(n: usize) -> LinearConstraint {
    LinearConstraint::from_ints((0..n).map(|i| (i, 1)), 1, Sense::Eq).expect("nonzero")
}

pub fn solve(problem: &LpProblem, mode: Mode) -> Result<LpResult> {
    problem.validate()?;
    match mode {
        Mode::Exact => {
            let mut t = Tableau::<BigRational>::build(problem)?;
            let res = t.run_both_phases(&problem.objective, problem.direction)?;
            t.finish_exact(res, problem)
        }
        Mode::Float => {
            let mut t = Tableau::<f64>::build(problem)?;
            let res = t.run_both_phases(&problem.objective, problem.direction)?;
            t.finish_float(res, problem)
        }
    }
}

/// True iff `gamma . x >= 0` on the whole cone, decided on the slice
/// `sum x = 1` (a cone containing only the origin passes trivially).
pub fn is_nonnegative_over_cone(cone: &ConstraintSystem, gamma: &[f64], tol: f64) -> Result<bool> {
    if cone.kind() != SystemKind::Cone {
        return Err(Error::InvalidArgument("expected a cone system".into()));
    }
    let lp = LpProblem::new(cone, gamma.to_vec(), Direction::Minimize).normalized();
    let res = solve(&lp, Mode::Float)?;
    let scale = gamma.iter().fold(0.0f64, |m, g| m.max(g.abs())).max(f64::MIN_POSITIVE);
    Ok(match res.status {
        LpStatus::Infeasible => true,
        LpStatus::Unbounded => false,
        LpStatus::Optimal => res.optimum.expect("optimal") >= -tol * scale,
    })
}

/// Field operations the tableau needs. Sign tests are tolerance-based for
/// `f64` and exact for rationals.
pub trait Scalar: Clone + Debug + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(r: Rational64) -> Self;
    fn from_f64(x: f64) -> Result<Self>;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn neg(&self) -> Self;
    fn mul(&self, b: &Self) -> Self;
    fn div(&self, b: &Self) -> Self;
    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Self, b: &Self);
    fn flush(&mut self) {}
    /// Feasibility tolerance of the two-pass ratio test; `None` selects the
    /// plain minimum-ratio test.
    fn harris_tolerance() -> Option<f64> {
        None
    }
    /// Relaxation added to inequality row `r` of the guide right-hand side.
    fn guide_offset(_r: usize) -> Option<Self> {
        None
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(r: Rational64) -> Self {
        *r.numer() as f64 / *r.denom() as f64
    }
    fn from_f64(x: f64) -> Result<Self> {
        Ok(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_EPS
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_EPS
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn mul(&self, b: &Self) -> Self {
        self * b
    }
    fn div(&self, b: &Self) -> Self {
        self / b
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn flush(&mut self) {
        if self.abs() < FLUSH {
            *self = 0.0;
        }
    }
    fn harris_tolerance() -> Option<f64> {
        Some(FLOAT_EPS)
    }
    fn guide_offset(r: usize) -> Option<Self> {
        // Fixed pseudo-random multiplier in [1, 2).
        let h = (r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11;
        Some(GUIDE_SCALE * (1.0 + h as f64 / (1u64 << 53) as f64))
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(r: Rational64) -> Self {
        to_big(r)
    }
    fn from_f64(x: f64) -> Result<Self> {
        <BigRational as FromPrimitive>::from_f64(x).ok_or_else(|| Error::InvalidArgument(format!("{x} is not finite")))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, b: &Self) -> Self {
        self * b
    }
    fn div(&self, b: &Self) -> Self {
        self / b
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

/// Standard-form tableau `[A | g | b]` with basis bookkeeping. Columns are
/// the `n` structural variables, then one slack/surplus per inequality row,
/// then artificials, then the guide right-hand side `g` and the true one `b`.
pub(crate) struct Tableau<T> {
    n: usize,
    width: usize,
    rows: Vec<Vec<T>>,
    cost: Vec<T>,
    basis: Vec<usize>,
    /// Columns barred from entering (artificials after phase one).
    barred: Vec<bool>,
    artificial_start: usize,
    pivots: usize,
    bland: bool,
    max_pivots: usize,
    /// Whether `g` differs from `b`.
    guided: bool,
}

enum Outcome {
    Optimal,
    Unbounded,
    Infeasible,
}

impl<T: Scalar> Tableau<T> {
    fn build(problem: &LpProblem) -> Result<Self> {
        let n = problem.system.dim();
        let rows_in: Vec<&LinearConstraint> = problem.rows().collect();
        let m = rows_in.len();
        let n_slack = rows_in.iter().filter(|c| c.sense() == Sense::LessEq).count();
        // Artificial needed for equalities and for inequalities with negative rhs.
        let n_art = rows_in
            .iter()
            .filter(|c| c.sense() == Sense::Eq || c.rhs() < Rational64::zero())
            .count();
        let artificial_start = n + n_slack;
        let width = artificial_start + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut slack, mut art) = (n, artificial_start);
        let guided = T::guide_offset(0).is_some();
        for (r, c) in rows_in.into_iter().enumerate() {
            let flip = c.rhs() < Rational64::zero();
            let sign = |v: T| if flip { v.neg() } else { v };
            let mut row = vec![T::zero(); width + 2];
            for &(j, a) in c.terms() {
                row[j] = sign(T::from_ratio(a));
            }
            let b = T::from_ratio(c.rhs());
            let mut g = b.clone();
            if c.sense() == Sense::LessEq {
                if let Some(d) = T::guide_offset(r) {
                    g.sub_mul(&d, &T::one().neg());
                }
            }
            row[width] = sign(g);
            row[width + 1] = sign(b);
            if c.sense() == Sense::LessEq {
                row[slack] = sign(T::one());
                if !flip {
                    basis.push(slack);
                }
                slack += 1;
            }
            if c.sense() == Sense::Eq || flip {
                row[art] = T::one();
                basis.push(art);
                art += 1;
            }
            rows.push(row);
        }
        Ok(Tableau {
            n,
            width,
            rows,
            cost: vec![T::zero(); width + 2],
            basis,
            barred: vec![false; width],
            artificial_start,
            pivots: 0,
            bland: false,
            max_pivots: 50 * (m + width) + 1000,
            guided,
        })
    }

    fn run_both_phases(&mut self, objective: &[f64], direction: Direction) -> Result<Outcome> {
        if self.artificial_start < self.width {
            // Phase one: minimize the sum of artificials.
            let mut c = vec![T::zero(); self.width];
            for v in c.iter_mut().skip(self.artificial_start) {
                *v = T::one();
            }
            self.set_cost(&c);
            self.bland = false;
            self.iterate()?;
            if !self.repair()? || self.cost[self.width + 1].is_neg() {
                return Ok(Outcome::Infeasible);
            }
            self.evict_artificials();
            for j in self.artificial_start..self.width {
                self.barred[j] = true;
            }
        }
        self.optimize(objective, direction)
    }

    /// Phase two from the current (feasible) basis.
    fn optimize(&mut self, objective: &[f64], direction: Direction) -> Result<Outcome> {
        let mut c = vec![T::zero(); self.width];
        for (j, &v) in objective.iter().enumerate() {
            let v = T::from_f64(v)?;
            c[j] = match direction {
                Direction::Minimize => v,
                Direction::Maximize => v.neg(),
            };
        }
        self.set_cost(&c);
        self.bland = false;
        self.reguide();
        Ok(match self.iterate()? {
            PhaseOutcome::Optimal => {
                if !self.repair()? {
                    return Err(Error::Numerical("lost primal feasibility".into()));
                }
                Outcome::Optimal
            }
            PhaseOutcome::Unbounded => Outcome::Unbounded,
        })
    }

    /// Resets the guide to the true right-hand side plus fresh offsets, so
    /// the current basis is strictly feasible for the guide.
    fn reguide(&mut self) {
        if !self.guided {
            return;
        }
        for (r, row) in self.rows.iter_mut().enumerate() {
            let b = row[self.width + 1].to_f64().max(0.0);
            let d = T::guide_offset(r).expect("guided").to_f64();
            row[self.width] = T::from_f64(b + d).expect("finite");
        }
    }

    /// Dual simplex on the true right-hand side from a dual-feasible basis.
    /// Returns false if the true problem is infeasible.
    fn repair(&mut self) -> Result<bool> {
        if !self.guided {
            return Ok(true);
        }
        let b = self.width + 1;
        let start = self.pivots;
        loop {
            let mut leave: Option<usize> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[b].is_neg() && leave.is_none_or(|l| row[b] < self.rows[l][b]) {
                    leave = Some(r);
                }
            }
            let Some(r) = leave else {
                return Ok(true);
            };
            let mut enter: Option<(usize, f64)> = None;
            for j in (0..self.width).filter(|&j| !self.barred[j]) {
                let a = &self.rows[r][j];
                if !a.is_neg() {
                    continue;
                }
                let ratio = self.cost[j].to_f64().max(0.0) / -a.to_f64();
                if enter.is_none_or(|(_, best)| ratio < best) {
                    enter = Some((j, ratio));
                }
            }
            let Some((q, _)) = enter else {
                return Ok(false);
            };
            self.pivot(r, q);
            if self.pivots - start > self.max_pivots {
                return Err(Error::Numerical(format!("simplex exceeded {} pivots", self.max_pivots)));
            }
        }
    }

    /// Reduced costs `c_j - c_B B^-1 A_j`; the rhs slot holds `-c_B x_B`.
    fn set_cost(&mut self, c: &[T]) {
        let mut cost: Vec<T> = c.to_vec();
        cost.extend([T::zero(), T::zero()]);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = c[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (dst, a) in cost.iter_mut().zip(&self.rows[r]) {
                if !a.is_zero() {
                    dst.sub_mul(&cb, a);
                }
            }
        }
        self.cost = cost;
    }

    fn entering(&self) -> Option<usize> {
        let candidates = (0..self.width).filter(|&j| !self.barred[j] && self.cost[j].is_neg());
        if self.bland {
            return candidates.into_iter().next();
        }
        let mut best: Option<usize> = None;
        for j in candidates {
            if best.is_none_or(|b| self.cost[j] < self.cost[b]) {
                best = Some(j);
            }
        }
        best
    }

    /// Leaving row for entering column `q`.
    fn leaving(&self, q: usize) -> Option<usize> {
        match T::harris_tolerance() {
            Some(tol) if !self.bland => self.leaving_harris(q, tol),
            _ => self.leaving_min_ratio(q),
        }
    }

    /// Two-pass ratio test: bound the step using right-hand sides relaxed by
    /// `tol`, then take the largest pivot element among rows within it.
    fn leaving_harris(&self, q: usize, tol: f64) -> Option<usize> {
        let w = self.width;
        let mut limit = f64::INFINITY;
        for row in &self.rows {
            let a = row[q].to_f64();
            if row[q].is_pos() {
                limit = limit.min((row[w].to_f64().max(0.0) + tol) / a);
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            let a = row[q].to_f64();
            if !row[q].is_pos() || row[w].to_f64().max(0.0) / a > limit {
                continue;
            }
            let better = match best {
                None => true,
                Some((br, ba)) => a > ba || (a == ba && self.basis[r] < self.basis[br]),
            };
            if better {
                best = Some((r, a));
            }
        }
        best.map(|(r, _)| r)
    }

    /// Minimum-ratio row; ties go to the smallest basic variable index.
    fn leaving_min_ratio(&self, q: usize) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            let a = &row[q];
            if !a.is_pos() {
                continue;
            }
            let ratio = row[self.width].div(a);
            best = match best {
                None => Some((r, ratio)),
                Some((br, bratio)) => {
                    let diff = {
                        let mut d = ratio.clone();
                        d.sub_mul(&T::one(), &bratio);
                        d
                    };
                    if diff.is_neg() || (diff.is_zero() && self.basis[r] < self.basis[br]) {
                        Some((r, ratio))
                    } else {
                        Some((br, bratio))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn iterate(&mut self) -> Result<PhaseOutcome> {
        let mut degenerate_run = 0;
        let start = self.pivots;
        loop {
            let Some(q) = self.entering() else {
                return Ok(PhaseOutcome::Optimal);
            };
            let Some(r) = self.leaving(q) else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if self.rows[r][self.width].is_zero() {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_RUN {
                    self.bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q);
            if self.pivots - start > self.max_pivots {
                return Err(Error::Numerical(format!("simplex exceeded {} pivots", self.max_pivots)));
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        self.pivots += 1;
        let inv = T::one().div(&self.rows[r][q]);
        let mut prow = std::mem::take(&mut self.rows[r]);
        let zero = T::zero();
        for v in prow.iter_mut() {
            if *v != zero {
                *v = v.mul(&inv);
            }
        }
        prow[q] = T::one();
        let nz: Vec<usize> = (0..self.width + 2).filter(|&j| prow[j] != T::zero()).collect();
        let eliminate = |row: &mut Vec<T>| {
            let f = row[q].clone();
            if f == T::zero() {
                return;
            }
            for &j in &nz {
                row[j].sub_mul(&f, &prow[j]);
                row[j].flush();
            }
            row[q] = T::zero();
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[r] = prow;
        self.basis[r] = q;
    }

    /// Pivots basic artificials out after phase one; rows where that is
    /// impossible are redundant and dropped.
    fn evict_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.artificial_start {
                let col = (0..self.artificial_start).find(|&j| !self.rows[r][j].is_zero());
                match col {
                    Some(j) => self.pivot(r, j),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    fn primal(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rows[r][self.width + 1].clone();
            }
        }
        x
    }

    fn finish_exact(&self, outcome: Outcome, problem: &LpProblem) -> Result<LpResult>
    where
        T: Into<BigRational>,
    {
        match outcome {
            Outcome::Infeasible => Ok(LpResult::without_point(LpStatus::Infeasible, self.pivots)),
            Outcome::Unbounded => Ok(LpResult::without_point(LpStatus::Unbounded, self.pivots)),
            Outcome::Optimal => {
                let x: Vec<BigRational> = self.primal().into_iter().map(Into::into).collect();
                let mut opt = <BigRational as Zero>::zero();
                for (xi, &c) in x.iter().zip(&problem.objective) {
                    opt += xi * <BigRational as FromPrimitive>::from_f64(c).expect("finite objective");
                }
                Ok(LpResult {
                    status: LpStatus::Optimal,
                    optimum: Some(ToPrimitive::to_f64(&opt).unwrap_or(f64::NAN)),
                    point: Some(x.iter().map(|v| ToPrimitive::to_f64(v).unwrap_or(f64::NAN)).collect()),
                    exact_optimum: Some(opt),
                    exact_point: Some(x),
                    pivots: self.pivots,
                })
            }
        }
    }

    fn finish_float(&self, outcome: Outcome, problem: &LpProblem) -> Result<LpResult> {
        match outcome {
            Outcome::Infeasible => Ok(LpResult::without_point(LpStatus::Infeasible, self.pivots)),
            Outcome::Unbounded => Ok(LpResult::without_point(LpStatus::Unbounded, self.pivots)),
            Outcome::Optimal => {
                let x: Vec<f64> = self.primal().iter().map(|v| v.to_f64().max(0.0)).collect();
                self.check_residuals(&x, problem)?;
                let opt = x.iter().zip(&problem.objective).map(|(a, b)| a * b).sum();
                Ok(LpResult {
                    status: LpStatus::Optimal,
                    optimum: Some(opt),
                    point: Some(x),
                    exact_optimum: None,
                    exact_point: None,
                    pivots: self.pivots,
                })
            }
        }
    }

    /// Primal feasibility and dual feasibility (nonnegative reduced costs).
    fn check_residuals(&self, x: &[f64], problem: &LpProblem) -> Result<()> {
        if let Some(c) = problem.rows().find(|c| c.violation_f64(x) > FLOAT_RESIDUAL) {
            return Err(Error::Numerical(format!(
                "primal residual {:.3e} exceeds tolerance",
                c.violation_f64(x)
            )));
        }
        let scale = 1.0 + problem.objective.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if let Some(j) = (0..self.width).find(|&j| !self.barred[j] && self.cost[j].to_f64() < -FLOAT_RESIDUAL * scale) {
            return Err(Error::Numerical(format!("dual residual at column {j}")));
        }
        Ok(())
    }
}

/// Repeatedly optimizes different objectives over one fixed feasible
/// region `system ∩ {sum x = 1}`, restarting each solve from the previous
/// optimal basis.
pub struct SliceSolver<T> {
    tableau: Tableau<T>,
    feasible: bool,
    system: ConstraintSystem,
}

pub type FloatSliceSolver = SliceSolver<f64>;
pub type ExactSliceSolver = SliceSolver<BigRational>;

impl<T: Scalar> SliceSolver<T> {
    pub fn new(system: &ConstraintSystem) -> Result<Self> {
        let lp = LpProblem::new(system, vec![0.0; system.dim()], Direction::Minimize).normalized();
        let mut tableau = Tableau::<T>::build(&lp)?;
        let feasible = !matches!(
            tableau.run_both_phases(&lp.objective, Direction::Minimize)?,
            Outcome::Infeasible
        );
        Ok(SliceSolver {
            tableau,
            feasible,
            system: system.clone(),
        })
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    pub fn pivots(&self) -> usize {
        self.tableau.pivots
    }

    fn run(&mut self, objective: &[f64], direction: Direction) -> Result<Option<Outcome>> {
        if objective.len() != self.tableau.n {
            return Err(Error::DimensionMismatch {
                expected: self.tableau.n,
                got: objective.len(),
            });
        }
        if !self.feasible {
            return Ok(None);
        }
        Ok(Some(self.tableau.optimize(objective, direction)?))
    }
}

impl SliceSolver<f64> {
    pub fn solve(&mut self, objective: &[f64], direction: Direction) -> Result<LpResult> {
        let pivots_before = self.tableau.pivots;
        let outcome = match self.run(objective, direction)? {
            None => return Ok(LpResult::without_point(LpStatus::Infeasible, 0)),
            Some(o) => o,
        };
        let lp = LpProblem::new(&self.system, objective.to_vec(), direction).normalized();
        let mut res = self.tableau.finish_float(outcome, &lp)?;
        res.pivots -= pivots_before;
        Ok(res)
    }
}

impl SliceSolver<BigRational> {
    pub fn solve(&mut self, objective: &[f64], direction: Direction) -> Result<LpResult> {
        let pivots_before = self.tableau.pivots;
        let outcome = match self.run(objective, direction)? {
            None => return Ok(LpResult::without_point(LpStatus::Infeasible, 0)),
            Some(o) => o,
        };
        let lp = LpProblem::new(&self.system, objective.to_vec(), direction).normalized();
        let mut res = self.tableau.finish_exact(outcome, &lp)?;
        res.pivots -= pivots_before;
        Ok(res)
    }
}

/// Maximizes `x_i` (or `x_i + x_j`) over the normalized cone slice in
/// whichever arithmetic `mode` selects.
pub enum AnySliceSolver {
    Exact(ExactSliceSolver),
    Float(FloatSliceSolver),
}

impl AnySliceSolver {
    pub fn new(system: &ConstraintSystem, mode: Mode) -> Result<Self> {
        Ok(match mode {
            Mode::Exact => AnySliceSolver::Exact(SliceSolver::new(system)?),
            Mode::Float => AnySliceSolver::Float(SliceSolver::new(system)?),
        })
    }

    pub fn solve(&mut self, objective: &[f64], direction: Direction) -> Result<LpResult> {
        match self {
            AnySliceSolver::Exact(s) => s.solve(objective, direction),
            AnySliceSolver::Float(s) => s.solve(objective, direction),
        }
    }

    pub fn is_feasible(&self) -> bool {
        match self {
            AnySliceSolver::Exact(s) => s.is_feasible(),
            AnySliceSolver::Float(s) => s.is_feasible(),
        }
    }
}

/// Exact rational as `p/q` text (integers without the denominator).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom() == &BigInt::one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
