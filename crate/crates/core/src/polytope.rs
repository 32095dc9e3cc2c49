//! Fundamental polytope and fundamental cone of a parity-check matrix.
//!
//! Every check h with support U(h) contributes, for each odd-size V ⊆ U(h),
//! the inequality `sum_{i in V} x_i - sum_{i in U(h)\V} x_i <= |V| - 1`.
//! The cone keeps only the inequalities active at the origin (|V| = 1) plus
//! nonnegativity.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::codes::ParityCheckMatrix;
use crate::error::{Error, Result};
use crate::generators::PseudoCodeword;

/// Default cap on the number of parity inequalities in a polytope.
pub const DEFAULT_MAX_CONSTRAINTS: usize = 1 << 20;

/// Default relative tolerance for float-mode membership tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    LessEq,
    Eq,
}

/// `sum coeff_i x_i (<= | =) rhs`, stored sparsely with indices ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    terms: Vec<(usize, Rational64)>,
    rhs: Rational64,
    sense: Sense,
}

impl LinearConstraint {
    pub fn new(mut terms: Vec<(usize, Rational64)>, rhs: Rational64, sense: Sense) -> Result<Self> {
        terms.retain(|(_, c)| !c.is_zero());
        terms.sort_by_key(|&(i, _)| i);
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("repeated variable in constraint".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidArgument("constraint has no nonzero coefficient".into()));
        }
        Ok(LinearConstraint { terms, rhs, sense })
    }

    /// Integer-coefficient constraint; used for all parity inequalities.
    pub fn from_ints(terms: impl IntoIterator<Item = (usize, i64)>, rhs: i64, sense: Sense) -> Result<Self> {
        Self::new(
            terms
                .into_iter()
                .map(|(i, c)| (i, Rational64::from_integer(c)))
                .collect(),
            Rational64::from_integer(rhs),
            sense,
        )
    }

    pub fn terms(&self) -> &[(usize, Rational64)] {
        &self.terms
    }

    pub fn rhs(&self) -> Rational64 {
        self.rhs
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn dense_coeffs(&self, n: usize) -> Vec<Rational64> {
        let mut v = vec![Rational64::zero(); n];
        for &(i, c) in &self.terms {
            v[i] = c;
        }
        v
    }

    /// True for `-x_i <= 0` alone.
    pub fn is_nonnegativity(&self) -> Option<usize> {
        match self.terms[..] {
            [(i, c)] if self.sense == Sense::LessEq && c.is_negative() && self.rhs.is_zero() => Some(i),
            _ => None,
        }
    }

    pub fn max_index(&self) -> usize {
        self.terms.last().map_or(0, |t| t.0)
    }

    pub fn lhs_exact(&self, x: &[BigRational]) -> BigRational {
        self.terms
            .iter()
            .map(|&(i, c)| &x[i] * to_big(c))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn lhs_f64(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, c)| x[i] * ratio_f64(c)).sum()
    }

    pub fn satisfied_exact(&self, x: &[BigRational]) -> bool {
        let lhs = self.lhs_exact(x);
        let rhs = to_big(self.rhs);
        match self.sense {
            Sense::LessEq => lhs <= rhs,
            Sense::Eq => lhs == rhs,
        }
    }

    /// Violation scaled by the magnitude of the terms involved.
    pub fn violation_f64(&self, x: &[f64]) -> f64 {
        let lhs = self.lhs_f64(x);
        let rhs = ratio_f64(self.rhs);
        let scale = 1.0
            + rhs.abs()
            + self
                .terms
                .iter()
                .map(|&(i, c)| (x[i] * ratio_f64(c)).abs())
                .sum::<f64>();
        let v = match self.sense {
            Sense::LessEq => lhs - rhs,
            Sense::Eq => (lhs - rhs).abs(),
        };
        v.max(0.0) / scale
    }
}

pub(crate) fn to_big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub(crate) fn ratio_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Polytope,
    Cone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    n: usize,
    constraints: Vec<LinearConstraint>,
    kind: SystemKind,
}

impl ConstraintSystem {
    pub fn new(n: usize, constraints: Vec<LinearConstraint>, kind: SystemKind) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| c.max_index() >= n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.max_index() + 1,
            });
        }
        let sys = ConstraintSystem { n, constraints, kind };
        let mut nonneg = vec![false; n];
        for i in sys.constraints.iter().filter_map(LinearConstraint::is_nonnegativity) {
            nonneg[i] = true;
        }
        if nonneg.iter().any(|&b| !b) {
            return Err(Error::InvalidArgument(
                "every coordinate needs a nonnegativity constraint".into(),
            ));
        }
        if kind == SystemKind::Cone && sys.constraints.iter().any(|c| !c.rhs.is_zero()) {
            return Err(Error::InvalidArgument(
                "cone constraints must have zero right-hand side".into(),
            ));
        }
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    /// Constraints other than plain nonnegativity.
    pub fn non_bound_constraints(&self) -> impl Iterator<Item = &LinearConstraint> {
        self.constraints.iter().filter(|c| c.is_nonnegativity().is_none())
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    pub fn contains_exact(&self, x: &[BigRational]) -> Result<bool> {
        self.check_dim(x.len())?;
        Ok(self.constraints.iter().all(|c| c.satisfied_exact(x)))
    }

    pub fn contains_rational(&self, x: &[Rational64]) -> Result<bool> {
        let big: Vec<BigRational> = x.iter().map(|&r| to_big(r)).collect();
        self.contains_exact(&big)
    }

    pub fn contains_f64(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(x.len())?;
        Ok(self.constraints.iter().all(|c| c.violation_f64(x) <= tol))
    }

    /// CDD-style H-representation (`b - A x >= 0` rows).
    pub fn to_ine(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "* {:?} of dimension {}", self.kind, self.n);
        let _ = writeln!(s, "H-representation");
        let lin: Vec<usize> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.sense == Sense::Eq)
            .map(|(i, _)| i + 1)
            .collect();
        if !lin.is_empty() {
            let idx: Vec<String> = lin.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "linearity {} {}", lin.len(), idx.join(" "));
        }
        let _ = writeln!(s, "begin");
        let _ = writeln!(s, " {} {} rational", self.constraints.len(), self.n + 1);
        for c in &self.constraints {
            let mut row = vec![Rational64::zero(); self.n + 1];
            row[0] = c.rhs;
            for &(i, a) in &c.terms {
                row[i + 1] = -a;
            }
            let cells: Vec<String> = row.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(s, " {}", cells.join(" "));
        }
        let _ = writeln!(s, "end");
        s
    }
}

/// Nonnegativity rows `-x_i <= 0`.
fn nonnegativity(n: usize) -> impl Iterator<Item = LinearConstraint> {
    (0..n).map(|i| LinearConstraint::from_ints([(i, -1)], 0, Sense::LessEq).expect("nonzero"))
}

pub fn fundamental_polytope(h: &ParityCheckMatrix) -> Result<ConstraintSystem> {
    fundamental_polytope_with_guard(h, DEFAULT_MAX_CONSTRAINTS)
}

/// Polytope inequalities in canonical order: rows in order, odd subsets V in
/// increasing bitmask order over the row support, then `x_i <= 1`, then
/// `x_i >= 0`.
pub fn fundamental_polytope_with_guard(h: &ParityCheckMatrix, max_constraints: usize) -> Result<ConstraintSystem> {
    let total = h.row_supports().iter().try_fold(0usize, |acc, s| {
        let w = s.len();
        if w > 40 {
            None
        } else {
            acc.checked_add(1usize << (w - 1))
        }
    });
    match total {
        Some(t) if t <= max_constraints => {}
        t => {
            return Err(Error::Guard {
                what: "polytope constraint count",
                limit: max_constraints,
                actual: t.unwrap_or(usize::MAX),
            })
        }
    }
    let n = h.cols();
    let mut constraints = Vec::new();
    for support in h.row_supports() {
        let w = support.len();
        for mask in 0u64..(1 << w) {
            let size = mask.count_ones() as i64;
            if size % 2 == 0 {
                continue;
            }
            let terms = support
                .iter()
                .enumerate()
                .map(|(b, &i)| (i, if mask >> b & 1 == 1 { 1 } else { -1 }));
            constraints.push(LinearConstraint::from_ints(terms, size - 1, Sense::LessEq)?);
        }
    }
    constraints.extend((0..n).map(|i| LinearConstraint::from_ints([(i, 1)], 1, Sense::LessEq).expect("nonzero")));
    constraints.extend(nonnegativity(n));
    ConstraintSystem::new(n, constraints, SystemKind::Polytope)
}

/// Cone inequalities `x_i <= sum_{j in U(h)\{i}} x_j` for every row h and
/// every i in U(h), then `x_i >= 0`.
pub fn fundamental_cone(h: &ParityCheckMatrix) -> ConstraintSystem {
    let n = h.cols();
    let mut constraints = Vec::new();
    for support in h.row_supports() {
        for &i in support {
            let terms = support.iter().map(|&j| (j, if j == i { 1 } else { -1 }));
            constraints.push(LinearConstraint::from_ints(terms, 0, Sense::LessEq).expect("nonzero"));
        }
    }
    constraints.extend(nonnegativity(n));
    ConstraintSystem::new(n, constraints, SystemKind::Cone).expect("well-formed cone")
}

pub fn polytope_contains(system: &ConstraintSystem, x: &[Rational64]) -> Result<bool> {
    system.contains_rational(x)
}

/// Membership of `x` in the fundamental cone of `h`.
pub fn cone_scaling_link(h: &ParityCheckMatrix, x: &[Rational64]) -> Result<bool> {
    fundamental_cone(h).contains_rational(x)
}

/// A scale factor bringing a cone point into the polytope: `1/(n max_i x_i)`
/// makes every inequality with |V| >= 2 slack and keeps the box, while the
/// |V| = 1 inequalities are scale-invariant. Returns `None` for x outside K.
pub fn polytope_scale_for(h: &ParityCheckMatrix, x: &[Rational64]) -> Result<Option<Rational64>> {
    if !cone_scaling_link(h, x)? {
        return Ok(None);
    }
    let max = x.iter().copied().max().unwrap_or_else(Rational64::zero);
    if max.is_zero() {
        return Ok(Some(Rational64::one()));
    }
    Ok(Some(
        Rational64::one() / (max * Rational64::from_integer(h.cols() as i64)),
    ))
}

/// Whether `z` lies in the dual cone of the given generators, i.e. `z.w >= 0`
/// for every generator w, up to a relative tolerance.
pub fn dual_cone_contains(generators: &[PseudoCodeword], z: &[f64], tol: f64) -> Result<bool> {
    if generators.is_empty() {
        return Err(Error::Empty("generator list"));
    }
    for g in generators {
        let w = g.vector_f64();
        if w.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: w.len(),
                got: z.len(),
            });
        }
        let dot: f64 = w.iter().zip(z).map(|(a, b)| a * b).sum();
        let scale: f64 = w.iter().zip(z).map(|(a, b)| (a * b).abs()).sum();
        if dot < -tol * scale.max(f64::MIN_POSITIVE) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::hamming_code;

    fn r(v: i64) -> Rational64 {
        Rational64::from_integer(v)
    }

    fn single_row(w: usize) -> ParityCheckMatrix {
        ParityCheckMatrix::from_rows(&[vec![1; w]]).unwrap()
    }

    #[test]
    fn polytope_row_of_weight_three() {
        let p = fundamental_polytope(&single_row(3)).unwrap();
        let parity: Vec<(Vec<Rational64>, Rational64)> = p.constraints()[..4]
            .iter()
            .map(|c| (c.dense_coeffs(3), c.rhs()))
            .collect();
        let expect = vec![
            (vec![r(1), r(-1), r(-1)], r(0)),
            (vec![r(-1), r(1), r(-1)], r(0)),
            (vec![r(-1), r(-1), r(1)], r(0)),
            (vec![r(1), r(1), r(1)], r(2)),
        ];
        assert_eq!(parity, expect);
        assert_eq!(p.constraints().len(), 4 + 6);
    }

    #[test]
    fn polytope_hamming_counts() {
        let p = fundamental_polytope(&hamming_code(3).unwrap()).unwrap();
        let parity = p.constraints().iter().filter(|c| c.terms().len() > 1).count();
        assert_eq!(parity, 24);
        assert_eq!(p.constraints().len(), 24 + 14);
    }

    #[test]
    fn polytope_guard() {
        let h = hamming_code(3).unwrap();
        assert!(fundamental_polytope_with_guard(&h, 23).unwrap_err().is_guard());
        assert!(fundamental_polytope_with_guard(&h, 24).is_ok());
    }

    #[test]
    fn polytope_two_columns() {
        let p = fundamental_polytope(&single_row(2)).unwrap();
        assert!(p
            .contains_rational(&[Rational64::new(1, 3), Rational64::new(1, 3)])
            .unwrap());
        assert!(!p.contains_rational(&[r(1), r(0)]).unwrap());
        assert!(!p.contains_rational(&[r(2), r(2)]).unwrap());
    }

    #[test]
    fn membership_examples() {
        let h = hamming_code(3).unwrap();
        let p = fundamental_polytope(&h).unwrap();
        let cw = [1, 1, 1, 0, 0, 0, 0];
        assert!(h.is_codeword(&cw));
        assert!(polytope_contains(&p, &cw.map(|b| r(b as i64))).unwrap());
        assert!(!polytope_contains(&p, &[1, 0, 0, 0, 0, 0, 0].map(r)).unwrap());
        assert!(polytope_contains(&p, &[0; 7].map(r)).unwrap());
        assert!(polytope_contains(&p, &[r(0); 3]).is_err());
    }

    #[test]
    fn cone_counts_and_subset() {
        let h = hamming_code(3).unwrap();
        let k = fundamental_cone(&h);
        assert_eq!(k.constraints().len(), 12 + 7);
        let p = fundamental_polytope(&h).unwrap();
        let zero_rhs: Vec<&LinearConstraint> = p.constraints().iter().filter(|c| c.rhs().is_zero()).collect();
        assert_eq!(zero_rhs.len(), k.constraints().len());
        for c in k.constraints() {
            assert!(zero_rhs.contains(&c));
        }
    }

    #[test]
    fn cone_single_row() {
        let k = fundamental_cone(&single_row(3));
        let rows: Vec<Vec<Rational64>> = k.constraints()[..3].iter().map(|c| c.dense_coeffs(3)).collect();
        assert_eq!(rows[0], vec![r(1), r(-1), r(-1)]);
        assert_eq!(rows[2], vec![r(-1), r(-1), r(1)]);
        let k2 = fundamental_cone(&single_row(2));
        assert!(k2.contains_rational(&[r(5), r(5)]).unwrap());
        assert!(!k2.contains_rational(&[r(5), r(4)]).unwrap());
    }

    #[test]
    fn scaling_examples() {
        let h = hamming_code(3).unwrap();
        let p = fundamental_polytope(&h).unwrap();
        let bad = [5, 1, 1, 0, 0, 0, 0].map(r);
        assert_eq!(polytope_scale_for(&h, &bad).unwrap(), None);
        let good = [2, 1, 1, 1, 1, 0, 0].map(r);
        let alpha = polytope_scale_for(&h, &good).unwrap().unwrap();
        let scaled: Vec<Rational64> = good.iter().map(|&v| v * alpha).collect();
        assert!(p.contains_rational(&scaled).unwrap());
        assert_eq!(polytope_scale_for(&h, &[r(0); 7]).unwrap(), Some(r(1)));
    }

    #[test]
    fn ine_dump() {
        let k = fundamental_cone(&single_row(2));
        let ine = k.to_ine();
        assert!(ine.contains("H-representation"));
        assert!(ine.contains(" 4 3 rational"));
        assert!(ine.contains(" 0 -1 1"));
    }

    #[test]
    fn weight_one_row_pins_coordinate() {
        let h = ParityCheckMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        let k = fundamental_cone(&h);
        assert!(!k.contains_rational(&[r(1), r(1)]).unwrap());
        assert!(k.contains_rational(&[r(0), r(0)]).unwrap());
    }
}
