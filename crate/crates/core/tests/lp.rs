mod common;

use common::*;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use pseudocone::codes::hamming_code;
use pseudocone::linprog::{solve, Direction, LpProblem, LpStatus, Mode};
use pseudocone::polytope::{fundamental_cone, ConstraintSystem, LinearConstraint, Sense, SystemKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct RandomLp {
    a: Vec<Vec<i64>>,
    b: Vec<i64>,
    u: Vec<i64>,
    c: Vec<i64>,
}

impl RandomLp {
    fn sample(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.random_range(1..=5);
        let m = rng.random_range(1..=4);
        RandomLp {
            a: (0..m)
                .map(|_| loop {
                    let row: Vec<i64> = (0..n).map(|_| rng.random_range(-4..=4)).collect();
                    if row.iter().any(|&v| v != 0) {
                        break row;
                    }
                })
                .collect(),
            b: (0..m).map(|_| rng.random_range(-3..=8)).collect(),
            u: (0..n).map(|_| rng.random_range(1..=5)).collect(),
            c: (0..n).map(|_| rng.random_range(-5..=5)).collect(),
        }
    }

    fn nonneg(n: usize) -> impl Iterator<Item = LinearConstraint> {
        (0..n).map(|i| LinearConstraint::from_ints([(i, -1)], 0, Sense::LessEq).unwrap())
    }

    /// `max c.x` subject to `Ax <= b`, `0 <= x <= u`.
    fn primal(&self) -> ConstraintSystem {
        let n = self.c.len();
        let mut rows: Vec<LinearConstraint> = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(row, &b)| LinearConstraint::from_ints(row.iter().copied().enumerate(), b, Sense::LessEq).unwrap())
            .collect();
        rows.extend((0..n).map(|i| LinearConstraint::from_ints([(i, 1)], self.u[i], Sense::LessEq).unwrap()));
        rows.extend(Self::nonneg(n));
        ConstraintSystem::new(n, rows, SystemKind::Polytope).unwrap()
    }

    /// `min b.y + u.z` subject to `A'y + z >= c`, `y, z >= 0`, written as
    /// `-A'y - z <= -c`.
    fn dual(&self) -> ConstraintSystem {
        let n = self.c.len();
        let m = self.b.len();
        let mut rows = Vec::new();
        for j in 0..n {
            let mut terms: Vec<(usize, i64)> = (0..m).map(|i| (i, -self.a[i][j])).collect();
            terms.push((m + j, -1));
            rows.push(LinearConstraint::from_ints(terms, -self.c[j], Sense::LessEq).unwrap());
        }
        rows.extend(Self::nonneg(m + n));
        ConstraintSystem::new(m + n, rows, SystemKind::Polytope).unwrap()
    }

    fn dual_objective(&self) -> Vec<f64> {
        self.b.iter().chain(&self.u).map(|&v| v as f64).collect()
    }
}

fn dot(c: &[f64], x: &[BigRational]) -> BigRational {
    c.iter()
        .zip(x)
        .map(|(&ci, xi)| big(Rational64::from_integer(ci as i64)) * xi)
        .sum()
}

#[test]
fn exact_optimum_is_certified_by_the_dual() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut optimal, mut infeasible) = (0, 0);
    for _ in 0..100 {
        let lp = RandomLp::sample(&mut rng);
        let primal = lp.primal();
        let c: Vec<f64> = lp.c.iter().map(|&v| v as f64).collect();
        let p = solve(&LpProblem::new(&primal, c.clone(), Direction::Maximize), Mode::Exact).unwrap();
        let dual = lp.dual();
        let d = solve(
            &LpProblem::new(&dual, lp.dual_objective(), Direction::Minimize),
            Mode::Exact,
        )
        .unwrap();
        match p.status {
            LpStatus::Optimal => {
                optimal += 1;
                assert_eq!(d.status, LpStatus::Optimal);
                let x = p.exact_point.unwrap();
                let y = d.exact_point.unwrap();
                assert!(primal.contains_exact(&x).unwrap());
                assert!(dual.contains_exact(&y).unwrap());
                let pv = dot(&c, &x);
                let dv = dot(&lp.dual_objective(), &y);
                assert_eq!(pv, dv);
                assert_eq!(p.exact_optimum.unwrap(), pv);
            }
            LpStatus::Infeasible => {
                infeasible += 1;
                assert_eq!(d.status, LpStatus::Unbounded);
            }
            LpStatus::Unbounded => panic!("boxed primal cannot be unbounded"),
        }
    }
    assert!(
        optimal > 50 && infeasible > 0,
        "optimal {optimal} infeasible {infeasible}"
    );
}

#[test]
fn float_mode_agrees_with_exact_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let lp = RandomLp::sample(&mut rng);
        let primal = lp.primal();
        let c: Vec<f64> = lp.c.iter().map(|&v| v as f64).collect();
        let problem = LpProblem::new(&primal, c, Direction::Maximize);
        let e = solve(&problem, Mode::Exact).unwrap();
        let f = solve(&problem, Mode::Float).unwrap();
        assert_eq!(e.status, f.status);
        if e.status == LpStatus::Optimal {
            assert!((e.optimum.unwrap() - f.optimum.unwrap()).abs() < 1e-9);
            assert!(primal.contains_f64(&f.point.unwrap(), 1e-9).unwrap());
        }
    }
}

#[test]
fn cone_objective_is_zero_or_unbounded() {
    let h = hamming_code(3).unwrap();
    let cone = fundamental_cone(&h);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (mut zero, mut unbounded) = (0, 0);
    for _ in 0..200 {
        let c: Vec<f64> = (0..7).map(|_| rng.random_range(-3..=6) as f64).collect();
        let res = solve(&LpProblem::new(&cone, c, Direction::Minimize), Mode::Exact).unwrap();
        match res.status {
            LpStatus::Optimal => {
                assert!(res.exact_optimum.unwrap().is_zero());
                zero += 1;
            }
            LpStatus::Unbounded => unbounded += 1,
            LpStatus::Infeasible => panic!("the apex is always feasible"),
        }
    }
    assert!(zero > 0 && unbounded > 0);
}

#[test]
fn repeated_solves_are_identical() {
    let h = hamming_code(4).unwrap();
    let cone = fundamental_cone(&h);
    let c: Vec<f64> = (0..15).map(|i| if i % 3 == 0 { 1.0 } else { 0.0 }).collect();
    let lp = LpProblem::new(&cone, c, Direction::Maximize).normalized();
    let a = solve(&lp, Mode::Float).unwrap();
    let b = solve(&lp, Mode::Float).unwrap();
    assert_eq!(a.point, b.point);
    assert_eq!(a.optimum.map(f64::to_bits), b.optimum.map(f64::to_bits));
    assert_eq!(a.pivots, b.pivots);
}

#[test]
fn equality_rows_and_infeasible_slices() {
    let h = hamming_code(3).unwrap();
    let cone = fundamental_cone(&h);
    let empty = LpProblem::new(&cone, vec![0.0; 7], Direction::Minimize)
        .with_constraint(LinearConstraint::from_ints((0..7).map(|i| (i, 1)), -1, Sense::Eq).unwrap());
    assert_eq!(solve(&empty, Mode::Exact).unwrap().status, LpStatus::Infeasible);
    assert_eq!(solve(&empty, Mode::Float).unwrap().status, LpStatus::Infeasible);
    let pinned = LpProblem::new(&cone, vec![1.0; 7], Direction::Minimize)
        .normalized()
        .with_constraint(LinearConstraint::from_ints([(0, 1)], 0, Sense::Eq).unwrap());
    let res = solve(&pinned, Mode::Exact).unwrap();
    assert_eq!(res.status, LpStatus::Optimal);
    assert!(res.exact_point.unwrap()[0].is_zero());
}
