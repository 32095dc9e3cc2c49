mod common;

use common::*;
use num_rational::Rational64;
use num_traits::{One, Zero};
use proptest::prelude::*;
use pseudocone::bounds::{
    box_max_norm, column_weight_bound, compute_alpha, compute_alpha_with, compute_beta, exchange_step,
    first_order_from_alpha, second_order_bound, second_order_subproblem, Symmetry,
};
use pseudocone::codes::{code_facts, hamming_code, tanner_automorphisms, tanner_group_code};
use pseudocone::decoder::cone_decode_success;
use pseudocone::generators::{enumerate_generators, pseudo_weight, pseudo_weight_exact, spectrum};
use pseudocone::linprog::{solve, Direction, LpProblem, Mode};
use pseudocone::polytope::fundamental_cone;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maximum of `|x|^2` over every vertex of `{0 <= x <= alpha, sum x = budget}`:
/// all coordinates but one sit at a bound and the free one absorbs the rest.
fn vertex_max(alpha: &[Rational64], budget: Rational64) -> Option<Rational64> {
    let n = alpha.len();
    let mut best: Option<Rational64> = None;
    for free in 0..n {
        for mask in 0u32..(1 << n) {
            if mask & (1 << free) != 0 {
                continue;
            }
            let mut x: Vec<Rational64> = (0..n)
                .map(|i| {
                    if mask & (1 << i) != 0 {
                        alpha[i]
                    } else {
                        Rational64::zero()
                    }
                })
                .collect();
            let used: Rational64 = x.iter().sum();
            x[free] = budget - used;
            if x[free] < Rational64::zero() || x[free] > alpha[free] {
                continue;
            }
            let v: Rational64 = x.iter().map(|v| v * v).sum();
            best = Some(best.map_or(v, |b| b.max(v)));
        }
    }
    best
}

#[test]
fn greedy_box_maximum_equals_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(1..=6);
        let alpha: Vec<Rational64> = (0..n)
            .map(|_| Rational64::new(rng.random_range(0..=12), rng.random_range(1..=12)))
            .collect();
        let budget = Rational64::new(rng.random_range(1..=12), rng.random_range(1..=6));
        let Some(oracle) = vertex_max(&alpha, budget) else {
            assert!(box_max_norm(&alpha, &budget).is_err());
            continue;
        };
        let (value, x) = box_max_norm(&alpha, &budget).unwrap();
        assert_eq!(value, oracle, "alpha {alpha:?} budget {budget}");
        assert_eq!(x.iter().sum::<Rational64>(), budget);
        assert!(x
            .iter()
            .zip(&alpha)
            .all(|(xi, ai)| *xi >= Rational64::zero() && xi <= ai));
        checked += 1;
    }
}

#[test]
fn greedy_box_example() {
    let alpha = [0.6f64, 0.5, 0.3];
    let (v, x) = box_max_norm(&alpha, &1.0f64).unwrap();
    assert!((v - 0.52).abs() < 1e-12);
    assert!((x[0] - 0.6).abs() < 1e-12 && (x[1] - 0.4).abs() < 1e-12 && x[2] == 0.0);
}

#[test]
fn mediant_is_at_least_the_smaller_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10_000 {
        let [a, b, c, d]: [Rational64; 4] =
            std::array::from_fn(|_| Rational64::new(rng.random_range(1..=1000), rng.random_range(1..=1000)));
        assert!((a + c) / (b + d) >= (a / b).min(c / d));
    }
    let (a, b, c, d) = (1.0, 2.0, 2.0, 1.0);
    assert!((a + c) / (b + d) >= f64::min(a / b, c / d));
}

#[test]
fn exchange_step_never_decreases_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10_000 {
        let n = rng.random_range(2..=8);
        let mut alpha: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        alpha.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let x: Vec<f64> = alpha.iter().map(|a| a * rng.random_range(0.0..=1.0)).collect();
        let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>();
        let mut cur = x.clone();
        let sum: f64 = x.iter().sum();
        for _ in 0..4 * n {
            let Some(next) = exchange_step(&alpha, &cur) else {
                break;
            };
            assert!(norm(&next) >= norm(&cur) - 1e-12);
            assert!((next.iter().sum::<f64>() - sum).abs() < 1e-12);
            assert!(next.iter().zip(&alpha).all(|(v, a)| *v >= -1e-15 && *v <= a + 1e-15));
            cur = next;
        }
    }
}

proptest! {
    #[test]
    fn pseudo_weight_is_scale_invariant(
        x in prop::collection::vec(0i64..20, 1..12),
        num in 1i64..50,
        den in 1i64..50,
    ) {
        prop_assume!(x.iter().any(|&v| v > 0));
        let a = Rational64::new(num, den);
        let v: Vec<_> = x.iter().map(|&t| big(Rational64::from_integer(t))).collect();
        let w: Vec<_> = x.iter().map(|&t| big(Rational64::from_integer(t) * a)).collect();
        prop_assert_eq!(pseudo_weight_exact(&v).unwrap(), pseudo_weight_exact(&w).unwrap());
    }
}

#[test]
fn cone_success_is_scale_invariant() {
    let h = hamming_code(3).unwrap();
    let cone = fundamental_cone(&h);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..500 {
        let r: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..2.0)).collect();
        let c: f64 = rng.random_range(0.01..100.0);
        let scaled: Vec<f64> = r.iter().map(|v| v * c).collect();
        assert_eq!(
            cone_decode_success(&cone, &r).unwrap(),
            cone_decode_success(&cone, &scaled).unwrap()
        );
    }
}

#[test]
fn caps_respect_column_weight_on_tanner_codes() {
    let h = tanner_group_code(31).unwrap();
    assert_eq!(column_weight_bound(&h), Some(4.0));
    let sym = Symmetry::new(&h, &tanner_automorphisms(31).unwrap()).unwrap();
    let alpha = compute_alpha_with(&fundamental_cone(&h), &sym).unwrap();
    assert!(alpha.iter().all(|&a| a <= 0.25 + 1e-9));
    assert!(first_order_from_alpha(&alpha).unwrap() >= 4.0);
}

#[test]
fn reduced_caps_match_direct_solves() {
    let h = tanner_group_code(31).unwrap();
    let cone = fundamental_cone(&h);
    let sym = Symmetry::new(&h, &tanner_automorphisms(31).unwrap()).unwrap();
    let reduced = compute_alpha_with(&cone, &sym).unwrap();
    for i in [0, 77, 154] {
        let mut c = vec![0.0; 155];
        c[i] = 1.0;
        let lp = LpProblem::new(&cone, c, Direction::Maximize).normalized();
        let direct = solve(&lp, Mode::Float).unwrap().optimum.unwrap();
        assert!((reduced[i] - direct).abs() < 1e-9, "coordinate {i}");
        assert!((direct - 19.0 / 156.0).abs() < 1e-9);
    }
}

#[test]
fn ordering_chain_on_small_codes() {
    for m in [3, 4] {
        let h = hamming_code(m).unwrap();
        let cone = fundamental_cone(&h);
        let alpha = compute_alpha(&cone).unwrap();
        let beta = compute_beta(&cone, &alpha).unwrap();
        let first = first_order_from_alpha(&alpha).unwrap();
        let second = second_order_bound(&alpha, &beta).unwrap();
        let gens = enumerate_generators(&cone, Some(&h)).unwrap();
        let min_pw = spectrum(&gens, 0.1).unwrap().min_pw;
        let d_min = code_facts(&h).unwrap().d_min.unwrap() as f64;
        if let Some(cw) = column_weight_bound(&h) {
            assert!(cw <= first + 1e-9);
        }
        assert!(first <= second + 1e-9, "m={m}");
        assert!(second <= min_pw + 1e-9, "m={m}");
        assert!(min_pw <= d_min + 1e-9, "m={m}");
    }
}

#[test]
fn second_order_subproblems_dominate_cone_samples() {
    for m in [3, 4] {
        let h = hamming_code(m).unwrap();
        let n = h.cols();
        let cone = fundamental_cone(&h);
        let alpha = compute_alpha(&cone).unwrap();
        let beta = compute_beta(&cone, &alpha).unwrap();
        let gens: Vec<Vec<f64>> = enumerate_generators(&cone, Some(&h))
            .unwrap()
            .iter()
            .map(|g| g.vector_f64())
            .collect();
        let per_k: Vec<Option<f64>> = (0..n).map(|k| second_order_subproblem(k, &alpha, &beta)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(15 + m as u64);
        let mut hits = vec![0usize; n];
        for _ in 0..50 * n * 4 {
            let mut x = vec![0.0; n];
            for _ in 0..rng.random_range(1..=3) {
                let w = &gens[rng.random_range(0..gens.len())];
                let c: f64 = rng.random_range(0.0..1.0);
                for (xi, wi) in x.iter_mut().zip(w) {
                    *xi += c * wi;
                }
            }
            let s: f64 = x.iter().sum();
            if s <= 0.0 {
                continue;
            }
            x.iter_mut().for_each(|v| *v /= s);
            let k = (0..n).fold(0, |b, i| if x[i] > x[b] { i } else { b });
            let norm: f64 = x.iter().map(|v| v * v).sum();
            let bound = per_k[k].expect("sub-problem with a feasible point");
            assert!(bound >= norm - 1e-9, "m={m} k={k}");
            hits[k] += 1;
        }
        assert!(hits.iter().all(|&c| c > 0));
    }
}

#[test]
fn pseudo_weight_equals_hamming_weight_on_binary_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..1000 {
        let n = rng.random_range(1..=20);
        let x: Vec<f64> = (0..n).map(|_| rng.random_bool(0.5) as u8 as f64).collect();
        let w = x.iter().sum::<f64>();
        if w == 0.0 {
            assert!(pseudo_weight(&x).is_err());
        } else {
            assert_eq!(pseudo_weight(&x).unwrap(), w);
        }
    }
    let r = pseudo_weight_exact(&[
        big(Rational64::from_integer(2)),
        big(Rational64::one()),
        big(Rational64::one()),
    ]);
    assert_eq!(to_r64(&r.unwrap()), Rational64::new(8, 3));
}
