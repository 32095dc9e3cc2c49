#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use pseudocone::codes::ParityCheckMatrix;
use rand::Rng;

/// Random parity-check matrix with no zero rows or columns.
pub fn random_code<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ParityCheckMatrix {
    loop {
        let entries: Vec<u8> = (0..rows * cols).map(|_| rng.random_bool(0.45) as u8).collect();
        if let Ok(h) = ParityCheckMatrix::new(rows, cols, entries) {
            return h;
        }
    }
}

pub fn big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn to_r64(r: &BigRational) -> Rational64 {
    let n: i64 = r.numer().try_into().expect("small numerator");
    let d: i64 = r.denom().try_into().expect("small denominator");
    Rational64::new(n, d)
}

/// One-dimensional null space of a matrix with `cols - 1` rows, or `None`
/// when the rank is lower.
pub fn null_direction(mut rows: Vec<Vec<BigRational>>, cols: usize) -> Option<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
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
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank != cols - 1 {
        return None;
    }
    let free = (0..cols).find(|c| !pivots.contains(c)).expect("one free column");
    let mut x = vec![BigRational::zero(); cols];
    x[free] = BigRational::one();
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = -rows[r][free].clone();
    }
    Some(x)
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn normalize(v: &[BigRational]) -> Vec<BigRational> {
    let s: BigRational = v.iter().sum();
    v.iter().map(|x| x / &s).collect()
}

pub fn is_nonneg(v: &[BigRational]) -> bool {
    v.iter().all(|x| !x.is_negative())
}
