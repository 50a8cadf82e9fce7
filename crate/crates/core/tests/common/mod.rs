#![allow(dead_code)]

use matlis::linalg::{rational, ratio, ExactMatrix, Rational};
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::Rng;

/// Textbook Gaussian elimination on a dense copy.
pub fn naive_rank(m: &ExactMatrix) -> usize {
    let mut a = m.to_dense();
    let (rows, cols) = m.shape();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for k in c..cols {
                    let v = &a[rank][k] * &f;
                    a[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Small rationals, zero about a third of the time.
pub fn random_entry(rng: &mut StdRng) -> Rational {
    if rng.gen_bool(0.35) {
        return Rational::zero();
    }
    let n: i64 = rng.gen_range(-5..=5);
    let d: i64 = rng.gen_range(1..=3);
    ratio(n, d)
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> ExactMatrix {
    let dense: Vec<Vec<Rational>> = (0..rows)
        .map(|_| (0..cols).map(|_| random_entry(rng)).collect())
        .collect();
    if rows == 0 {
        return ExactMatrix::zeros(0, cols);
    }
    ExactMatrix::from_dense(&dense)
}

/// A rank-deficient product `A·B` with inner dimension `k`.
pub fn random_low_rank(rng: &mut StdRng, rows: usize, cols: usize, k: usize) -> ExactMatrix {
    random_matrix(rng, rows, k).mul(&random_matrix(rng, k, cols)).unwrap()
}

/// Unit lower triangular times unit upper triangular: always invertible.
pub fn random_invertible(rng: &mut StdRng, n: usize) -> ExactMatrix {
    let mut l = ExactMatrix::identity(n);
    let mut u = ExactMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            l = l.with_entry(i, j, random_entry(rng));
            u = u.with_entry(j, i, random_entry(rng));
        }
    }
    l.mul(&u).unwrap()
}

pub fn unit(len: usize, k: usize) -> Vec<Rational> {
    (0..len).map(|i| rational((i == k) as i64)).collect()
}
