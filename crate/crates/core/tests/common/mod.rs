//! Random matrix generators shared by the integration tests.
#![allow(dead_code)]

use ergogap::stochastic_core::{DenseMatrix, SimplexVector, StochasticMatrix, DEFAULT_ROW_SUM_TOL};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_sparse(d: &DenseMatrix) -> StochasticMatrix {
    StochasticMatrix::from_dense(d, DEFAULT_ROW_SUM_TOL).expect("generated matrix is stochastic")
}

fn normalize(row: &mut [f64]) {
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|x| *x /= s);
}

/// Random stochastic matrix; each entry is zero with probability `zero_p`,
/// except that every row keeps at least one positive entry.
pub fn stochastic(rng: &mut impl Rng, n: usize, zero_p: f64) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        let row = m.row_mut(i);
        for x in row.iter_mut() {
            if !rng.random_bool(zero_p) {
                *x = rng.random_range(0.01..1.0);
            }
        }
        if row.iter().all(|&x| x == 0.0) {
            row[rng.random_range(0..n)] = 1.0;
        }
        normalize(row);
    }
    m
}

/// Mix of dense, sparse and near-permutation stochastic matrices.
pub fn varied_stochastic(rng: &mut impl Rng, n: usize) -> DenseMatrix {
    let zero_p = match rng.random_range(0..4) {
        0 => 0.0,
        1 => 0.4,
        2 => 0.7,
        _ => 0.95,
    };
    stochastic(rng, n, zero_p)
}

pub fn simplex(rng: &mut impl Rng, n: usize) -> SimplexVector {
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0) + 1e-3).collect();
    let s: f64 = x.iter().sum();
    SimplexVector::new(x.into_iter().map(|v| v / s).collect(), 1e-12).unwrap()
}

/// Entries summing to zero with `||y||_1` in `(0, 1]`.
pub fn zero_sum(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    y.iter_mut().for_each(|v| *v -= mean);
    let norm: f64 = y.iter().map(|v| v.abs()).sum();
    let scale = rng.random_range(0.1..1.0) / norm.max(f64::MIN_POSITIVE);
    y.iter_mut().for_each(|v| *v *= scale);
    y
}

/// Irreducible random block on `size` states: a cycle through all of them
/// plus random extra edges.
fn irreducible_block(rng: &mut impl Rng, size: usize) -> Vec<Vec<f64>> {
    let mut b = vec![vec![0.0; size]; size];
    for (i, row) in b.iter_mut().enumerate() {
        row[(i + 1) % size] = rng.random_range(0.05..1.0);
        for x in row.iter_mut() {
            if rng.random_bool(0.4) {
                *x += rng.random_range(0.05..1.0);
            }
        }
        normalize(row);
    }
    b
}

/// Stochastic matrix with `closed` irreducible closed classes of random
/// sizes, followed by `transient` states that feed into them. Returns the
/// matrix with its states shuffled.
pub fn structured(
    rng: &mut impl Rng,
    closed: usize,
    max_block: usize,
    transient: usize,
) -> DenseMatrix {
    let sizes: Vec<usize> = (0..closed)
        .map(|_| rng.random_range(1..=max_block))
        .collect();
    let n_closed: usize = sizes.iter().sum();
    let n = n_closed + transient;
    let mut m = DenseMatrix::zeros(n);
    let mut offset = 0;
    for &s in &sizes {
        let b = irreducible_block(rng, s);
        for i in 0..s {
            for j in 0..s {
                m[(offset + i, offset + j)] = b[i][j];
            }
        }
        offset += s;
    }
    for t in n_closed..n {
        let row = m.row_mut(t);
        // Guaranteed leak into a closed class keeps the state transient.
        row[rng.random_range(0..n_closed)] = rng.random_range(0.05..1.0);
        for x in row.iter_mut() {
            if rng.random_bool(0.3) {
                *x += rng.random_range(0.05..1.0);
            }
        }
        normalize(row);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    DenseMatrix::from_fn(n, |i, j| m[(perm[i], perm[j])])
}

/// Dense `c P + (1 - c) E`.
pub fn mixture(p: &DenseMatrix, e: &DenseMatrix, c: f64) -> DenseMatrix {
    DenseMatrix::from_fn(p.n(), |i, j| c * p[(i, j)] + (1.0 - c) * e[(i, j)])
}

pub fn rank_one(z: &SimplexVector) -> DenseMatrix {
    let z = z.as_slice();
    DenseMatrix::from_fn(z.len(), |_, j| z[j])
}

pub fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `B^t y` for dense `B`.
pub fn transpose_apply(b: &DenseMatrix, y: &[f64]) -> Vec<f64> {
    let n = b.n();
    let mut out = vec![0.0; n];
    for (i, &yi) in y.iter().enumerate() {
        for (j, o) in out.iter_mut().enumerate() {
            *o += b[(i, j)] * yi;
        }
    }
    out
}

/// `B x` for dense `B`.
pub fn apply(b: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    (0..b.n())
        .map(|i| b.row(i).iter().zip(x).map(|(a, v)| a * v).sum())
        .collect()
}
