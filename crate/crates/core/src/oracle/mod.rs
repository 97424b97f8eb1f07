//! Desk-scale ground truth for the bounds computed elsewhere in the crate.
//!
//! Everything here is dense and `O(n^3)`. Nothing in this module depends on
//! the Dobrushin coefficient, so it can be used to check it.

mod eigen;

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::stochastic_core::{DenseMatrix, StochasticMatrix, TransitionMatrix};

/// Default cap on the dimension accepted by the oracle.
pub const DEFAULT_ORACLE_CAP: usize = 64;

/// Moduli within this distance are treated as tied when sorting.
const MODULUS_TIE_TOL: f64 = 1e-9;

/// Eigenvalues sorted by non-increasing modulus; ties by non-increasing real
/// part, then non-increasing imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub n: usize,
}

impl Spectrum {
    fn from_unsorted(mut ev: Vec<Complex64>) -> Self {
        ev.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(Ordering::Equal));
        // Group consecutive near-equal moduli, then order each group.
        let mut start = 0;
        while start < ev.len() {
            let mut end = start + 1;
            while end < ev.len() && ev[end - 1].norm() - ev[end].norm() <= MODULUS_TIE_TOL {
                end += 1;
            }
            ev[start..end].sort_by(|a, b| {
                b.re.partial_cmp(&a.re)
                    .unwrap_or(Ordering::Equal)
                    .then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
            });
            start = end;
        }
        Spectrum {
            n: ev.len(),
            eigenvalues: ev,
        }
    }

    /// `|lambda_2|`, or 0 when `n < 2`.
    pub fn second_modulus(&self) -> f64 {
        self.eigenvalues.get(1).map_or(0.0, |z| z.norm())
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.norm()).collect()
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::DimensionCapExceeded { n, cap })
    } else {
        Ok(())
    }
}

pub fn eigenvalues_dense(m: &DenseMatrix) -> Result<Spectrum> {
    eigenvalues_dense_capped(m, DEFAULT_ORACLE_CAP)
}

pub fn eigenvalues_dense_capped(m: &DenseMatrix, cap: usize) -> Result<Spectrum> {
    check_cap(m.n(), cap)?;
    let mut all = Vec::with_capacity(m.n());
    for block in structural_blocks(m) {
        let sub = DenseMatrix::from_fn(block.len(), |i, j| m[(block[i], block[j])]);
        all.extend(eigen::eigenvalues(&sub)?);
    }
    Ok(Spectrum::from_unsorted(all))
}

/// Strongly connected components of the nonzero pattern of `m`, found from
/// the boolean reachability closure.
///
/// A symmetric permutation makes `m` block triangular with these components
/// as diagonal blocks, so the spectrum is the union of the blocks' spectra.
/// Solving each block separately keeps structurally nilpotent parts exact:
/// a Jordan block of size `k` at 0 would otherwise come back as a ring of
/// radius about `eps^(1/k)`.
fn structural_blocks(m: &DenseMatrix) -> Vec<Vec<usize>> {
    let n = m.n();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || m[(i, j)] != 0.0).collect())
        .collect();
    for k in 0..n {
        let via_k = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (r, &v) in row.iter_mut().zip(&via_k) {
                *r |= v;
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut blocks = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let block: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &block {
            assigned[j] = true;
        }
        blocks.push(block);
    }
    blocks
}

/// `|lambda_2|` of a row-stochastic matrix; 0 when `n = 1`.
pub fn second_modulus(m: &DenseMatrix) -> Result<f64> {
    Ok(eigenvalues_dense(m)?.second_modulus())
}

/// True iff the sorted spectra of `m` and `m^t` agree pairwise within 1e-7.
pub fn transpose_spectrum_check(m: &DenseMatrix) -> Result<bool> {
    let a = eigenvalues_dense(m)?;
    let b = eigenvalues_dense(&m.transpose())?;
    Ok(a.eigenvalues
        .iter()
        .zip(&b.eigenvalues)
        .all(|(x, y)| (x - y).norm() <= 1e-7))
}

/// Reduced row echelon form with partial pivoting. Columns whose best pivot
/// is at most `threshold` in magnitude are treated as free.
struct Echelon {
    rows: Vec<Vec<f64>>,
    pivots: Vec<usize>,
}

fn row_reduce(m: &DenseMatrix, threshold: f64) -> Echelon {
    let n = m.n();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r == n {
            break;
        }
        let (best, mag) = (r..n)
            .map(|i| (i, a[i][col].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= threshold || mag == 0.0 {
            for row in a.iter_mut().skip(r) {
                row[col] = 0.0;
            }
            continue;
        }
        a.swap(r, best);
        let piv = a[r][col];
        for v in a[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[col] == 0.0 {
                continue;
            }
            let f = row[col];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            row[col] = 0.0;
        }
        pivots.push(col);
        r += 1;
    }
    Echelon { rows: a, pivots }
}

fn minus_identity(p: &DenseMatrix) -> DenseMatrix {
    let mut d = p.clone();
    for i in 0..d.n() {
        d[(i, i)] -= 1.0;
    }
    d
}

fn rank_threshold(m: &DenseMatrix) -> f64 {
    1e-9 * m.max_abs()
}

/// `dim {y : P y = y}` as `n - rank(P - I)`.
pub fn fixed_space_dimension(p: &StochasticMatrix) -> Result<usize> {
    check_cap(p.n(), DEFAULT_ORACLE_CAP)?;
    fixed_space_dimension_dense(&p.densify(DEFAULT_ORACLE_CAP)?)
}

pub fn fixed_space_dimension_dense(p: &DenseMatrix) -> Result<usize> {
    check_cap(p.n(), DEFAULT_ORACLE_CAP)?;
    let d = minus_identity(p);
    let ech = row_reduce(&d, rank_threshold(&d));
    Ok(p.n() - ech.pivots.len())
}

/// A basis of `{y : P y = y}` read off the reduced echelon form of `P - I`.
pub fn fixed_space_basis(p: &DenseMatrix) -> Result<Vec<Vec<f64>>> {
    check_cap(p.n(), DEFAULT_ORACLE_CAP)?;
    let n = p.n();
    let d = minus_identity(p);
    let ech = row_reduce(&d, rank_threshold(&d));
    let free = (0..n).filter(|c| !ech.pivots.contains(c));
    Ok(free
        .map(|f| {
            let mut v = vec![0.0; n];
            v[f] = 1.0;
            for (r, &pc) in ech.pivots.iter().enumerate() {
                v[pc] = -ech.rows[r][f];
            }
            v
        })
        .collect())
}

/// Solve `(A^t - I) v = 0` with `sum v = 1` by Gaussian elimination, one
/// equation of the singular system replaced by the normalization.
#[allow(clippy::needless_range_loop)]
pub fn stationary_dense(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = a.n();
    check_cap(n, DEFAULT_ORACLE_CAP)?;
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| a[(j, i)]).collect();
            row[i] -= 1.0;
            row.push(0.0);
            row
        })
        .collect();
    m[n - 1] = vec![1.0; n + 1];

    for col in 0..n {
        let best = (col..n)
            .max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())
            .unwrap();
        if m[best][col].abs() < 1e-13 {
            return Err(Error::NotStochastic(
                "stationary distribution is not unique".into(),
            ));
        }
        m.swap(col, best);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            if f != 0.0 {
                for j in col..=n {
                    m[i][j] -= f * m[col][j];
                }
            }
        }
    }
    let mut v = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * v[j]).sum();
        v[i] = (m[i][n] - s) / m[i][i];
    }
    Ok(v)
}
