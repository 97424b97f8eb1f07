use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Square row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..n * n).map(|idx| f(idx / n, idx % n)).collect();
        DenseMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// `self * rhs`, rows computed in parallel.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if rhs.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: rhs.n,
            });
        }
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        if n == 0 {
            return Ok(out);
        }
        out.data
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, out_row)| {
                for (k, &a) in self.row(i).iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                        *o += a * b;
                    }
                }
            });
        Ok(out)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|x| alpha * x).collect(),
        }
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if rhs.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: rhs.n,
            });
        }
        Ok(DenseMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Induced L1 operator norm: maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Checks entries are nonnegative and rows sum to one within `tol`.
    pub fn check_row_stochastic(&self, tol: f64) -> Result<()> {
        for i in 0..self.n {
            let row = self.row(i);
            if let Some(j) = row.iter().position(|&x| x < -tol || x.is_nan()) {
                return Err(Error::NotStochastic(format!(
                    "entry ({i}, {j}) = {} is negative",
                    row[j]
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::NotStochastic(format!("row {i} sums to {sum}")));
            }
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_rows_are_non_square() {
        let err = DenseMatrix::from_rows(vec![vec![1.0, 0.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::NonSquare { rows: 2, cols: 1 }));
    }

    #[test]
    fn matmul_small() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = DenseMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.as_slice(), &[2.0, 1.0, 4.0, 3.0]);
        assert_eq!(a.transpose().as_slice(), &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(a.norm1(), 6.0);
    }
}
