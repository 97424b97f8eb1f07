//! Row-stochastic matrices, simplex and zero-sum vectors, and implicit Google
//! matrices.
//!
//! Sparse matrices are stored row-compressed: each row keeps strictly
//! increasing column indices with strictly positive weights. Validated rows
//! are divided by their computed sum, so every row sums to one up to a single
//! rounding per entry.

mod dense;
pub mod ingest;

pub use dense::DenseMatrix;
pub use ingest::{
    ingest_edge_list, parse_dense_matrix, parse_edge_list, parse_vector, read_vector, write_vector,
    DanglingPolicy, IngestedGraph,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// Default tolerance on row sums accepted by [`validate_stochastic`].
pub const DEFAULT_ROW_SUM_TOL: f64 = 1e-10;

/// Default cap on the dimension of any densified matrix.
pub const DEFAULT_DENSE_CAP: usize = 512;

/// L1 norm, `sum_i |x_i|`.
pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Borrowed view of one sparse row.
#[derive(Debug, Clone, Copy)]
pub struct RowView<'a> {
    pub cols: &'a [usize],
    pub weights: &'a [f64],
}

impl<'a> RowView<'a> {
    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.cols.iter().copied().zip(self.weights.iter().copied())
    }
}

/// A validated row-stochastic matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
}

/// Validate raw sparse rows as a row-stochastic matrix.
///
/// Duplicate column entries are summed, zero weights dropped, and each row is
/// divided by its computed sum once that sum is within `tol` of one.
pub fn validate_stochastic(
    rows: Vec<Vec<(usize, f64)>>,
    n: usize,
    tol: f64,
) -> Result<StochasticMatrix> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    if rows.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: rows.len(),
        });
    }

    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut cols = Vec::new();
    let mut weights = Vec::new();

    for (i, mut row) in rows.into_iter().enumerate() {
        for &(j, w) in &row {
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight { row: i, col: j });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight {
                    row: i,
                    col: j,
                    weight: w,
                });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
        }
        row.sort_by_key(|&(j, _)| j);

        let start = cols.len();
        for (j, w) in row {
            if w == 0.0 {
                continue;
            }
            if cols.len() > start && *cols.last().unwrap() == j {
                *weights.last_mut().unwrap() += w;
            } else {
                cols.push(j);
                weights.push(w);
            }
        }

        let sum: f64 = weights[start..].iter().sum();
        if (sum - 1.0).abs() > tol || sum == 0.0 {
            return Err(Error::RowSumOutOfTolerance { row: i, sum, tol });
        }
        for w in &mut weights[start..] {
            *w /= sum;
        }
        row_ptr.push(cols.len());
    }

    Ok(StochasticMatrix {
        n,
        row_ptr,
        cols,
        weights,
    })
}

impl StochasticMatrix {
    pub fn identity(n: usize) -> Result<Self> {
        validate_stochastic((0..n).map(|i| vec![(i, 1.0)]).collect(), n, 0.0)
    }

    /// Validate a dense matrix; entries equal to zero become structural zeros.
    pub fn from_dense(dense: &DenseMatrix, tol: f64) -> Result<Self> {
        let n = dense.n();
        let rows = (0..n)
            .map(|i| {
                dense
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w != 0.0)
                    .map(|(j, &w)| (j, w))
                    .collect()
            })
            .collect();
        validate_stochastic(rows, n, tol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> RowView<'_> {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        RowView {
            cols: &self.cols[a..b],
            weights: &self.weights[a..b],
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = RowView<'_>> {
        (0..self.n).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = self.row(i);
        match row.cols.binary_search(&j) {
            Ok(pos) => row.weights[pos],
            Err(_) => 0.0,
        }
    }

    /// `(x^t A)^t`, accumulated into `out`.
    fn transpose_into(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let s = scale * xi;
            for (j, w) in self.row(i).iter() {
                out[j] += s * w;
            }
        }
    }

    fn right_into(&self, v: &[f64], scale: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let dot: f64 = self.row(i).iter().map(|(j, w)| w * v[j]).sum();
            *o += scale * dot;
        }
    }
}

/// Probability vector: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    /// Divides by the computed sum once it is within `tol` of one.
    pub fn new(entries: Vec<f64>, tol: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        for (j, &x) in entries.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFiniteWeight { row: 0, col: j });
            }
            if x < 0.0 {
                return Err(Error::NegativeWeight {
                    row: 0,
                    col: j,
                    weight: x,
                });
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > tol || sum == 0.0 {
            return Err(Error::NotOnSimplex { sum, expected: 1.0 });
        }
        Ok(SimplexVector(
            entries.into_iter().map(|x| x / sum).collect(),
        ))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(SimplexVector(vec![1.0 / n as f64; n]))
    }

    pub fn unit(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Ok(SimplexVector(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Vector whose entries sum to zero, within `1e-12 * n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumVector(Vec<f64>);

impl ZeroSumVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let sum: f64 = entries.iter().sum();
        if !sum.is_finite() || sum.abs() > 1e-12 * entries.len() as f64 {
            return Err(Error::NotOnSimplex { sum, expected: 0.0 });
        }
        Ok(ZeroSumVector(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The `E` part of `c P + (1 - c) E`.
#[derive(Debug, Clone, PartialEq)]
pub enum Teleport {
    /// `E = e z^t`: every row equals `z`.
    Rank1(SimplexVector),
    General(StochasticMatrix),
}

/// `A = c P + (1 - c) E`, never densified.
#[derive(Debug, Clone, PartialEq)]
pub struct GoogleMatrix {
    c: f64,
    p: StochasticMatrix,
    teleport: Teleport,
}

pub fn build_google(p: StochasticMatrix, c: f64, teleport: SimplexVector) -> Result<GoogleMatrix> {
    check_damping(c)?;
    if teleport.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            actual: teleport.len(),
        });
    }
    Ok(GoogleMatrix {
        c,
        p,
        teleport: Teleport::Rank1(teleport),
    })
}

/// Mixture with a general (not necessarily rank-1) stochastic `E`.
pub fn build_google_general(
    p: StochasticMatrix,
    c: f64,
    e: StochasticMatrix,
) -> Result<GoogleMatrix> {
    check_damping(c)?;
    if e.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            actual: e.n(),
        });
    }
    Ok(GoogleMatrix {
        c,
        p,
        teleport: Teleport::General(e),
    })
}

pub(crate) fn check_damping(c: f64) -> Result<()> {
    if (0.0..=1.0).contains(&c) {
        Ok(())
    } else {
        Err(Error::DampingOutOfRange(c))
    }
}

impl GoogleMatrix {
    pub fn damping(&self) -> f64 {
        self.c
    }

    pub fn link_matrix(&self) -> &StochasticMatrix {
        &self.p
    }

    pub fn teleport(&self) -> &Teleport {
        &self.teleport
    }

    /// Sparse `c P + (1 - c) E` for a general `E`; `None` for rank-1 teleport.
    pub(crate) fn sparse_mixture(&self) -> Option<StochasticMatrix> {
        let Teleport::General(e) = &self.teleport else {
            return None;
        };
        let n = self.p.n;
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        for i in 0..n {
            let (a, b) = (self.p.row(i), e.row(i));
            let (mut x, mut y) = (0, 0);
            while x < a.len() || y < b.len() {
                let ca = a.cols.get(x).copied().unwrap_or(usize::MAX);
                let cb = b.cols.get(y).copied().unwrap_or(usize::MAX);
                let (col, w) = if ca == cb {
                    x += 1;
                    y += 1;
                    (
                        ca,
                        self.c * a.weights[x - 1] + (1.0 - self.c) * b.weights[y - 1],
                    )
                } else if ca < cb {
                    x += 1;
                    (ca, self.c * a.weights[x - 1])
                } else {
                    y += 1;
                    (cb, (1.0 - self.c) * b.weights[y - 1])
                };
                if w > 0.0 {
                    cols.push(col);
                    weights.push(w);
                }
            }
            row_ptr.push(cols.len());
        }
        Some(StochasticMatrix {
            n,
            row_ptr,
            cols,
            weights,
        })
    }
}

/// Operations shared by every representation of a row-stochastic matrix.
pub trait TransitionMatrix {
    fn dim(&self) -> usize;

    /// `A^t x`.
    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// `A v`.
    fn apply(&self, v: &[f64]) -> Result<Vec<f64>>;

    /// Row-major dense copy; fails when the dimension exceeds `cap`.
    fn densify(&self, cap: usize) -> Result<DenseMatrix>;
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::DimensionCapExceeded { n, cap })
    } else {
        Ok(())
    }
}

impl TransitionMatrix for StochasticMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        let mut out = vec![0.0; self.n];
        self.transpose_into(x, 1.0, &mut out);
        Ok(out)
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, v.len())?;
        let mut out = vec![0.0; self.n];
        self.right_into(v, 1.0, &mut out);
        Ok(out)
    }

    fn densify(&self, cap: usize) -> Result<DenseMatrix> {
        check_cap(self.n, cap)?;
        let mut d = DenseMatrix::zeros(self.n);
        for i in 0..self.n {
            for (j, w) in self.row(i).iter() {
                d[(i, j)] = w;
            }
        }
        Ok(d)
    }
}

impl TransitionMatrix for GoogleMatrix {
    fn dim(&self) -> usize {
        self.p.n
    }

    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.p.n, x.len())?;
        let mut out = vec![0.0; self.p.n];
        self.p.transpose_into(x, self.c, &mut out);
        match &self.teleport {
            Teleport::Rank1(z) => {
                let mass = (1.0 - self.c) * x.iter().sum::<f64>();
                for (o, zj) in out.iter_mut().zip(z.as_slice()) {
                    *o += mass * zj;
                }
            }
            Teleport::General(e) => e.transpose_into(x, 1.0 - self.c, &mut out),
        }
        Ok(out)
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.p.n, v.len())?;
        let mut out = vec![0.0; self.p.n];
        self.p.right_into(v, self.c, &mut out);
        match &self.teleport {
            Teleport::Rank1(z) => {
                let dot: f64 = z.as_slice().iter().zip(v).map(|(a, b)| a * b).sum();
                let shift = (1.0 - self.c) * dot;
                out.iter_mut().for_each(|o| *o += shift);
            }
            Teleport::General(e) => e.right_into(v, 1.0 - self.c, &mut out),
        }
        Ok(out)
    }

    fn densify(&self, cap: usize) -> Result<DenseMatrix> {
        let n = self.p.n;
        check_cap(n, cap)?;
        let mut d = DenseMatrix::zeros(n);
        match &self.teleport {
            Teleport::Rank1(z) => {
                for i in 0..n {
                    for (j, &zj) in z.as_slice().iter().enumerate() {
                        d[(i, j)] = (1.0 - self.c) * zj;
                    }
                }
            }
            Teleport::General(e) => {
                for i in 0..n {
                    for (j, w) in e.row(i).iter() {
                        d[(i, j)] = (1.0 - self.c) * w;
                    }
                }
            }
        }
        for i in 0..n {
            for (j, w) in self.p.row(i).iter() {
                d[(i, j)] += self.c * w;
            }
        }
        Ok(d)
    }
}

impl TransitionMatrix for DenseMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), x.len())?;
        let mut out = vec![0.0; self.n()];
        for (i, &xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        Ok(out)
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), v.len())?;
        Ok((0..self.n())
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn densify(&self, cap: usize) -> Result<DenseMatrix> {
        check_cap(self.n(), cap)?;
        Ok(self.clone())
    }
}
