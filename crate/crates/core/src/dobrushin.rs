//! Dobrushin ergodicity coefficient.
//!
//! For a row-stochastic `B`,
//!
//! ```text
//! q(B) = 1/2 max_{i,k} sum_j |b_ij - b_kj| = 1 - min_{i,k} sum_j min(b_ij, b_kj)
//! ```
//!
//! which is also the L1 operator norm of `B^t` restricted to zero-sum
//! vectors. Every unordered row pair is evaluated; there is no sampling, since
//! an under-estimate of `q` would break the eigenvalue bounds built on it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stochastic_core::{DenseMatrix, GoogleMatrix, RowView, StochasticMatrix, Teleport};

/// Largest dimension for which all `n(n-1)/2` row pairs are evaluated by
/// default.
pub const DEFAULT_PAIR_CAP: usize = 5000;

const DENSE_STOCHASTIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientForm {
    /// `1/2 max ||b_i - b_k||_1`
    HalfL1,
    /// `1 - min sum_j min(b_ij, b_kj)`
    OneMinusOverlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientResult {
    pub q: f64,
    /// Lexicographically smallest pair `(i, k)`, `i < k`, attaining `q`.
    pub argmax_pair: (usize, usize),
    pub form_used: CoefficientForm,
}

/// `sum_j min(a_j, b_j)` over two sorted sparse rows.
pub fn overlap(a: RowView<'_>, b: RowView<'_>) -> f64 {
    let (mut x, mut y) = (0, 0);
    let mut acc = 0.0;
    while x < a.len() && y < b.len() {
        let (ca, cb) = (a.cols[x], b.cols[y]);
        if ca == cb {
            acc += a.weights[x].min(b.weights[y]);
            x += 1;
            y += 1;
        } else if ca < cb {
            x += 1;
        } else {
            y += 1;
        }
    }
    acc
}

/// `1/2 sum_j |a_j - b_j|` over two sorted sparse rows.
pub fn half_l1_distance(a: RowView<'_>, b: RowView<'_>) -> f64 {
    let (mut x, mut y) = (0, 0);
    let mut acc = 0.0;
    while x < a.len() || y < b.len() {
        let ca = a.cols.get(x).copied().unwrap_or(usize::MAX);
        let cb = b.cols.get(y).copied().unwrap_or(usize::MAX);
        if ca == cb {
            acc += (a.weights[x] - b.weights[y]).abs();
            x += 1;
            y += 1;
        } else if ca < cb {
            acc += a.weights[x];
            x += 1;
        } else {
            acc += b.weights[y];
            y += 1;
        }
    }
    0.5 * acc
}

fn dense_half_l1(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn dense_overlap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

/// Half the largest L1 distance between two rows of an arbitrary square
/// matrix. A seminorm on all real matrices; equals `q` on stochastic ones.
pub fn seminorm_q(b: &DenseMatrix) -> f64 {
    pairwise_max(b.n(), |i, k| dense_half_l1(b.row(i), b.row(k))).0
}

/// Maximum of `pair_value(i, k)` over `i < k`, with the lexicographically
/// smallest maximizer. Returns `(0, (0, 0))` when `n < 2`.
fn pairwise_max<F>(n: usize, pair_value: F) -> (f64, (usize, usize))
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    if n < 2 {
        return (0.0, (0, 0));
    }
    let pick = |a: (f64, (usize, usize)), b: (f64, (usize, usize))| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    (0..n - 1)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|k| (pair_value(i, k), (i, k)))
                .fold((f64::NEG_INFINITY, (i, i + 1)), pick)
        })
        .reduce(|| (f64::NEG_INFINITY, (usize::MAX, usize::MAX)), pick)
}

fn finish(n: usize, raw: (f64, (usize, usize)), form: CoefficientForm) -> CoefficientResult {
    let (value, pair) = raw;
    let q = match form {
        CoefficientForm::HalfL1 => value,
        CoefficientForm::OneMinusOverlap => 1.0 - value,
    };
    CoefficientResult {
        q: if n < 2 { 0.0 } else { q.clamp(0.0, 1.0) },
        argmax_pair: pair,
        form_used: form,
    }
}

fn check_pairs(n: usize, pair_cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if n > pair_cap {
        return Err(Error::PairCapExceeded { n, cap: pair_cap });
    }
    Ok(())
}

/// Types whose Dobrushin coefficient can be computed exactly.
pub trait ErgodicityCoefficient {
    /// `form = None` picks the representation's natural path.
    fn coefficient(
        &self,
        form: Option<CoefficientForm>,
        pair_cap: usize,
    ) -> Result<CoefficientResult>;
}

impl ErgodicityCoefficient for StochasticMatrix {
    fn coefficient(
        &self,
        form: Option<CoefficientForm>,
        pair_cap: usize,
    ) -> Result<CoefficientResult> {
        let n = self.n();
        check_pairs(n, pair_cap)?;
        let form = form.unwrap_or(CoefficientForm::OneMinusOverlap);
        let raw = match form {
            // Maximizing the negated overlap keeps the tie-break on (i, k).
            CoefficientForm::OneMinusOverlap => {
                let (v, p) = pairwise_max(n, |i, k| -overlap(self.row(i), self.row(k)));
                (-v, p)
            }
            CoefficientForm::HalfL1 => {
                pairwise_max(n, |i, k| half_l1_distance(self.row(i), self.row(k)))
            }
        };
        Ok(finish(n, raw, form))
    }
}

impl ErgodicityCoefficient for DenseMatrix {
    fn coefficient(
        &self,
        form: Option<CoefficientForm>,
        pair_cap: usize,
    ) -> Result<CoefficientResult> {
        let n = self.n();
        check_pairs(n, pair_cap)?;
        self.check_row_stochastic(DENSE_STOCHASTIC_TOL)?;
        let form = form.unwrap_or(CoefficientForm::HalfL1);
        let raw = match form {
            CoefficientForm::OneMinusOverlap => {
                let (v, p) = pairwise_max(n, |i, k| -dense_overlap(self.row(i), self.row(k)));
                (-v, p)
            }
            CoefficientForm::HalfL1 => {
                pairwise_max(n, |i, k| dense_half_l1(self.row(i), self.row(k)))
            }
        };
        Ok(finish(n, raw, form))
    }
}

impl ErgodicityCoefficient for GoogleMatrix {
    /// With a rank-1 teleport every row difference is `c (p_i - p_k)`, so
    /// `q(A) = c q(P)`; a general `E` is mixed sparsely first.
    fn coefficient(
        &self,
        form: Option<CoefficientForm>,
        pair_cap: usize,
    ) -> Result<CoefficientResult> {
        match self.teleport() {
            Teleport::Rank1(_) => {
                let mut r = self.link_matrix().coefficient(form, pair_cap)?;
                let c = self.damping();
                if c == 0.0 && r.argmax_pair != (0, 0) {
                    r.argmax_pair = (0, 1);
                }
                r.q = (c * r.q).clamp(0.0, 1.0);
                Ok(r)
            }
            Teleport::General(_) => {
                check_pairs(self.link_matrix().n(), pair_cap)?;
                self.sparse_mixture()
                    .expect("general teleport")
                    .coefficient(form, pair_cap)
            }
        }
    }
}

/// `q(B)` on the natural path with the default pair cap.
pub fn dobrushin_coefficient<M: ErgodicityCoefficient + ?Sized>(
    b: &M,
) -> Result<CoefficientResult> {
    b.coefficient(None, DEFAULT_PAIR_CAP)
}

pub fn dobrushin_coefficient_with<M: ErgodicityCoefficient + ?Sized>(
    b: &M,
    form: CoefficientForm,
    pair_cap: usize,
) -> Result<CoefficientResult> {
    b.coefficient(Some(form), pair_cap)
}

/// `(e_i - e_k) / 2`: a unit-norm zero-sum vector with `||B^t y||_1 = q(B)`
/// when `(i, k)` is the argmax pair.
pub fn tightness_witness(n: usize, pair: (usize, usize)) -> Vec<f64> {
    let mut y = vec![0.0; n];
    if pair.0 != pair.1 {
        y[pair.0] = 0.5;
        y[pair.1] = -0.5;
    }
    y
}
