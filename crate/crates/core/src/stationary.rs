//! Power iteration on the probability simplex with a certified error.
//!
//! If `q(A^m) = kappa < 1`, the map `x -> (A^t)^m x` is a `kappa`-contraction
//! of the simplex in the L1 norm, and the standard fixed-point estimates give
//!
//! ```text
//! ||y_j - v||_1 <= kappa / (1 - kappa) * ||y_j - y_{j-1}||_1        (a posteriori)
//! ||y_j - v||_1 <= kappa^j / (1 - kappa) * ||y_1 - y_0||_1          (a priori)
//! ```
//!
//! Both reported bounds also carry `delta / (1 - kappa)`, where `delta` bounds
//! the rounding error of one computed step. Without it the a-posteriori bound
//! can fall a few ulps short when it is tight, e.g. for any 2x2 chain.

use serde::Serialize;

use crate::dobrushin::{CoefficientForm, ErgodicityCoefficient, DEFAULT_PAIR_CAP};
use crate::error::{Error, Result};
use crate::stochastic_core::{SimplexVector, TransitionMatrix, DEFAULT_DENSE_CAP};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_M: usize = 8;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionCertificate {
    pub m: usize,
    pub kappa: f64,
    pub iterations: usize,
    pub a_priori_bound: f64,
    pub a_posteriori_bound: f64,
    /// Rounding term `delta / (1 - kappa)` included in both bounds.
    pub rounding_term: f64,
    pub x_star: SimplexVector,
    /// `||y_j - y_{j-1}||_1` for `j = 1..=iterations`.
    #[serde(skip)]
    pub decrements: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    pub tol: f64,
    pub max_m: usize,
    pub max_iters: usize,
    pub dense_cap: usize,
    pub pair_cap: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            tol: DEFAULT_TOL,
            max_m: DEFAULT_MAX_M,
            max_iters: DEFAULT_MAX_ITERS,
            dense_cap: DEFAULT_DENSE_CAP,
            pair_cap: DEFAULT_PAIR_CAP,
        }
    }
}

/// Smallest `m <= max_m` with `q(A^m) < 1`, and that coefficient.
///
/// `m = 1` uses the matrix's own representation; larger `m` densify. The
/// overlap form is used throughout so that disjoint rows give exactly 1.
pub fn contraction_rate<M>(
    a: &M,
    max_m: usize,
    dense_cap: usize,
    pair_cap: usize,
) -> Result<(usize, f64)>
where
    M: TransitionMatrix + ErgodicityCoefficient + ?Sized,
{
    let form = Some(CoefficientForm::OneMinusOverlap);
    if max_m == 0 {
        return Err(Error::NoContraction { max_m });
    }
    let q1 = a.coefficient(form, pair_cap)?.q;
    if q1 < 1.0 {
        return Ok((1, q1));
    }
    if max_m == 1 {
        return Err(Error::NoContraction { max_m });
    }
    let base = a.densify(dense_cap)?;
    let mut power = base.clone();
    for m in 2..=max_m {
        power = power.matmul(&base)?;
        let q = power.coefficient(form, pair_cap)?.q;
        if q < 1.0 {
            return Ok((m, q));
        }
    }
    Err(Error::NoContraction { max_m })
}

/// Worst-case L1 rounding error of one step `y -> (A^t)^m y / sum`: each
/// product entry sums at most `n` terms, plus the teleport sum and the
/// renormalization.
fn step_rounding(n: usize, m: usize) -> f64 {
    m as f64 * (3 * n + 4) as f64 * (f64::EPSILON / 2.0)
}

/// `||A^t x - x||_1`.
pub fn fixed_point_residual<M: TransitionMatrix + ?Sized>(a: &M, x: &[f64]) -> Result<f64> {
    let y = a.apply_transpose(x)?;
    Ok(y.iter().zip(x).map(|(a, b)| (a - b).abs()).sum())
}

pub fn stationary_distribution<M>(
    a: &M,
    x0: &SimplexVector,
    tol: f64,
    max_m: usize,
    max_iters: usize,
) -> Result<ContractionCertificate>
where
    M: TransitionMatrix + ErgodicityCoefficient + ?Sized,
{
    stationary_distribution_with(
        a,
        x0,
        &StationaryOptions {
            tol,
            max_m,
            max_iters,
            ..StationaryOptions::default()
        },
    )
}

/// Iterates `y -> (A^t)^m y` from `x0` until the a-posteriori bound is at
/// most `tol`. On [`Error::MaxItersExceeded`] the partial certificate is
/// returned inside the error.
pub fn stationary_distribution_with<M>(
    a: &M,
    x0: &SimplexVector,
    opts: &StationaryOptions,
) -> Result<ContractionCertificate>
where
    M: TransitionMatrix + ErgodicityCoefficient + ?Sized,
{
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidTolerance(opts.tol));
    }
    if x0.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: x0.len(),
        });
    }
    let (m, kappa) = contraction_rate(a, opts.max_m, opts.dense_cap, opts.pair_cap)?;
    let ratio = kappa / (1.0 - kappa);
    let rounding = step_rounding(a.dim(), m) / (1.0 - kappa);

    let step = |y: &[f64]| -> Result<Vec<f64>> {
        let mut out = y.to_vec();
        for _ in 0..m {
            out = a.apply_transpose(&out)?;
        }
        let s: f64 = out.iter().sum();
        out.iter_mut().for_each(|v| *v /= s);
        Ok(out)
    };

    let mut y = x0.as_slice().to_vec();
    let mut decrements = Vec::new();
    let mut first = 0.0;
    let mut a_post = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iters.max(1) {
        let next = step(&y)?;
        let d: f64 = next.iter().zip(&y).map(|(p, q)| (p - q).abs()).sum();
        y = next;
        iterations += 1;
        if iterations == 1 {
            first = d;
        }
        decrements.push(d);
        a_post = ratio * d + rounding;
        if a_post <= opts.tol {
            break;
        }
    }

    let a_priori = kappa.powi(iterations as i32) / (1.0 - kappa) * first + rounding;
    // Entries are sums of nonnegative products, renormalized above.
    let x_star = SimplexVector::new(y.iter().map(|v| v.max(0.0)).collect(), 1e-8)?;
    let cert = ContractionCertificate {
        m,
        kappa,
        iterations,
        a_priori_bound: a_priori,
        a_posteriori_bound: a_post,
        rounding_term: rounding,
        x_star,
        decrements,
    };
    if a_post > opts.tol {
        return Err(Error::MaxItersExceeded(Box::new(cert)));
    }
    Ok(cert)
}
