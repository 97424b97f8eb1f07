//! Upper bounds on `|lambda_2|` of row-stochastic matrices, and the exact
//! value for damped matrices whose link part has several closed classes.
//!
//! The modulus of the second eigenvalue equals `inf_k q(A^k)^(1/k)`, so every
//! power contributes a valid upper bound. The restriction of `A^t` to the
//! zero-sum subspace is never formed; it only appears through `q(A^k)`.

mod scc;

use serde::Serialize;

use crate::dobrushin::{seminorm_q, ErgodicityCoefficient, DEFAULT_PAIR_CAP};
use crate::error::{Error, Result};
use crate::stochastic_core::{
    check_damping, norm1, DenseMatrix, SimplexVector, StochasticMatrix, Teleport, TransitionMatrix,
    DEFAULT_DENSE_CAP,
};

/// Default number of powers in [`certificate_sequence`].
pub const DEFAULT_K_MAX: usize = 32;

/// Tolerance on row sums of every computed power `A^k`.
const POWER_ROW_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateSource {
    /// `min_k q(A^k)^(1/k)` over a range of powers.
    PowerSequence,
    /// `c q(P) + (1 - c) q(E)` for a general `E`.
    Mixture,
    /// `c q(P)`, which never exceeds `c`, for a rank-1 `E`.
    RankOneMixture,
    /// `P` has at least two closed classes, so `c` is itself an eigenvalue.
    ExactDamping,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateEntry {
    pub k: usize,
    pub q_k: f64,
    pub bound_k: f64,
}

/// Coefficients entering a mixture bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureTerms {
    pub c: f64,
    pub q_p: f64,
    pub q_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCertificate {
    pub source: CertificateSource,
    pub entries: Vec<CertificateEntry>,
    pub best_bound: f64,
    /// True when `best_bound` is the exact value of the second eigenvalue.
    pub exact: bool,
    /// The looser bound `c` reported alongside a rank-1 mixture.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub headline_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixture: Option<MixtureTerms>,
}

impl SpectralCertificate {
    fn single(source: CertificateSource, bound: f64) -> Self {
        SpectralCertificate {
            source,
            entries: vec![CertificateEntry {
                k: 1,
                q_k: bound,
                bound_k: bound,
            }],
            best_bound: bound,
            exact: false,
            headline_bound: None,
            mixture: None,
        }
    }
}

/// `q(A^k)` for `k = 1..=k_max`.
///
/// Alongside `A^k` the recursion keeps `D_k = A^k - e r_k`, where `r_k` is the
/// first row of `A^k`, updated as `D_k = D_{k-1} A`. Row differences of `A^k`
/// are row differences of `D_k`, and computing them from `D_k` keeps relative
/// accuracy even when `q(A^k)` is far below machine epsilon.
///
/// Rows of `D_k` sum to zero. Rounding leaves a small nonzero sum, which `A`
/// carries along its eigenvalue 1 while the true rows decay like
/// `|lambda_2|^k`, so every row is projected back onto the zero-sum subspace
/// after each product.
pub fn power_coefficients(a: &DenseMatrix, k_max: usize) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::KMaxZero);
    }
    a.check_row_stochastic(POWER_ROW_SUM_TOL)?;
    let n = a.n();
    let mut power = a.clone();
    let mut diffs = DenseMatrix::from_fn(n, |i, j| a[(i, j)] - a[(0, j)]);
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k > 1 {
            power = power.matmul(a)?;
            power.check_row_stochastic(POWER_ROW_SUM_TOL)?;
            diffs = diffs.matmul(a)?;
            for i in 0..n {
                let row = diffs.row_mut(i);
                let mean = row.iter().sum::<f64>() / n as f64;
                row.iter_mut().for_each(|x| *x -= mean);
            }
        }
        out.push(seminorm_q(&diffs).clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Bounds `q(A^k)^(1/k)` for `k = 1..=k_max`; the best is their minimum.
pub fn certificate_sequence<M: TransitionMatrix + ?Sized>(
    a: &M,
    k_max: usize,
) -> Result<SpectralCertificate> {
    certificate_sequence_with(a, k_max, DEFAULT_DENSE_CAP)
}

pub fn certificate_sequence_with<M: TransitionMatrix + ?Sized>(
    a: &M,
    k_max: usize,
    dense_cap: usize,
) -> Result<SpectralCertificate> {
    if k_max == 0 {
        return Err(Error::KMaxZero);
    }
    let dense = a.densify(dense_cap)?;
    let entries: Vec<CertificateEntry> = power_coefficients(&dense, k_max)?
        .into_iter()
        .enumerate()
        .map(|(idx, q_k)| {
            let k = idx + 1;
            CertificateEntry {
                k,
                q_k,
                bound_k: q_k.powf(1.0 / k as f64),
            }
        })
        .collect();
    let best_bound = entries.iter().map(|e| e.bound_k).fold(1.0, f64::min);
    Ok(SpectralCertificate {
        source: CertificateSource::PowerSequence,
        entries,
        best_bound,
        exact: false,
        headline_bound: None,
        mixture: None,
    })
}

/// `|lambda_2(c P + (1 - c) E)| <= c q(P) + (1 - c) q(E)`; for a rank-1 `E`
/// this is `c q(P) <= c`.
pub fn mixture_bound(p: &StochasticMatrix, e: &Teleport, c: f64) -> Result<SpectralCertificate> {
    mixture_bound_with(p, e, c, DEFAULT_PAIR_CAP)
}

pub fn mixture_bound_with(
    p: &StochasticMatrix,
    e: &Teleport,
    c: f64,
    pair_cap: usize,
) -> Result<SpectralCertificate> {
    check_damping(c)?;
    let n_e = match e {
        Teleport::Rank1(z) => z.len(),
        Teleport::General(m) => m.n(),
    };
    if n_e != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            actual: n_e,
        });
    }
    let q_p = if c > 0.0 {
        p.coefficient(None, pair_cap)?.q
    } else {
        0.0
    };
    let (q_e, source, headline) = match e {
        Teleport::Rank1(_) => (0.0, CertificateSource::RankOneMixture, Some(c)),
        Teleport::General(m) if c < 1.0 => (
            m.coefficient(None, pair_cap)?.q,
            CertificateSource::Mixture,
            None,
        ),
        Teleport::General(_) => (0.0, CertificateSource::Mixture, None),
    };
    let bound = (c * q_p + (1.0 - c) * q_e).clamp(0.0, 1.0);
    let mut cert = SpectralCertificate::single(source, bound);
    cert.headline_bound = headline;
    cert.mixture = Some(MixtureTerms { c, q_p, q_e });
    Ok(cert)
}

/// Terminal strongly connected components of the transition graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedSubsetReport {
    /// Each component sorted ascending; components ordered by smallest node.
    pub terminal_components: Vec<Vec<usize>>,
    pub count: usize,
    pub zero_threshold: f64,
}

/// Irreducible closed subsets of `P`: terminal SCCs of `i -> j` iff
/// `p_ij > zero_threshold`. A positive threshold changes the graph and hence
/// the answer.
pub fn closed_subsets(p: &StochasticMatrix, zero_threshold: f64) -> ClosedSubsetReport {
    let (comp, n_comp) = scc::strongly_connected(p, zero_threshold);
    let mut terminal = vec![true; n_comp];
    for (i, &ci) in comp.iter().enumerate() {
        if !terminal[ci] {
            continue;
        }
        let leaves = p
            .row(i)
            .iter()
            .any(|(j, w)| w > zero_threshold && comp[j] != ci);
        if leaves {
            terminal[ci] = false;
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n_comp];
    for (i, &ci) in comp.iter().enumerate() {
        if terminal[ci] {
            groups[ci].push(i);
        }
    }
    let mut terminal_components: Vec<Vec<usize>> =
        groups.into_iter().filter(|g| !g.is_empty()).collect();
    terminal_components.sort_by_key(|g| g[0]);
    ClosedSubsetReport {
        count: terminal_components.len(),
        terminal_components,
        zero_threshold,
    }
}

/// When `P` has two or more closed classes, `c` is an eigenvalue of
/// `c P + (1 - c) e z^t` and the second eigenvalue is exactly `c`. Otherwise
/// falls back to [`mixture_bound`].
pub fn exactness_check(
    p: &StochasticMatrix,
    teleport: &SimplexVector,
    c: f64,
) -> Result<SpectralCertificate> {
    exactness_check_with(p, teleport, c, DEFAULT_PAIR_CAP)
}

pub fn exactness_check_with(
    p: &StochasticMatrix,
    teleport: &SimplexVector,
    c: f64,
    pair_cap: usize,
) -> Result<SpectralCertificate> {
    check_damping(c)?;
    if teleport.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            actual: teleport.len(),
        });
    }
    if closed_subsets(p, 0.0).count >= 2 {
        let mut cert = SpectralCertificate::single(CertificateSource::ExactDamping, c);
        cert.exact = true;
        cert.headline_bound = Some(c);
        return Ok(cert);
    }
    mixture_bound_with(p, &Teleport::Rank1(teleport.clone()), c, pair_cap)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_fixed(p: &StochasticMatrix, v: &[f64]) -> Result<()> {
    let pv = p.apply(v)?;
    let residual: f64 = pv.iter().zip(v).map(|(a, b)| (a - b).abs()).sum();
    if residual > 1e-8 * norm1(v) {
        return Err(Error::NotFixedVector { residual });
    }
    Ok(())
}

/// Eigenvector of `c P + (1 - c) e z^t` for the eigenvalue `c`, built from two
/// independent fixed vectors `P v = v`, `P w = w`.
///
/// A fixed vector orthogonal to `z` is returned as is (`v` first); otherwise
/// the combination `<v, z> w - <w, z> v` is orthogonal to `z` and nonzero.
pub fn construct_second_eigenvector(
    v: &[f64],
    w: &[f64],
    z: &SimplexVector,
    p: &StochasticMatrix,
    c: f64,
) -> Result<Vec<f64>> {
    check_damping(c)?;
    let n = p.n();
    for len in [v.len(), w.len(), z.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    check_fixed(p, v)?;
    check_fixed(p, w)?;

    let vz = dot(v, z.as_slice());
    let wz = dot(w, z.as_slice());
    if vz.abs() <= 1e-12 {
        return Ok(v.to_vec());
    }
    if wz.abs() <= 1e-12 {
        return Ok(w.to_vec());
    }
    let xi: Vec<f64> = v.iter().zip(w).map(|(a, b)| -wz * a + vz * b).collect();
    if norm1(&xi) <= 1e-12 * (norm1(v) + norm1(w)) {
        return Err(Error::DependentVectors);
    }
    Ok(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic_core::{build_google, validate_stochastic};

    fn sparse(rows: Vec<Vec<(usize, f64)>>) -> StochasticMatrix {
        let n = rows.len();
        validate_stochastic(rows, n, 1e-10).unwrap()
    }

    fn two_blocks() -> StochasticMatrix {
        sparse(vec![
            vec![(0, 0.5), (1, 0.5)],
            vec![(0, 0.1), (1, 0.9)],
            vec![(2, 0.2), (3, 0.8)],
            vec![(2, 0.7), (3, 0.3)],
        ])
    }

    #[test]
    fn two_by_two_is_tight_at_k1() {
        let a = sparse(vec![vec![(0, 0.5), (1, 0.5)], vec![(0, 0.25), (1, 0.75)]]);
        let cert = certificate_sequence(&a, 1).unwrap();
        assert_eq!(cert.entries.len(), 1);
        assert!((cert.best_bound - 0.25).abs() < 1e-15);
        assert_eq!(cert.source, CertificateSource::PowerSequence);
    }

    #[test]
    fn identity_and_swap_stay_at_one() {
        let cert = certificate_sequence(&StochasticMatrix::identity(4).unwrap(), 6).unwrap();
        assert!(cert
            .entries
            .iter()
            .all(|e| e.q_k == 1.0 && e.bound_k == 1.0));
        let swap = sparse(vec![vec![(1, 1.0)], vec![(0, 1.0)]]);
        let cert = certificate_sequence(&swap, 7).unwrap();
        assert!(cert.entries.iter().all(|e| e.q_k == 1.0));
        assert_eq!(cert.best_bound, 1.0);
        let ks: Vec<usize> = cert.entries.iter().map(|e| e.k).collect();
        assert_eq!(ks, (1..=7).collect::<Vec<_>>());
    }

    #[test]
    fn sequence_errors() {
        let i2 = StochasticMatrix::identity(2).unwrap();
        assert!(matches!(certificate_sequence(&i2, 0), Err(Error::KMaxZero)));
        assert!(matches!(
            certificate_sequence_with(&i2, 3, 1),
            Err(Error::DimensionCapExceeded { .. })
        ));
    }

    #[test]
    fn mixture_examples() {
        let i2 = StochasticMatrix::identity(2).unwrap();
        let z = SimplexVector::uniform(2).unwrap();
        let cert = mixture_bound(&i2, &Teleport::Rank1(z.clone()), 0.85).unwrap();
        assert!((cert.best_bound - 0.85).abs() < 1e-15);
        assert_eq!(cert.headline_bound, Some(0.85));
        assert_eq!(cert.source, CertificateSource::RankOneMixture);

        let cert = mixture_bound(&two_blocks(), &Teleport::Rank1(z.clone()), 0.0);
        assert!(matches!(cert, Err(Error::DimensionMismatch { .. })));
        let z4 = SimplexVector::uniform(4).unwrap();
        let cert = mixture_bound(&two_blocks(), &Teleport::Rank1(z4), 0.0).unwrap();
        assert_eq!(cert.best_bound, 0.0);

        let e = sparse(vec![vec![(1, 1.0)], vec![(0, 1.0)]]);
        let cert = mixture_bound(&i2, &Teleport::General(e.clone()), 0.0).unwrap();
        assert_eq!(cert.best_bound, 1.0);
        assert_eq!(cert.source, CertificateSource::Mixture);
        assert!(matches!(
            mixture_bound(&i2, &Teleport::General(e), -0.1),
            Err(Error::DampingOutOfRange(_))
        ));
    }

    #[test]
    fn closed_subset_examples() {
        let r = closed_subsets(&two_blocks(), 0.0);
        assert_eq!(r.count, 2);
        assert_eq!(r.terminal_components, vec![vec![0, 1], vec![2, 3]]);

        let positive = sparse(vec![vec![(0, 0.4), (1, 0.6)], vec![(0, 0.9), (1, 0.1)]]);
        assert_eq!(closed_subsets(&positive, 0.0).count, 1);
        assert_eq!(
            closed_subsets(&StochasticMatrix::identity(3).unwrap(), 0.0).count,
            3
        );

        // Transient state 4 feeds both blocks and is not closed.
        let with_transient = sparse(vec![
            vec![(0, 0.5), (1, 0.5)],
            vec![(0, 0.1), (1, 0.9)],
            vec![(2, 0.2), (3, 0.8)],
            vec![(2, 0.7), (3, 0.3)],
            vec![(0, 0.3), (3, 0.3), (4, 0.4)],
        ]);
        let r = closed_subsets(&with_transient, 0.0);
        assert_eq!(r.terminal_components, vec![vec![0, 1], vec![2, 3]]);

        // Thresholding away the weak link makes node 1 absorbing.
        let weak = sparse(vec![vec![(0, 0.5), (1, 0.5)], vec![(0, 0.01), (1, 0.99)]]);
        assert_eq!(closed_subsets(&weak, 0.0).count, 1);
        assert_eq!(
            closed_subsets(&weak, 0.05).terminal_components,
            vec![vec![1]]
        );
    }

    #[test]
    fn exactness_examples() {
        let z = SimplexVector::uniform(4).unwrap();
        let cert = exactness_check(&two_blocks(), &z, 0.85).unwrap();
        assert!(cert.exact);
        assert_eq!(cert.best_bound, 0.85);
        assert_eq!(cert.source, CertificateSource::ExactDamping);

        let cert = exactness_check(&two_blocks(), &z, 1.0).unwrap();
        assert!(cert.exact && cert.best_bound == 1.0);

        let connected = sparse(vec![
            vec![(1, 1.0)],
            vec![(0, 0.5), (2, 0.5)],
            vec![(0, 1.0)],
        ]);
        let z3 = SimplexVector::uniform(3).unwrap();
        let cert = exactness_check(&connected, &z3, 0.85).unwrap();
        assert!(!cert.exact);
        let q = crate::dobrushin::dobrushin_coefficient(&connected)
            .unwrap()
            .q;
        assert!((cert.best_bound - 0.85 * q).abs() < 1e-15);
    }

    fn residual(p: &StochasticMatrix, z: &SimplexVector, c: f64, xi: &[f64]) -> f64 {
        let a = build_google(p.clone(), c, z.clone()).unwrap();
        let axi = a.apply(xi).unwrap();
        axi.iter()
            .zip(xi)
            .map(|(a, b)| (a - c * b).abs())
            .sum::<f64>()
            / norm1(xi)
    }

    #[test]
    fn second_eigenvector_by_hand() {
        let i2 = StochasticMatrix::identity(2).unwrap();
        let z = SimplexVector::uniform(2).unwrap();
        let xi = construct_second_eigenvector(&[1.0, 0.0], &[0.0, 1.0], &z, &i2, 0.85).unwrap();
        assert_eq!(xi, vec![-0.5, 0.5]);
        assert!(residual(&i2, &z, 0.85, &xi) < 1e-15);
    }

    #[test]
    fn second_eigenvector_orthogonal_case() {
        let p = two_blocks();
        // z lives on the first block only; the second block's indicator is
        // orthogonal to it.
        let z = SimplexVector::new(vec![0.5, 0.5, 0.0, 0.0], 1e-12).unwrap();
        let v = [0.0, 0.0, 1.0, 1.0];
        let w = [1.0, 1.0, 0.0, 0.0];
        let out = construct_second_eigenvector(&v, &w, &z, &p, 0.6).unwrap();
        assert_eq!(out, v.to_vec());
        assert!(residual(&p, &z, 0.6, &out) < 1e-15);
    }

    #[test]
    fn second_eigenvector_errors() {
        let p = two_blocks();
        let z = SimplexVector::uniform(4).unwrap();
        let v = [1.0, 1.0, 0.0, 0.0];
        assert!(matches!(
            construct_second_eigenvector(&v, &v, &z, &p, 0.85),
            Err(Error::DependentVectors)
        ));
        assert!(matches!(
            construct_second_eigenvector(&v, &[1.0, 0.0, 0.0, 0.0], &z, &p, 0.85),
            Err(Error::NotFixedVector { .. })
        ));
    }
}
