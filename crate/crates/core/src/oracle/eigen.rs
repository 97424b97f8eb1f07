//! Dense nonsymmetric eigenvalues: Parlett-Reinsch balancing, Householder
//! reduction to upper Hessenberg form, then Francis double-shift QR on the
//! Hessenberg matrix (EISPACK `balanc`/`orthes`/`hqr` lineage).

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::stochastic_core::DenseMatrix;

/// Per-eigenvalue iteration budget before [`Error::NoConvergence`].
const MAX_ITERS_PER_ROOT: usize = 120;

/// All eigenvalues of `a`, unsorted, with algebraic multiplicity.
pub(crate) fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = a.n();
    let mut h: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    balance(&mut h);
    hessenberg(&mut h);
    hqr(&mut h)
}

fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i][j] *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

fn hessenberg(h: &mut [Vec<f64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut sumsq = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            sumsq += ort[i] * ort[i];
        }
        let mut g = sumsq.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        let hh = sumsq - ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let f = (m..=high).rev().map(|i| ort[i] * h[i][j]).sum::<f64>() / hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut() {
            let f = (m..=high).rev().map(|j| ort[j] * row[j]).sum::<f64>() / hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        h[m][m - 1] = scale * g;
        for i in m + 1..=high {
            h[i][m - 1] = 0.0;
        }
    }
}

fn hqr(h: &mut [Vec<f64>]) -> Result<Vec<Complex64>> {
    let nn = h.len();
    let mut wr = vec![0.0; nn];
    let mut wi = vec![0.0; nn];
    if nn == 0 {
        return Ok(Vec::new());
    }
    let eps = f64::EPSILON;
    let mut exshift = 0.0;

    let mut norm = 0.0;
    for (i, row) in h.iter().enumerate() {
        for v in &row[i.saturating_sub(1)..] {
            norm += v.abs();
        }
    }

    // `n` is the index of the last unconverged row; -1 ends the loop.
    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    while n >= 0 {
        let nu = n as usize;
        let mut l = nu;
        while l > 0 {
            let mut s = h[l - 1][l - 1].abs() + h[l][l].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[l][l - 1].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            wr[nu] = h[nu][nu] + exshift;
            wi[nu] = 0.0;
            n -= 1;
            iter = 0;
            continue;
        }

        if l + 1 == nu {
            let w = h[nu][nu - 1] * h[nu - 1][nu];
            let p = (h[nu - 1][nu - 1] - h[nu][nu]) / 2.0;
            let q = p * p + w;
            let z = q.abs().sqrt();
            let x = h[nu][nu] + exshift;
            if q >= 0.0 {
                let z = if p >= 0.0 { p + z } else { p - z };
                wr[nu - 1] = x + z;
                wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                wi[nu - 1] = 0.0;
                wi[nu] = 0.0;
            } else {
                wr[nu - 1] = x + p;
                wr[nu] = x + p;
                wi[nu - 1] = z;
                wi[nu] = -z;
            }
            n -= 2;
            iter = 0;
            continue;
        }

        // No convergence yet: form the shift.
        let mut x = h[nu][nu];
        let mut y = h[nu - 1][nu - 1];
        let mut w = h[nu][nu - 1] * h[nu - 1][nu];

        if iter > 0 && iter.is_multiple_of(10) {
            if iter.is_multiple_of(30) {
                let mut s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[i][i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = 0.964;
                    w = 0.964;
                }
            } else {
                exshift += x;
                for i in 0..=nu {
                    h[i][i] -= x;
                }
                let s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
        }
        iter += 1;
        if iter > MAX_ITERS_PER_ROOT {
            return Err(Error::NoConvergence(MAX_ITERS_PER_ROOT));
        }

        // Look for two consecutive small sub-diagonal elements.
        let mut m = nu - 2;
        let (mut p, mut q, mut r);
        loop {
            let z = h[m][m];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / h[m + 1][m] + h[m][m + 1];
            q = h[m + 1][m + 1] - z - rr - ss;
            r = h[m + 2][m + 1];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let lhs = h[m][m - 1].abs() * (q.abs() + r.abs());
            let rhs = eps * (p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs()));
            if lhs < rhs {
                break;
            }
            m -= 1;
        }

        for i in m + 2..=nu {
            h[i][i - 2] = 0.0;
            if i > m + 2 {
                h[i][i - 3] = 0.0;
            }
        }

        // Double QR step on rows l..=n, columns m..=n.
        for k in m..nu {
            let notlast = k != nu - 1;
            let mut xk = 0.0;
            if k != m {
                p = h[k][k - 1];
                q = h[k + 1][k - 1];
                r = if notlast { h[k + 2][k - 1] } else { 0.0 };
                xk = p.abs() + q.abs() + r.abs();
                if xk == 0.0 {
                    continue;
                }
                p /= xk;
                q /= xk;
                r /= xk;
            }
            let mut s = (p * p + q * q + r * r).sqrt();
            if p < 0.0 {
                s = -s;
            }
            if s == 0.0 {
                continue;
            }
            if k != m {
                h[k][k - 1] = -s * xk;
            } else if l != m {
                h[k][k - 1] = -h[k][k - 1];
            }
            p += s;
            let xs = p / s;
            let ys = q / s;
            let zs = r / s;
            q /= p;
            r /= p;

            for j in k..nn {
                let mut pp = h[k][j] + q * h[k + 1][j];
                if notlast {
                    pp += r * h[k + 2][j];
                    h[k + 2][j] -= pp * zs;
                }
                h[k][j] -= pp * xs;
                h[k + 1][j] -= pp * ys;
            }
            for i in 0..=nu.min(k + 3) {
                let mut pp = xs * h[i][k] + ys * h[i][k + 1];
                if notlast {
                    pp += zs * h[i][k + 2];
                    h[i][k + 2] -= pp * r;
                }
                h[i][k] -= pp;
                h[i][k + 1] -= pp * q;
            }
        }
    }

    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}
