//! Eigenvalues of small dense complex matrices: Householder reduction to
//! upper Hessenberg form followed by single-shift QR with Wilkinson shifts.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::linalg::Mat;
use crate::{CoreError, Result};
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

fn to_hessenberg(h: &mut Mat<Complex64>) {
    let n = h.dim();
    for k in 0..n.saturating_sub(2) {
        let alpha: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha;
        let vnorm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= vnorm;
        }
        // H ← (I − 2vvᴴ) H (I − 2vvᴴ)
        for j in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)]).sum();
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= *vi * s * 2.0;
            }
        }
        for i in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(t, vi)| h[(i, k + 1 + t)] * vi).sum();
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= s * vi.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = (a + d) * 0.5 + disc;
    let mu2 = (a + d) * 0.5 - disc;
    if (mu1 - d).norm() < (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

/// All eigenvalues of a square complex matrix, in deflation order.
pub fn eigenvalues(a: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    let n = a.dim();
    let mut h = a.clone();
    let scale = h.max_abs();
    if n == 0 {
        return Ok(Vec::new());
    }
    if scale == 0.0 {
        return Ok(alloc::vec![Complex64::new(0.0, 0.0); n]);
    }
    to_hessenberg(&mut h);
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut since_deflation = 0usize;
    loop {
        if hi == 0 {
            out[0] = h[(0, 0)];
            break;
        }
        // locate the active unreduced block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let tol = f64::EPSILON * if diag > 0.0 { diag } else { scale };
            if sub <= tol {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        iter += 1;
        since_deflation += 1;
        if iter > MAX_SWEEPS_PER_EIGENVALUE * n {
            return Err(CoreError::EigenNoConvergence);
        }
        let mut mu = wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
        if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            mu += Complex64::new(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm() * 0.43);
        }
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (t, (c, s)) in rots.into_iter().enumerate() {
            let k = lo + t;
            let last = (k + 2).min(hi);
            for i in lo..=last {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + s.conj() * y;
                h[(i, k + 1)] = -s * x + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(out)
}

/// Eigenvalues of a real matrix.
pub fn eigenvalues_real(a: &Mat<f64>) -> Result<Vec<Complex64>> {
    let n = a.dim();
    let mut c = Mat::<Complex64>::zeros(n);
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] = Complex64::new(a[(i, j)], 0.0);
        }
    }
    eigenvalues(&c)
}

/// Largest real part among the eigenvalues of `a`.
pub fn spectral_abscissa(a: &Mat<f64>) -> Result<f64> {
    Ok(eigenvalues_real(a)?.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re)))
}
