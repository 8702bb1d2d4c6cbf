//! Steady-state covariance of `dw = A w dt + noise`, i.e. the solution of
//! `A Σ + Σ Aᵀ + D = 0`.

use alloc::vec::Vec;

use super::eigen::spectral_abscissa;
use super::linalg::{solve, Mat};
use crate::{CoreError, Result};

/// A Hurwitz drift matrix `a` and a symmetric positive semidefinite diffusion `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovProblem {
    pub a: Mat<f64>,
    pub d: Mat<f64>,
}

/// Solves the continuous Lyapunov equation by Kronecker vectorisation.
///
/// `vec(AΣ + ΣAᵀ) = (I⊗A + A⊗I) vec(Σ)` with column-major `vec`; the dense
/// `n²×n²` system is solved by LU and the result symmetrised.
pub fn lyapunov_steady(prob: &LyapunovProblem) -> Result<Mat<f64>> {
    let n = prob.a.dim();
    assert_eq!(prob.d.dim(), n, "dimension mismatch");
    let max_re = spectral_abscissa(&prob.a)?;
    if !(max_re < 0.0) {
        return Err(CoreError::NotHurwitz { max_re });
    }
    let nn = n * n;
    let mut k = Mat::<f64>::zeros(nn);
    // column-major index of Σ[i][j] is j*n + i
    for i in 0..n {
        for j in 0..n {
            let row = j * n + i;
            for l in 0..n {
                // (AΣ)[i][j] = Σ_l A[i][l] Σ[l][j]
                k[(row, j * n + l)] += prob.a[(i, l)];
                // (ΣAᵀ)[i][j] = Σ_l Σ[i][l] A[j][l]
                k[(row, l * n + i)] += prob.a[(j, l)];
            }
        }
    }
    let rhs: Vec<f64> = (0..nn).map(|idx| -prob.d[(idx % n, idx / n)]).collect();
    let x = solve(&k, &rhs)?;
    let mut sigma = Mat::<f64>::zeros(n);
    for i in 0..n {
        for j in 0..n {
            sigma[(i, j)] = 0.5 * (x[j * n + i] + x[i * n + j]);
        }
    }
    Ok(sigma)
}

/// Frobenius norm of `AΣ + ΣAᵀ + D`.
pub fn lyapunov_residual(prob: &LyapunovProblem, sigma: &Mat<f64>) -> f64 {
    let lhs = prob.a.matmul(sigma).add(&sigma.matmul(&prob.a.transpose())).add(&prob.d);
    lhs.frobenius_norm()
}
