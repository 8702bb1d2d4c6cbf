//! Polynomial roots: companion-matrix eigenvalues with Newton polishing,
//! Cardano for real cubics, and bracketing bisection.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::eigen::eigenvalues;
use super::linalg::Mat;
use crate::{CoreError, Result};
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

/// Evaluates `Σ c[k] x^k` and its derivative by Horner's rule.
pub fn eval_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Roots of `Σ coeffs[k] x^k` (ascending order of powers).
///
/// The companion matrix of the scaled monic polynomial is diagonalised and
/// every root is then refined by at most five Newton steps, each accepted
/// only when it reduces the residual.
pub fn roots_polynomial(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    let lead = coeffs.last().copied().unwrap_or_default();
    if n == 0 || lead.norm() < 1e-300 {
        return Err(CoreError::DegeneratePolynomial(lead.norm()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let mut s = 0.0f64;
    for (k, c) in monic.iter().take(n).enumerate() {
        let m = c.norm();
        if m > 0.0 {
            s = s.max(m.powf(1.0 / (n - k) as f64));
        }
    }
    if s == 0.0 {
        return Ok(alloc::vec![Complex64::new(0.0, 0.0); n]);
    }
    let mut comp = Mat::<Complex64>::zeros(n);
    for k in 0..n {
        // coefficient of y^{n-1-k} after x = s·y
        let c = monic[n - 1 - k] / s.powi((k + 1) as i32);
        comp[(0, k)] = -c;
    }
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let mut roots: Vec<Complex64> = eigenvalues(&comp)?.into_iter().map(|y| y * s).collect();
    for r in roots.iter_mut() {
        *r = newton_polish(coeffs, *r, 5);
    }
    Ok(roots)
}

fn newton_polish(coeffs: &[Complex64], mut x: Complex64, steps: usize) -> Complex64 {
    let (mut p, mut dp) = eval_with_derivative(coeffs, x);
    for _ in 0..steps {
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let cand = x - p / dp;
        let (pc, dpc) = eval_with_derivative(coeffs, cand);
        if !(pc.norm() < p.norm()) {
            break;
        }
        x = cand;
        p = pc;
        dp = dpc;
    }
    x
}

/// Roots of the quartic `c[0] + c[1]x + c[2]x² + c[3]x³ + c[4]x⁴`.
pub fn roots_quartic(coeffs: [Complex64; 5]) -> Result<[Complex64; 4]> {
    let r = roots_polynomial(&coeffs)?;
    Ok([r[0], r[1], r[2], r[3]])
}

/// Real roots, ascending, of the monic cubic `x³ + b x² + c x + d`.
///
/// Cardano's formulas (trigonometric form for three real roots), each root
/// polished by Newton's method on the original cubic.
pub fn solve_real_cubic(b: f64, c: f64, d: f64) -> Vec<f64> {
    let shift = b / 3.0;
    let p = c - b * shift;
    let q = 2.0 * shift * shift * shift - c * shift + d;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let mut ts: Vec<f64> = Vec::with_capacity(3);
    if p == 0.0 && q == 0.0 {
        ts.push(0.0);
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-half_q - half_q.signum() * sq).cbrt();
        let t = if u != 0.0 { u - third_p / u } else { 0.0 };
        ts.push(t);
    } else {
        let r = (-third_p).sqrt();
        let arg = (-half_q / (r * r * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        for k in 0..3 {
            ts.push(2.0 * r * (phi - 2.0 * core::f64::consts::PI * k as f64 / 3.0).cos());
        }
    }
    let f = |x: f64| ((x + b) * x + c) * x + d;
    let df = |x: f64| (3.0 * x + 2.0 * b) * x + c;
    let mut roots: Vec<f64> = ts
        .into_iter()
        .map(|t| {
            let mut x = t - shift;
            for _ in 0..8 {
                let fx = f(x);
                let dfx = df(x);
                if fx == 0.0 || dfx == 0.0 {
                    break;
                }
                let cand = x - fx / dfx;
                if !(f(cand).abs() < fx.abs()) {
                    break;
                }
                x = cand;
            }
            x
        })
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots
}

/// Root of `f` in `[a, b]` by bisection; `f(a)` and `f(b)` must differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, rel_tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(CoreError::Domain("bisection bracket does not straddle a sign change"));
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= rel_tol * m.abs() || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn quartic_with_real_roots() {
        let r = roots_quartic([c(4.0), c(0.0), c(-5.0), c(0.0), c(1.0)]).unwrap();
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, want) in re.iter().zip([-2.0, -1.0, 1.0, 2.0]) {
            assert!((x - want).abs() < 1e-13);
        }
        assert!(r.iter().all(|z| z.im.abs() < 1e-13));
    }

    #[test]
    fn degenerate_leading_coefficient() {
        let r = roots_quartic([c(1.0), c(1.0), c(1.0), c(1.0), c(0.0)]);
        assert!(matches!(r, Err(CoreError::DegeneratePolynomial(_))));
    }

    #[test]
    fn cubic_three_real() {
        let r = solve_real_cubic(-6.0, 11.0, -6.0);
        assert_eq!(r.len(), 3);
        for (x, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - want).abs() < 1e-13);
        }
    }

    #[test]
    fn cubic_one_real() {
        let r = solve_real_cubic(0.0, 1.0, 2.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn bisect_sqrt2() {
        let x = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-14);
    }
}
