//! Small dense square matrices with LU factorisation (partial pivoting).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{CoreError, Result};
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

/// Scalars the LU routines operate on.
pub trait Field: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self> {
    fn zero() -> Self;
    fn one() -> Self;
    fn modulus(self) -> f64;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Field> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows<const N: usize>(rows: [[T; N]; N]) -> Self {
        let mut m = Self::zeros(N);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn to_array<const N: usize>(&self) -> [[T; N]; N] {
        assert_eq!(self.n, N, "dimension mismatch");
        let mut out = [[T::zero(); N]; N];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self[(i, j)];
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| (0..self.n).fold(T::zero(), |acc, j| acc + self[(i, j)] * x[j])).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect();
        Self { n: self.n, data }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.modulus() * v.modulus()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// LU factors with row permutation, `P·A = L·U` stored in place.
struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
    swaps: usize,
}

fn factor<T: Field>(a: &Mat<T>) -> Result<Lu<T>> {
    let n = a.n;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let scale = a.max_abs();
    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].modulus();
        for i in k + 1..n {
            let v = lu[(i, k)].modulus();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 || best <= f64::EPSILON * 1e-3 * scale {
            return Err(CoreError::Singular);
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
            swaps += 1;
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            for j in k + 1..n {
                lu[(i, j)] = lu[(i, j)] - l * lu[(k, j)];
            }
        }
    }
    Ok(Lu { lu, perm, swaps })
}

impl<T: Field> Lu<T> {
    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }
}

/// Solves `A·x = b` with two steps of iterative refinement.
pub fn solve<T: Field>(a: &Mat<T>, b: &[T]) -> Result<Vec<T>> {
    assert_eq!(a.n, b.len());
    let lu = factor(a)?;
    let mut x = lu.solve(b);
    for _ in 0..2 {
        let ax = a.matvec(&x);
        let r: Vec<T> = b.iter().zip(&ax).map(|(bi, axi)| *bi - *axi).collect();
        let dx = lu.solve(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi = *xi + d;
        }
    }
    Ok(x)
}

/// Determinant via LU; a singular matrix gives zero.
pub fn determinant<T: Field>(a: &Mat<T>) -> T {
    match factor(a) {
        Ok(f) => {
            let mut d = T::one();
            for i in 0..a.n {
                d = d * f.lu[(i, i)];
            }
            if f.swaps % 2 == 1 {
                -d
            } else {
                d
            }
        }
        Err(_) => T::zero(),
    }
}
