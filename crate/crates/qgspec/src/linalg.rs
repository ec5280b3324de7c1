//! Small dense square matrices and an LU determinant.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareMatrix<E> {
    n: usize,
    data: Vec<E>,
}

impl<E: Clone + Zero> SquareMatrix<E> {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: vec![E::zero(); n * n] }
    }
}

impl<E> SquareMatrix<E> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn map<F>(&self, f: impl FnMut(&E) -> F) -> SquareMatrix<F> {
        SquareMatrix { n: self.n, data: self.data.iter().map(f).collect() }
    }
}

impl<E> Index<(usize, usize)> for SquareMatrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.n + j]
    }
}

impl<E> IndexMut<(usize, usize)> for SquareMatrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> SquareMatrix<Complex<T>> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).fold(Complex::zero(), |acc, l| acc + self[(i, l)] * other[(l, j)]))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn determinant(&self) -> Complex<T> {
        let mut work = self.data.clone();
        lu_determinant(&mut work, self.n)
    }
}

/// Determinant by Gaussian elimination with partial pivoting; `a` is overwritten.
pub fn lu_determinant<T: Real>(a: &mut [Complex<T>], n: usize) -> Complex<T> {
    debug_assert_eq!(a.len(), n * n);
    let mut det = Complex::<T>::one();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].norm_sqr();
        for r in col + 1..n {
            let v = a[r * n + col].norm_sqr();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == T::zero() {
            return Complex::zero();
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det = det * p;
        let inv = p.inv();
        for r in col + 1..n {
            let factor = a[r * n + col] * inv;
            if factor.is_zero() {
                continue;
            }
            for j in col + 1..n {
                let upd = factor * a[col * n + j];
                a[r * n + j] = a[r * n + j] - upd;
            }
        }
    }
    det
}
