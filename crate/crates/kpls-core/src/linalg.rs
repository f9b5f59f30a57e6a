//! Minimal dense linear algebra: a row-major matrix type, Cholesky
//! factorization, and solvers sized for desk-scale problems (n ≲ 2000).
//!
//! Two independent solve paths are provided on purpose: the Cholesky route used
//! by the production fit, and a partially pivoted Gaussian elimination used by
//! the brute-force oracles, so that tests never compare an algorithm against
//! itself.

use crate::error::{Error, Result};
use crate::scalar::{s, Scalar};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    /// Builds a matrix entry-by-entry from a closure.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Wraps an existing row-major buffer.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length must match shape");
        Self { rows, cols, data }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Borrow of row `i` as a slice.
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix–vector product `self * x`.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "matvec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Transposed copy.
    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    /// True if every entry is finite.
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Maximum absolute asymmetry `max |A_ij − A_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Lower Cholesky factor `L` with `L Lᵀ = self`, or `None` if a pivot is
    /// not strictly positive.
    pub fn cholesky(&self) -> Option<Matrix<T>> {
        assert_eq!(self.rows, self.cols, "cholesky needs a square matrix");
        let n = self.rows;
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum = sum - l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if sum <= T::zero() {
                        return None;
                    }
                    l[(i, j)] = sum.sqrt();
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        Some(l)
    }

    /// Solves `self * x = b` via Cholesky; `None` if not positive definite.
    pub fn solve_spd(&self, b: &[T]) -> Option<Vec<T>> {
        let l = self.cholesky()?;
        let y = forward_substitute(&l, b);
        Some(back_substitute_transposed(&l, &y))
    }

    /// Solves `self * x = b` by Gaussian elimination with partial pivoting.
    ///
    /// Kept deliberately independent of the Cholesky path; the Krylov oracle
    /// and tests route through this.
    pub fn solve_pivoted(&self, b: &[T]) -> Result<Vec<T>> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if a[(r, col)].abs() > a[(piv, col)].abs() {
                    piv = r;
                }
            }
            if a[(piv, col)].abs() == T::zero() {
                return Err(Error::Rank(format!("singular system at column {col}")));
            }
            if piv != col {
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(col, j)] = a[(piv, j)];
                    a[(piv, j)] = t;
                }
                x.swap(col, piv);
            }
            for r in (col + 1)..n {
                let factor = a[(r, col)] / a[(col, col)];
                if factor == T::zero() {
                    continue;
                }
                for j in col..n {
                    a[(r, j)] = a[(r, j)] - factor * a[(col, j)];
                }
                x[r] = x[r] - factor * x[col];
            }
        }
        for row in (0..n).rev() {
            let mut sum = x[row];
            for j in (row + 1)..n {
                sum = sum - a[(row, j)] * x[j];
            }
            x[row] = sum / a[(row, row)];
        }
        Ok(x)
    }

    /// Determinant via pivoted elimination (test oracle for recurrences).
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "det needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = T::one();
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if a[(r, col)].abs() > a[(piv, col)].abs() {
                    piv = r;
                }
            }
            if a[(piv, col)] == T::zero() {
                return T::zero();
            }
            if piv != col {
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(col, j)] = a[(piv, j)];
                    a[(piv, j)] = t;
                }
                sign = -sign;
            }
            for r in (col + 1)..n {
                let factor = a[(r, col)] / a[(col, col)];
                for j in col..n {
                    a[(r, j)] = a[(r, j)] - factor * a[(col, j)];
                }
            }
        }
        let mut det = sign;
        for i in 0..n {
            det = det * a[(i, i)];
        }
        det
    }

    /// Estimates the smallest eigenvalue of a symmetric matrix by inverse power
    /// iteration on a shifted copy; used only for error reporting.
    pub fn smallest_eigenvalue_estimate(&self) -> T {
        let n = self.rows;
        // Shift by an upper bound on the spectral radius so the target becomes
        // the dominant eigenvalue of (bound·I − A).
        let bound = (0..n)
            .map(|i| self.row(i).iter().fold(T::zero(), |acc, v| acc + v.abs()))
            .fold(T::zero(), T::max);
        let mut v = vec![T::one() / s::<T>(n as f64).sqrt(); n];
        let mut lam = T::zero();
        for _ in 0..200 {
            let av = self.matvec(&v);
            let mut w: Vec<T> = v.iter().zip(&av).map(|(&vi, &ai)| bound * vi - ai).collect();
            let nw = norm2(&w);
            if nw == T::zero() {
                break;
            }
            for wi in &mut w {
                *wi = *wi / nw;
            }
            lam = nw;
            v = w;
        }
        bound - lam
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean inner product.
#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `a − b` elementwise.
pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

fn forward_substitute<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut sum = b[i];
        for j in 0..i {
            sum = sum - l[(i, j)] * y[j];
        }
        y[i] = sum / l[(i, i)];
    }
    y
}

fn back_substitute_transposed<T: Scalar>(l: &Matrix<T>, y: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for j in (i + 1)..n {
            sum = sum - l[(j, i)] * x[j];
        }
        x[i] = sum / l[(i, i)];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reconstructs() {
        let a = Matrix::<f64>::from_vec(2, 2, vec![4.0, 2.0, 2.0, 3.0]);
        let l = a.cholesky().unwrap();
        let r = l.matmul(&l.transpose());
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[(i, j)] - a[(i, j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::<f64>::from_vec(2, 2, vec![1.0, 2.0, 2.0, 1.0]);
        assert!(a.cholesky().is_none());
    }

    #[test]
    fn spd_and_pivoted_solves_agree() {
        let a = Matrix::<f64>::from_vec(3, 3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let b = [1.0, -2.0, 0.5];
        let x1 = a.solve_spd(&b).unwrap();
        let x2 = a.solve_pivoted(&b).unwrap();
        for (u, v) in x1.iter().zip(&x2) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn det_matches_hand_value() {
        let a = Matrix::<f64>::from_vec(2, 2, vec![4.25, -2.0, -2.0, 2.0]);
        assert!((a.det() - 4.5f64).abs() < 1e-12);
    }

    #[test]
    fn smallest_eigenvalue_of_diagonal() {
        let a = Matrix::<f64>::from_vec(3, 3, vec![3.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 2.0]);
        let est: f64 = a.smallest_eigenvalue_estimate();
        assert!((est - 0.5).abs() < 1e-6, "estimate {est}");
    }
}
