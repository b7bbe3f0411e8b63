//! Dense linear algebra backing the Newton corrector: a row-major matrix
//! type, LU solves with partial pivoting, and the stacked eigenpair residual.

use std::ops::{Index, IndexMut};

use crate::error::{PerronError, Result};
use crate::tensor::{entrywise_powi, DenseTensor};

/// Relative pivot threshold below which a matrix is reported singular.
const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(PerronError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(PerronError::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok(self.data.chunks_exact(self.cols).map(|r| dot(r, x)).collect())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Solves `A y = rhs` by LU factorization with partial pivoting.
///
/// A pivot with `|pivot| <= 1e-14 * maxabs(A)` reports
/// [`PerronError::SingularMatrix`] carrying the pivot column.
pub fn lu_solve(a: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows;
    if a.cols != n {
        return Err(PerronError::DimensionMismatch {
            expected: n,
            got: a.cols,
        });
    }
    if rhs.len() != n {
        return Err(PerronError::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let mut lu = a.data.clone();
    let mut y = rhs.to_vec();
    let maxabs = a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = SINGULAR_PIVOT_RTOL * maxabs;

    for k in 0..n {
        let mut p = k;
        let mut best = lu[k * n + k].abs();
        for r in k + 1..n {
            let v = lu[r * n + k].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best <= tol {
            return Err(PerronError::SingularMatrix { pivot: k });
        }
        if p != k {
            for c in 0..n {
                lu.swap(k * n + c, p * n + c);
            }
            y.swap(k, p);
        }
        let piv = lu[k * n + k];
        for r in k + 1..n {
            let f = lu[r * n + k] / piv;
            if f != 0.0 {
                for c in k + 1..n {
                    lu[r * n + c] -= f * lu[k * n + c];
                }
                y[r] -= f * y[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut s = y[k];
        for c in k + 1..n {
            s -= lu[k * n + c] * y[c];
        }
        y[k] = s / lu[k * n + k];
    }
    Ok(y)
}

/// Stacked eigenpair residual `|| (A x^{m-1} - lambda x^{[m-1]}, x^T x - 1) ||_2`.
///
/// This is the quantity the solvers' regular termination tests bound.
pub fn residual(a: &DenseTensor, lambda: f64, x: &[f64]) -> Result<f64> {
    let y = a.apply_m1(x)?;
    let xp = entrywise_powi(x, a.order() as i32 - 1);
    let mut sq = 0.0;
    for i in 0..x.len() {
        let r = y[i] - lambda * xp[i];
        sq += r * r;
    }
    let c = dot(x, x) - 1.0;
    sq += c * c;
    Ok(sq.sqrt())
}
