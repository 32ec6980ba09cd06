//! Small dense linear algebra: row-major matrices, pivoted Gaussian
//! elimination and normal-equation least squares.
//!
//! Everything here is sized for alphabets of a few dozen symbols at most,
//! so no blocking or BLAS-style tricks are attempted.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Pivots with magnitude below this are treated as zero.
pub const PIVOT_TOL: f64 = 1e-12;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from nested rows. Fails if the rows are ragged or empty.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::Dimension("matrix must have at least one row and column"));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows"));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `M x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `xᵀ M` for a row vector `x`, i.e. `Mᵀ x`.
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.vec_mul_into(x, &mut out);
        out
    }

    pub fn vec_mul_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(self.rows, x.len());
        assert_eq!(self.cols, out.len());
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += xi * m;
            }
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Induced 1-norm: maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| libm::fabs(self[(i, j)])).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }

    /// Solves `M X = B` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        if !self.is_square() || rhs.rows != self.rows {
            return Err(Error::Dimension("solve needs a square system"));
        }
        let n = self.rows;
        let m = rhs.cols;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let (piv, mag) = (col..n)
                .map(|r| (r, libm::fabs(a[(r, col)])))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag < PIVOT_TOL {
                return Err(Error::Singular { pivot: mag });
            }
            if piv != col {
                a.swap_rows(piv, col);
                b.swap_rows(piv, col);
            }
            let p = a[(col, col)];
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                if f == 0.0 {
                    continue;
                }
                for c in col..n {
                    let v = a[(col, c)];
                    a[(r, c)] -= f * v;
                }
                for c in 0..m {
                    let v = b[(col, c)];
                    b[(r, c)] -= f * v;
                }
            }
        }
        let mut x = Matrix::zeros(n, m);
        for c in 0..m {
            for r in (0..n).rev() {
                let mut s = b[(r, c)];
                for k in r + 1..n {
                    s -= a[(r, k)] * x[(k, c)];
                }
                x[(r, c)] = s / a[(r, r)];
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let b = Matrix {
            rows: rhs.len(),
            cols: 1,
            data: rhs.to_vec(),
        };
        Ok(self.solve(&b)?.data)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.rows))
    }

    /// Smallest pivot magnitude met during partially pivoted elimination.
    /// Zero for exactly singular inputs.
    pub fn min_pivot(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut smallest = f64::INFINITY;
        for col in 0..n {
            let (piv, mag) = (col..n)
                .map(|r| (r, libm::fabs(a[(r, col)])))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            smallest = smallest.min(mag);
            if mag == 0.0 {
                return 0.0;
            }
            a.swap_rows(piv, col);
            let p = a[(col, col)];
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                for c in col..n {
                    let v = a[(col, c)];
                    a[(r, c)] -= f * v;
                }
            }
        }
        smallest
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares solution of an overdetermined system via the normal
/// equations, together with the pseudo-inverse that produced it.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// `(AᵀA)⁻¹Aᵀ`
    pub pseudo_inverse: Matrix,
    /// Euclidean norm of `A x − b`.
    pub residual: f64,
}

pub fn least_squares(a: &Matrix, b: &[f64]) -> Result<LeastSquares> {
    if a.rows() != b.len() {
        return Err(Error::Dimension("right-hand side length differs from row count"));
    }
    let at = a.transpose();
    let normal = at.matmul(a);
    let pseudo_inverse = normal
        .solve(&at)
        .map_err(|e| match e {
            Error::Singular { pivot } => Error::RankDeficient { pivot },
            other => other,
        })?;
    let solution = pseudo_inverse.mul_vec(b);
    let fitted = a.mul_vec(&solution);
    let residual = libm::sqrt(
        fitted
            .iter()
            .zip(b)
            .map(|(f, t)| (f - t) * (f - t))
            .sum::<f64>(),
    );
    Ok(LeastSquares {
        solution,
        pseudo_inverse,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_known_solution() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]])
            .unwrap();
        let x = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x);
        let got = a.solve_vec(&b).unwrap();
        for (g, e) in got.iter().zip(x) {
            assert!((g - e).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_system_reports_pivot() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(a.inverse(), Err(Error::Singular { .. })));
        assert_eq!(a.min_pivot(), 0.0);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = Matrix::from_rows(&[vec![0.4, 0.25, 0.35], vec![0.0025, 0.0045, 0.003], vec![0.004, 0.011, 0.005]])
            .unwrap();
        let prod = a.matmul(&a.inverse().unwrap());
        assert!(prod.max_abs_diff(&Matrix::identity(3)) < 1e-10);
    }

    #[test]
    fn least_squares_single_column() {
        let a = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let ls = least_squares(&a, &[0.0, 1.0]).unwrap();
        assert_eq!(ls.solution, vec![1.0]);
        assert_eq!(ls.residual, 0.0);
    }

    #[test]
    fn least_squares_rank_deficient() {
        let a = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(matches!(
            least_squares(&a, &[0.0, 0.0, 1.0]),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn norm_one_is_max_column_sum() {
        let a = Matrix::from_rows(&[vec![1.0, -4.0], vec![-2.0, 1.0]]).unwrap();
        assert_eq!(a.norm_one(), 5.0);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }
}
