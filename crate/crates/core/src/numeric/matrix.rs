//! Dense row-major matrices and pivoted Gaussian elimination.
//!
//! Everything here runs on matrices of size at most a few rows, so a plain
//! `Vec<f64>` with scaled partial pivoting beats pulling in a linear-algebra
//! dependency. The elimination kernel is generic over [`Scalar`] so dual
//! numbers can be pushed through a solve.

use super::dual::Scalar;
use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot below `SINGULAR_TOL * row_scale` marks
/// the matrix as singular.
pub const SINGULAR_TOL: f64 = 1e-13;

/// Dense matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
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
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        debug_assert!(rows.iter().all(|row| row.len() == c));
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry count mismatch");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * v[j])
                    .sum::<f64>()
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * out.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Largest absolute deviation from symmetry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Replace the matrix by its symmetric part.
    pub fn symmetrize(&mut self) {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let s = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, s);
                self.set(j, i, s);
            }
        }
    }

    /// Bilinear form `u^T M v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += u[i] * self.get(i, j) * v[j];
            }
        }
        acc
    }

    /// Cholesky factorization; succeeds iff the matrix is symmetric positive
    /// definite (up to the solver tolerance). Returns the lower factor.
    pub fn cholesky(&self) -> Result<DenseMatrix> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::InvalidArgument("cholesky requires a square matrix".into()));
        }
        let mut l = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for k in 0..j {
                    sum -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(Error::SingularMatrix {
                            column: i,
                            pivot: sum,
                            threshold: 0.0,
                        });
                    }
                    l.set(i, j, sum.sqrt());
                } else {
                    l.set(i, j, sum / l.get(j, j));
                }
            }
        }
        Ok(l)
    }

    /// Solve `self * x = b` by pivoted elimination.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if self.rows != self.cols {
            return Err(Error::InvalidArgument("solve requires a square matrix".into()));
        }
        if b.len() != self.rows {
            return Err(Error::InvalidArgument(format!(
                "rhs length {} does not match dimension {}",
                b.len(),
                self.rows
            )));
        }
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        solve_in_place(self.rows, &mut a, &mut x)?;
        Ok(x)
    }

    /// Inverse via `n` pivoted solves against the identity.
    pub fn inverse(&self) -> Result<DenseMatrix> {
        let n = self.rows;
        let lu = LuFactors::factor(self)?;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|x| *x = 0.0);
            col[j] = 1.0;
            let sol = lu.solve(&col);
            for i in 0..n {
                inv.set(i, j, sol[i]);
            }
        }
        Ok(inv)
    }
}

/// LU factorization with scaled partial pivoting, reusable for several
/// right-hand sides at the same point.
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::InvalidArgument("factor requires a square matrix".into()));
        }
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        // Row scales for the singularity test.
        let scales: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| a.get(i, j).abs())
                    .fold(0.0f64, f64::max)
                    .max(1.0)
            })
            .collect();
        for k in 0..n {
            let (mut pivot_row, mut best) = (k, 0.0f64);
            for i in k..n {
                let m = lu[perm[i] * n + k].abs() / scales[perm[i]];
                if m > best {
                    best = m;
                    pivot_row = i;
                }
            }
            let threshold = SINGULAR_TOL;
            if best < threshold {
                return Err(Error::SingularMatrix {
                    column: k,
                    pivot: lu[perm[pivot_row] * n + k],
                    threshold: threshold * scales[perm[pivot_row]],
                });
            }
            perm.swap(k, pivot_row);
            let pk = perm[k];
            let pivot = lu[pk * n + k];
            for i in (k + 1)..n {
                let pi = perm[i];
                let factor = lu[pi * n + k] / pivot;
                lu[pi * n + k] = factor;
                for j in (k + 1)..n {
                    lu[pi * n + j] -= factor * lu[pk * n + j];
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc -= self.lu[self.perm[i] * n + j] * y[j];
            }
            y[i] = acc;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= self.lu[self.perm[i] * n + j] * x[j];
            }
            x[i] = acc / self.lu[self.perm[i] * n + i];
        }
        x
    }
}

/// Solve a square system in place over any [`Scalar`] (pivoting compares the
/// value parts). `a` is row-major `n x n`, `b` the right-hand side.
pub fn solve_in_place<S: Scalar>(n: usize, a: &mut [S], b: &mut [S]) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for k in 0..n {
        // Scaled partial pivoting on the value part.
        let mut pivot_row = k;
        let mut best = -1.0f64;
        for i in k..n {
            let scale = (0..n)
                .map(|j| a[i * n + j].abs_val())
                .fold(0.0f64, f64::max)
                .max(1.0);
            let m = a[i * n + k].abs_val() / scale;
            if m > best {
                best = m;
                pivot_row = i;
            }
        }
        if best < SINGULAR_TOL {
            return Err(Error::SingularMatrix {
                column: k,
                pivot: a[pivot_row * n + k].value(),
                threshold: SINGULAR_TOL,
            });
        }
        if pivot_row != k {
            for j in 0..n {
                a.swap(k * n + j, pivot_row * n + j);
            }
            b.swap(k, pivot_row);
        }
        let pivot = a[k * n + k];
        for i in (k + 1)..n {
            let factor = a[i * n + k] / pivot;
            for j in (k + 1)..n {
                let t = a[k * n + j];
                a[i * n + j] = a[i * n + j] - factor * t;
            }
            let t = b[k];
            b[i] = b[i] - factor * t;
        }
    }
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc = acc - a[i * n + j] * b[j];
        }
        b[i] = acc / a[i * n + i];
    }
    Ok(())
}

/// Solve `A x = b` for a square [`DenseMatrix`].
pub fn solve_linear(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::InvalidArgument("solve_linear requires a square matrix".into()));
    }
    if b.len() != a.rows() {
        return Err(Error::InvalidArgument(format!(
            "rhs length {} does not match dimension {}",
            b.len(),
            a.rows()
        )));
    }
    let mut data = a.data().to_vec();
    let mut x = b.to_vec();
    solve_in_place(a.rows(), &mut data, &mut x)?;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::dual::DualScalar;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_solve() {
        let a = DenseMatrix::identity(3);
        let x = solve_linear(&a, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn diagonal_solve() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]);
        let x = solve_linear(&a, &[2.0, 8.0]).unwrap();
        assert_relative_eq!(x[0], 1.0);
        assert_relative_eq!(x[1], 2.0);
    }

    #[test]
    fn rank_deficient_is_singular() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(
            solve_linear(&a, &[1.0, 0.0]),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn random_well_conditioned_recovery() {
        // Diagonally dominant 6x6 systems: residual within 1e-12 relative.
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..100 {
            let n = 6;
            let mut a = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, rng.random_range(-1.0..1.0));
                }
                let row_sum: f64 = (0..n).map(|j| a.get(i, j).abs()).sum();
                a.set(i, i, a.get(i, i) + row_sum + 1.0);
            }
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = solve_linear(&a, &b).unwrap();
            let r = a.mul_vec(&x);
            let b_inf = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..n {
                assert!((r[i] - b[i]).abs() <= 1e-12 * (1.0 + b_inf));
            }
        }
    }

    #[test]
    fn dual_solve_differentiates_solution() {
        // x(t) solves [[t, 1], [1, 2]] x = (1, 0); closed form
        // x1 = 2/(2t-1), x2 = -1/(2t-1); d/dt at t=1: x1' = -4, x2' = 2.
        let t = DualScalar::variable(1.0);
        let one = DualScalar::constant(1.0);
        let two = DualScalar::constant(2.0);
        let mut a = vec![t, one, one, two];
        let mut b = vec![one, DualScalar::constant(0.0)];
        solve_in_place(2, &mut a, &mut b).unwrap();
        assert_relative_eq!(b[0].value, 2.0, epsilon = 1e-14);
        assert_relative_eq!(b[0].deriv, -4.0, epsilon = 1e-12);
        assert_relative_eq!(b[1].deriv, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn cholesky_detects_indefiniteness() {
        let spd = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        assert!(spd.cholesky().is_ok());
        let indef = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(indef.cholesky().is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let a = DenseMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ]);
        let inv = a.inverse().unwrap();
        let prod = a.mul_mat(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(prod.get(i, j), expect, epsilon = 1e-13);
            }
        }
    }
}
