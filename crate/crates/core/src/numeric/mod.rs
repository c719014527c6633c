//! Numeric kernel: dense linear algebra, differentiation, quadrature and
//! Runge-Kutta stepping. Everything is a pure function of its inputs.

pub mod diff;
pub mod dual;
pub mod matrix;
pub mod ode;
pub mod quad;

pub use diff::{fd_step, jacobian_fd, partial_matrix_fd, partial_scalar_dual, partial_scalar_fd};
pub use dual::{DualScalar, Scalar};
pub use matrix::{solve_linear, DenseMatrix, LuFactors};
pub use ode::{integrate, rk4_step, OdeStepper};
pub use quad::{cumulative_simpson, simpson_integral, simpson_samples};

/// Infinity norm of a vector.
pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Euclidean norm of a vector.
pub fn norm_2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
