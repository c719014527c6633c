//! Partial derivatives of user-supplied fields.
//!
//! Two routes: exact forward-mode differentiation through [`DualScalar`] for
//! fields written generically over [`Scalar`], and a 4th-order central
//! finite-difference stencil for opaque `f64` closures. The stencil step is
//! `1e-3 * (1 + |coordinate|)`, chosen to balance truncation against roundoff
//! for downstream tolerances in the 1e-6..1e-9 range.

use super::dual::{seed_point, DualScalar};
use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Finite-difference step at coordinate value `x`.
pub fn fd_step(x: f64) -> f64 {
    1e-3 * (1.0 + x.abs())
}

fn check_finite(value: f64, point: &[f64]) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::EvaluationFailure {
            point: point.to_vec(),
            reason: "non-finite value at stencil point".into(),
        })
    }
}

/// 4th-order central difference of a scalar field along `axis`.
pub fn partial_scalar_fd<F>(f: F, q: &[f64], axis: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let h = fd_step(q[axis]);
    let mut p = q.to_vec();
    let mut sample = |offset: f64| -> Result<f64> {
        p[axis] = q[axis] + offset;
        check_finite(f(&p), &p)
    };
    let f_m2 = sample(-2.0 * h)?;
    let f_m1 = sample(-h)?;
    let f_p1 = sample(h)?;
    let f_p2 = sample(2.0 * h)?;
    Ok((f_m2 - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * h))
}

/// Exact derivative of an analytic scalar field along `axis`.
pub fn partial_scalar_dual<F>(f: F, q: &[f64], axis: usize) -> f64
where
    F: Fn(&[DualScalar]) -> DualScalar,
{
    f(&seed_point(q, axis)).deriv
}

/// 4th-order central difference of a matrix field along `axis`.
pub fn partial_matrix_fd<F>(f: F, q: &[f64], axis: usize) -> Result<DenseMatrix>
where
    F: Fn(&[f64]) -> Result<DenseMatrix>,
{
    let h = fd_step(q[axis]);
    let mut p = q.to_vec();
    let mut sample = |offset: f64| -> Result<DenseMatrix> {
        p[axis] = q[axis] + offset;
        let m = f(&p)?;
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::EvaluationFailure {
                point: p.clone(),
                reason: "non-finite matrix entry at stencil point".into(),
            })
        }
    };
    let m_m2 = sample(-2.0 * h)?;
    let m_m1 = sample(-h)?;
    let m_p1 = sample(h)?;
    let m_p2 = sample(2.0 * h)?;
    let n = m_m2.rows();
    let c = m_m2.cols();
    let mut out = DenseMatrix::zeros(n, c);
    for i in 0..n {
        for j in 0..c {
            let d = (m_m2.get(i, j) - 8.0 * m_m1.get(i, j) + 8.0 * m_p1.get(i, j)
                - m_p2.get(i, j))
                / (12.0 * h);
            out.set(i, j, d);
        }
    }
    Ok(out)
}

/// Jacobian of a vector-valued map by the 4th-order stencil, one column per
/// input axis.
pub fn jacobian_fd<F>(f: F, q: &[f64], out_dim: usize) -> Result<DenseMatrix>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = q.len();
    let mut jac = DenseMatrix::zeros(out_dim, n);
    let mut p = q.to_vec();
    for axis in 0..n {
        let h = fd_step(q[axis]);
        let mut sample = |offset: f64| -> Result<Vec<f64>> {
            p[axis] = q[axis] + offset;
            let v = f(&p)?;
            if v.iter().all(|x| x.is_finite()) {
                Ok(v)
            } else {
                Err(Error::EvaluationFailure {
                    point: p.clone(),
                    reason: "non-finite component at stencil point".into(),
                })
            }
        };
        let v_m2 = sample(-2.0 * h)?;
        let v_m1 = sample(-h)?;
        let v_p1 = sample(h)?;
        let v_p2 = sample(2.0 * h)?;
        p[axis] = q[axis];
        for i in 0..out_dim {
            jac.set(
                i,
                axis,
                (v_m2[i] - 8.0 * v_m1[i] + 8.0 * v_p1[i] - v_p2[i]) / (12.0 * h),
            );
        }
    }
    Ok(jac)
}
