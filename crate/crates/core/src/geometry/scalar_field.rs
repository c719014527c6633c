//! Scalar fields on a chart, with optional analytic differentials.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::diff::partial_scalar_fd;

/// A smooth real-valued field. Houses potentials and conformal factors.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    differential: Option<Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>>,
}

impl ScalarField {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            dim,
            eval: Arc::new(f),
            differential: None,
        }
    }

    /// Attach a closed-form differential (coordinate components of `df`).
    pub fn with_differential<D>(mut self, df: D) -> Self
    where
        D: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.differential = Some(Arc::new(df));
        self
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self::new(dim, move |_| value).with_differential(move |_| vec![0.0; dim])
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn evaluate(&self, q: &[f64]) -> Result<f64> {
        if q.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "point dimension {} does not match field dimension {}",
                q.len(),
                self.dim
            )));
        }
        let v = (self.eval)(q);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::EvaluationFailure {
                point: q.to_vec(),
                reason: "non-finite scalar value".into(),
            })
        }
    }

    /// Coordinate differential `df(q)`; analytic when attached, otherwise the
    /// 4th-order stencil.
    pub fn differential(&self, q: &[f64]) -> Result<Vec<f64>> {
        if let Some(df) = &self.differential {
            let v = df(q);
            if v.len() != self.dim {
                return Err(Error::InvalidArgument(
                    "analytic differential has wrong dimension".into(),
                ));
            }
            return Ok(v);
        }
        (0..self.dim)
            .map(|axis| partial_scalar_fd(|p| (self.eval)(p), q, axis))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fd_differential_of_quadratic() {
        let f = ScalarField::new(3, |q| 0.5 * q[1] * q[1]);
        let d = f.differential(&[0.0, 2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(d[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn analytic_differential_wins() {
        let f = ScalarField::new(1, |q| q[0].powi(3)).with_differential(|q| vec![3.0 * q[0] * q[0]]);
        let d = f.differential(&[2.0]).unwrap();
        assert_eq!(d[0], 12.0);
    }

    #[test]
    fn constant_field() {
        let f = ScalarField::constant(2, 4.0);
        assert_eq!(f.evaluate(&[1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(f.differential(&[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
    }
}
