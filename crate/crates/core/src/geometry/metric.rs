//! Metric fields: chart-point to symmetric positive-definite matrix.
//!
//! Metrics are closures over chart points rather than stored grids — the
//! constructed principal metric has no closed form in general and must be
//! evaluated on demand. Analytic metrics may expose a dual-number entry path
//! for exact derivatives; opaque evaluators fall back to finite differences.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::diff::{partial_matrix_fd, fd_step};
use crate::numeric::dual::{seed_point, DualScalar, Scalar};
use crate::numeric::matrix::DenseMatrix;

/// How metric derivatives are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    /// Forward-mode dual numbers (exact; analytic fields only).
    Dual,
    /// 4th-order central finite differences.
    FiniteDifference,
}

/// A matrix-valued field on a chart.
pub trait MatrixField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, q: &[f64]) -> Result<DenseMatrix>;
    /// Row-major entries evaluated on dual numbers; `None` when the field is
    /// opaque to dual arithmetic.
    fn eval_dual(&self, q: &[DualScalar]) -> Option<Vec<DualScalar>> {
        let _ = q;
        None
    }
    fn supports_dual(&self) -> bool {
        false
    }
}

/// Matrix field whose entries are written generically over [`Scalar`].
pub trait SmoothMatrix: Send + Sync {
    fn dim(&self) -> usize;
    fn entries<S: Scalar>(&self, q: &[S]) -> Vec<S>;
}

/// Adapter giving any [`SmoothMatrix`] both evaluation paths.
pub struct Analytic<T: SmoothMatrix>(pub T);

impl<T: SmoothMatrix> MatrixField for Analytic<T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, q: &[f64]) -> Result<DenseMatrix> {
        let n = self.0.dim();
        Ok(DenseMatrix::from_vec(n, n, self.0.entries(q)))
    }
    fn eval_dual(&self, q: &[DualScalar]) -> Option<Vec<DualScalar>> {
        Some(self.0.entries(q))
    }
    fn supports_dual(&self) -> bool {
        true
    }
}

struct FnMatrixField<F> {
    dim: usize,
    f: F,
}

impl<F> MatrixField for FnMatrixField<F>
where
    F: Fn(&[f64]) -> Result<DenseMatrix> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, q: &[f64]) -> Result<DenseMatrix> {
        (self.f)(q)
    }
}

/// Smooth field of symmetric positive-definite matrices.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    mode: DiffMode,
    field: Arc<dyn MatrixField>,
}

impl MetricField {
    /// Metric from an opaque evaluator; derivatives use finite differences.
    pub fn from_fn<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<DenseMatrix> + Send + Sync + 'static,
    {
        Self {
            dim,
            mode: DiffMode::FiniteDifference,
            field: Arc::new(FnMatrixField { dim, f }),
        }
    }

    /// Metric from analytic entries; derivatives use the dual path.
    pub fn analytic<T: SmoothMatrix + 'static>(entries: T) -> Self {
        let dim = entries.dim();
        Self {
            dim,
            mode: DiffMode::Dual,
            field: Arc::new(Analytic(entries)),
        }
    }

    pub fn from_field(field: Arc<dyn MatrixField>) -> Self {
        let mode = if field.supports_dual() {
            DiffMode::Dual
        } else {
            DiffMode::FiniteDifference
        };
        Self {
            dim: field.dim(),
            mode,
            field,
        }
    }

    pub fn with_mode(mut self, mode: DiffMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> DiffMode {
        self.mode
    }

    /// Evaluate the metric, enforcing finiteness and symmetry (within
    /// `1e-12` relative; the symmetric part is returned).
    pub fn evaluate(&self, q: &[f64]) -> Result<DenseMatrix> {
        if q.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "point dimension {} does not match metric dimension {}",
                q.len(),
                self.dim
            )));
        }
        let mut m = self.field.eval(q)?;
        if !m.is_finite() {
            return Err(Error::EvaluationFailure {
                point: q.to_vec(),
                reason: "non-finite metric entry".into(),
            });
        }
        let scale = m.data().iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if m.asymmetry() > 1e-12 * (1.0 + scale) {
            return Err(Error::EvaluationFailure {
                point: q.to_vec(),
                reason: format!("metric asymmetry {:.3e} out of tolerance", m.asymmetry()),
            });
        }
        m.symmetrize();
        Ok(m)
    }

    /// Partial derivative of the metric along a chart axis.
    pub fn partial(&self, q: &[f64], axis: usize) -> Result<DenseMatrix> {
        match self.mode {
            DiffMode::Dual => {
                let seeded = seed_point(q, axis);
                let entries = self.field.eval_dual(&seeded).ok_or_else(|| {
                    Error::EvaluationFailure {
                        point: q.to_vec(),
                        reason: "metric evaluator does not support the dual path".into(),
                    }
                })?;
                let n = self.dim;
                let data: Vec<f64> = entries.iter().map(|e| e.deriv).collect();
                if data.iter().all(|x| x.is_finite()) {
                    Ok(DenseMatrix::from_vec(n, n, data))
                } else {
                    Err(Error::EvaluationFailure {
                        point: q.to_vec(),
                        reason: "non-finite metric derivative".into(),
                    })
                }
            }
            DiffMode::FiniteDifference => {
                partial_matrix_fd(|p| self.evaluate(p), q, axis)
            }
        }
    }

    /// All partial derivatives, one matrix per axis.
    pub fn partials(&self, q: &[f64]) -> Result<Vec<DenseMatrix>> {
        (0..self.dim).map(|axis| self.partial(q, axis)).collect()
    }

    /// Inner product `g(q)(u, v)`.
    pub fn inner(&self, q: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        Ok(self.evaluate(q)?.bilinear(u, v))
    }

    /// Norm `sqrt(g(q)(v, v))`.
    pub fn norm(&self, q: &[f64], v: &[f64]) -> Result<f64> {
        Ok(self.inner(q, v, v)?.max(0.0).sqrt())
    }

    /// Positive definiteness via Cholesky.
    pub fn check_positive_definite(&self, q: &[f64]) -> Result<()> {
        self.evaluate(q)?.cholesky().map(|_| ()).map_err(|_| {
            Error::EvaluationFailure {
                point: q.to_vec(),
                reason: "metric is not positive definite".into(),
            }
        })
    }

    /// Largest useful finite-difference step among axes at `q`; exposed for
    /// callers that build their own stencils around metric evaluations.
    pub fn max_fd_step(&self, q: &[f64]) -> f64 {
        q.iter().map(|&x| fd_step(x)).fold(0.0, f64::max)
    }
}
