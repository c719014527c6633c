//! Tangent distributions in span or kernel form, and metric-orthogonal
//! projection onto them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::matrix::{solve_linear, DenseMatrix};
use crate::numeric::{dot, norm_2};

use super::metric::MetricField;

/// Point-dependent vector (or covector) field in coordinates.
pub type CoordField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Pivoted Gram-Schmidt tolerance for span/kernel conversion.
const GS_TOL: f64 = 1e-10;

enum Rep {
    /// `k` spanning vector fields.
    Span(Vec<CoordField>),
    /// `n - k` annihilating one-forms.
    Kernel(Vec<CoordField>),
}

/// A rank-`k` distribution on an `n`-dimensional chart.
pub struct Distribution {
    dim: usize,
    rank: usize,
    rep: Rep,
}

impl Distribution {
    pub fn from_span(dim: usize, fields: Vec<CoordField>) -> Self {
        let rank = fields.len();
        assert!(rank <= dim, "span larger than ambient dimension");
        Self {
            dim,
            rank,
            rep: Rep::Span(fields),
        }
    }

    pub fn from_one_forms(dim: usize, forms: Vec<CoordField>) -> Self {
        let co_rank = forms.len();
        assert!(co_rank <= dim, "more one-forms than ambient dimension");
        Self {
            dim,
            rank: dim - co_rank,
            rep: Rep::Kernel(forms),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of annihilating one-forms.
    pub fn co_rank(&self) -> usize {
        self.dim - self.rank
    }

    fn eval_fields(fields: &[CoordField], q: &[f64], dim: usize) -> Result<Vec<Vec<f64>>> {
        fields
            .iter()
            .map(|f| {
                let v = f(q);
                if v.len() != dim {
                    return Err(Error::InvalidArgument(
                        "field component count does not match chart dimension".into(),
                    ));
                }
                if v.iter().all(|x| x.is_finite()) {
                    Ok(v)
                } else {
                    Err(Error::EvaluationFailure {
                        point: q.to_vec(),
                        reason: "non-finite distribution component".into(),
                    })
                }
            })
            .collect()
    }

    /// Vectors spanning the distribution at `q`. For a kernel representation
    /// this is the Euclidean orthogonal complement of the one-form rows,
    /// built by Gram-Schmidt with pivoting.
    pub fn spanning_vectors(&self, q: &[f64]) -> Result<Vec<Vec<f64>>> {
        match &self.rep {
            Rep::Span(fields) => {
                let vecs = Self::eval_fields(fields, q, self.dim)?;
                check_rank(&vecs, self.rank, "spanning vectors", q)?;
                Ok(vecs)
            }
            Rep::Kernel(forms) => {
                let rows = Self::eval_fields(forms, q, self.dim)?;
                orthogonal_complement(&rows, self.dim, self.rank, q)
            }
        }
    }

    /// One-forms annihilating the distribution at `q` (coordinate rows).
    pub fn one_forms(&self, q: &[f64]) -> Result<Vec<Vec<f64>>> {
        match &self.rep {
            Rep::Kernel(forms) => {
                let rows = Self::eval_fields(forms, q, self.dim)?;
                check_rank(&rows, self.co_rank(), "constraint one-forms", q)?;
                Ok(rows)
            }
            Rep::Span(fields) => {
                let vecs = Self::eval_fields(fields, q, self.dim)?;
                orthogonal_complement(&vecs, self.dim, self.co_rank(), q)
            }
        }
    }

    /// Constraint rows as a matrix, one one-form per row.
    pub fn constraint_matrix(&self, q: &[f64]) -> Result<DenseMatrix> {
        Ok(DenseMatrix::from_rows(&self.one_forms(q)?))
    }

    /// Largest absolute value of the one-forms on `v`.
    pub fn violation(&self, q: &[f64], v: &[f64]) -> Result<f64> {
        Ok(self
            .one_forms(q)?
            .iter()
            .map(|mu| dot(mu, v).abs())
            .fold(0.0f64, f64::max))
    }
}

fn check_rank(vecs: &[Vec<f64>], expected: usize, what: &str, q: &[f64]) -> Result<()> {
    // Pivoted Gram-Schmidt rank estimate.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut work: Vec<Vec<f64>> = vecs.to_vec();
    for _ in 0..vecs.len() {
        let (idx, best) = work
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm_2(v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, 0.0));
        if best <= GS_TOL {
            break;
        }
        let mut v = work.remove(idx);
        let n = norm_2(&v);
        v.iter_mut().for_each(|x| *x /= n);
        for w in work.iter_mut() {
            let c = dot(w, &v);
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= c * vi;
            }
        }
        basis.push(v);
    }
    if basis.len() == expected {
        Ok(())
    } else {
        Err(Error::RankDeficient {
            what: what.into(),
            point: q.to_vec(),
        })
    }
}

/// Euclidean orthogonal complement of the span of `rows`, of expected
/// dimension `want`, via pivoted Gram-Schmidt at tolerance `GS_TOL`.
fn orthogonal_complement(
    rows: &[Vec<f64>],
    dim: usize,
    want: usize,
    q: &[f64],
) -> Result<Vec<Vec<f64>>> {
    // Orthonormalize the given rows first.
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for b in &ortho {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let n = norm_2(&v);
        if n <= GS_TOL {
            return Err(Error::RankDeficient {
                what: "one-form rows".into(),
                point: q.to_vec(),
            });
        }
        v.iter_mut().for_each(|x| *x /= n);
        ortho.push(v);
    }
    // Complete with pivoted coordinate directions.
    let mut complement: Vec<Vec<f64>> = Vec::new();
    while complement.len() < want {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for axis in 0..dim {
            let mut v = vec![0.0; dim];
            v[axis] = 1.0;
            for b in ortho.iter().chain(complement.iter()) {
                let c = dot(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
            let n = norm_2(&v);
            if best.as_ref().map(|(bn, _)| n > *bn).unwrap_or(true) {
                best = Some((n, v));
            }
        }
        match best {
            Some((n, mut v)) if n > GS_TOL => {
                v.iter_mut().for_each(|x| *x /= n);
                complement.push(v);
            }
            _ => {
                return Err(Error::RankDeficient {
                    what: "orthogonal complement".into(),
                    point: q.to_vec(),
                })
            }
        }
    }
    Ok(complement)
}

/// Metric-orthogonal projection of `v` onto the distribution at `q`.
///
/// Solves the Gram system of the spanning vectors; the remainder
/// `v - P(v)` is `g`-orthogonal to the distribution.
pub fn project_g(
    metric: &MetricField,
    dist: &Distribution,
    q: &[f64],
    v: &[f64],
) -> Result<Vec<f64>> {
    let span = dist.spanning_vectors(q)?;
    project_g_span(metric, &span, q, v)
}

/// Projection given an explicit spanning set (avoids re-deriving one).
pub fn project_g_span(
    metric: &MetricField,
    span: &[Vec<f64>],
    q: &[f64],
    v: &[f64],
) -> Result<Vec<f64>> {
    let g = metric.evaluate(q)?;
    let k = span.len();
    let mut gram = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, g.bilinear(&span[i], &span[j]));
        }
    }
    let rhs: Vec<f64> = span.iter().map(|e| g.bilinear(e, v)).collect();
    let coeffs = solve_linear(&gram, &rhs).map_err(|_| Error::RankDeficient {
        what: "Gram matrix of spanning fields".into(),
        point: q.to_vec(),
    })?;
    let mut out = vec![0.0; v.len()];
    for (c, e) in coeffs.iter().zip(span) {
        for (oi, ei) in out.iter_mut().zip(e) {
            *oi += c * ei;
        }
    }
    Ok(out)
}
