//! Construction of the reduced conformal metric and of the principal metric
//! on the total space.
//!
//! Two evaluation routes exist for the principal metric. The default
//! [`principal_metric`] works for any [`BundleSystem`] and differentiates by
//! finite differences (the evaluator contains linear solves). For systems
//! whose data is available generically over [`Scalar`], the same
//! construction can be run on dual numbers ([`principal_metric_exact`]),
//! giving exact metric derivatives; integration benchmarks that must isolate
//! integrator order use that route.

use crate::error::{Error, Result};
use crate::geometry::{MetricField, ScalarField, SmoothMatrix};
use crate::numeric::dual::Scalar;
use crate::numeric::matrix::{solve_in_place, DenseMatrix, LuFactors};

use super::gyroscopic::{recover_phi, RecoverOptions};
use super::system::{coordinate_lifts, reduced_metric, BundleSystem};

/// The conformal exponent as a scalar field on the base: the closed form when
/// the system carries one, otherwise recovery by line integration from the
/// system's pinned basepoint (one gyroscopic-tensor sample per quadrature
/// node; noticeably slower than the closed form).
pub fn phi_field(sys: &BundleSystem) -> Result<ScalarField> {
    if let Some(phi) = sys.analytic_phi() {
        return Ok(phi.clone());
    }
    if sys.base_dim() < 2 {
        return Err(Error::InvalidArgument(
            "conformal-exponent recovery needs base dimension >= 2".into(),
        ));
    }
    let sys = sys.clone();
    let basepoint = sys.phi_basepoint().to_vec();
    let opts = RecoverOptions {
        check_closedness: false,
        ..RecoverOptions::default()
    };
    Ok(ScalarField::new(sys.base_dim(), move |base: &[f64]| {
        recover_phi(&sys, &basepoint, base, &opts).unwrap_or(f64::NAN)
    }))
}

/// Conformally rescaled reduced metric on the base: `exp(2 phi)` times the
/// reduced metric.
pub fn canonical_metric(sys: &BundleSystem) -> Result<MetricField> {
    let phi = phi_field(sys)?;
    let sys = sys.clone();
    let m = sys.base_dim();
    Ok(MetricField::from_fn(m, move |base: &[f64]| {
        let factor = (2.0 * phi.evaluate(base)?).exp();
        let mut g = reduced_metric(&sys, base)?;
        let data: Vec<f64> = g.data().iter().map(|x| factor * x).collect();
        g = DenseMatrix::from_vec(m, m, data);
        Ok(g)
    }))
}

/// The principal metric on the total space.
///
/// At each point the metric is assembled in the frame
/// `B = [lifts of the base coordinate fields | fiber coordinate fields]`:
/// the horizontal block is the conformal reduced metric at the projected
/// point, the vertical block is the original metric restricted to fiber
/// directions, and the two blocks are orthogonal. In coordinates
/// `H = B^{-T} D B^{-1}`.
pub fn principal_metric(sys: &BundleSystem) -> Result<MetricField> {
    let phi = phi_field(sys)?;
    let sys = sys.clone();
    let n = sys.dim();
    let m = sys.base_dim();
    Ok(MetricField::from_fn(n, move |q: &[f64]| {
        let base = sys.project_base(q);
        let factor = (2.0 * phi.evaluate(&base)?).exp();
        let g_reduced = reduced_metric(&sys, &base)?;
        let g_total = sys.metric().evaluate(q)?;
        let lifts = coordinate_lifts(&sys, q)?;

        // Frame matrix: lift columns, then fiber coordinate columns.
        let mut frame = DenseMatrix::zeros(n, n);
        for (a, lift) in lifts.iter().enumerate() {
            for i in 0..n {
                frame.set(i, a, lift[i]);
            }
        }
        for j in m..n {
            frame.set(j, j, 1.0);
        }

        // Block metric in that frame.
        let mut block = DenseMatrix::zeros(n, n);
        for a in 0..m {
            for b in 0..m {
                block.set(a, b, factor * g_reduced.get(a, b));
            }
        }
        for i in m..n {
            for j in m..n {
                block.set(i, j, g_total.get(i, j));
            }
        }

        let lu = LuFactors::factor(&frame).map_err(|_| Error::RankDeficient {
            what: "principal-metric frame".into(),
            point: q.to_vec(),
        })?;
        // columns of F^{-1}
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = lu.solve(&e);
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        let mut h = inv.transpose().mul_mat(&block).mul_mat(&inv);
        h.symmetrize();
        Ok(h)
    }))
}

/// System data written generically over the scalar type: metric entries,
/// constraint rows and the conformal exponent all evaluate on plain floats
/// or on dual numbers. Implementing this lets the principal-metric
/// construction run with exact forward-mode derivatives.
pub trait ScalarBundleData: Send + Sync {
    fn dim(&self) -> usize;
    fn base_dim(&self) -> usize;
    /// Fiber coordinates of the local section.
    fn section_fiber(&self) -> Vec<f64>;
    /// Row-major metric entries on the total chart.
    fn metric_entries<S: Scalar>(&self, q: &[S]) -> Vec<S>;
    /// Constraint one-form rows (coordinate components).
    fn constraint_rows<S: Scalar>(&self, q: &[S]) -> Vec<Vec<S>>;
    /// Conformal exponent on the base chart.
    fn conformal_exponent<S: Scalar>(&self, base: &[S]) -> S;
}

/// The principal-metric construction replayed on an arbitrary scalar type.
fn principal_entries_generic<T: ScalarBundleData, S: Scalar>(data: &T, q: &[S]) -> Vec<S> {
    let n = data.dim();
    let m = data.base_dim();
    let c = n - m;
    let base = &q[..m];

    // Horizontal lifts of the base coordinate fields at q.
    let rows = data.constraint_rows(q);
    let mut lifts: Vec<Vec<S>> = Vec::with_capacity(m);
    for a in 0..m {
        let mut v = vec![S::zero(); n];
        v[a] = S::one();
        if c > 0 {
            let mut block = vec![S::zero(); c * c];
            let mut rhs = vec![S::zero(); c];
            for (r, mu) in rows.iter().enumerate() {
                for j in 0..c {
                    block[r * c + j] = mu[m + j];
                }
                rhs[r] = -mu[a];
            }
            solve_in_place(c, &mut block, &mut rhs).expect("fiber block solve");
            v[m..].copy_from_slice(&rhs);
        }
        lifts.push(v);
    }

    // Reduced metric through the section, then the conformal factor.
    let mut section: Vec<S> = base.to_vec();
    section.extend(data.section_fiber().iter().map(|x| S::from_f64(*x)));
    let g_section = data.metric_entries(&section);
    let rows_section = data.constraint_rows(&section);
    let mut lifts_section: Vec<Vec<S>> = Vec::with_capacity(m);
    for a in 0..m {
        let mut v = vec![S::zero(); n];
        v[a] = S::one();
        if c > 0 {
            let mut block = vec![S::zero(); c * c];
            let mut rhs = vec![S::zero(); c];
            for (r, mu) in rows_section.iter().enumerate() {
                for j in 0..c {
                    block[r * c + j] = mu[m + j];
                }
                rhs[r] = -mu[a];
            }
            solve_in_place(c, &mut block, &mut rhs).expect("fiber block solve");
            v[m..].copy_from_slice(&rhs);
        }
        lifts_section.push(v);
    }
    let bilinear = |g: &[S], u: &[S], w: &[S]| -> S {
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + u[i] * g[i * n + j] * w[j];
            }
        }
        acc
    };
    let factor = (S::from_f64(2.0) * data.conformal_exponent(base)).exp();

    // Block metric in the frame [lifts | fiber coordinate fields].
    let g_total = data.metric_entries(q);
    let mut block = vec![S::zero(); n * n];
    for a in 0..m {
        for b in 0..m {
            block[a * n + b] = factor * bilinear(&g_section, &lifts_section[a], &lifts_section[b]);
        }
    }
    for i in m..n {
        for j in m..n {
            block[i * n + j] = g_total[i * n + j];
        }
    }

    // Frame inverse, column by column.
    let mut frame = vec![S::zero(); n * n];
    for (a, lift) in lifts.iter().enumerate() {
        for i in 0..n {
            frame[i * n + a] = lift[i];
        }
    }
    for j in m..n {
        frame[j * n + j] = S::one();
    }
    let mut inv = vec![S::zero(); n * n];
    for j in 0..n {
        let mut a = frame.clone();
        let mut e = vec![S::zero(); n];
        e[j] = S::one();
        solve_in_place(n, &mut a, &mut e).expect("frame solve");
        for i in 0..n {
            inv[i * n + j] = e[i];
        }
    }

    // H = inv^T * block * inv, symmetrized.
    let mut tmp = vec![S::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let mut acc = S::zero();
            for l in 0..n {
                acc = acc + inv[l * n + i] * block[l * n + k];
            }
            tmp[i * n + k] = acc;
        }
    }
    let mut h = vec![S::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = S::zero();
            for k in 0..n {
                acc = acc + tmp[i * n + k] * inv[k * n + j];
            }
            h[i * n + j] = acc;
        }
    }
    let half = S::from_f64(0.5);
    for i in 0..n {
        for j in (i + 1)..n {
            let s = half * (h[i * n + j] + h[j * n + i]);
            h[i * n + j] = s;
            h[j * n + i] = s;
        }
    }
    h
}

/// Adapter exposing the generic construction as an analytic matrix field.
pub struct PrincipalEntries<T: ScalarBundleData>(pub T);

impl<T: ScalarBundleData> SmoothMatrix for PrincipalEntries<T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn entries<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        principal_entries_generic(&self.0, q)
    }
}

/// Principal metric with exact forward-mode derivatives, for systems whose
/// data is expressible generically over the scalar type.
pub fn principal_metric_exact<T: ScalarBundleData + 'static>(data: T) -> MetricField {
    MetricField::analytic(PrincipalEntries(data))
}
