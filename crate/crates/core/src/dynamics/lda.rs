//! Constrained equations of motion via Lagrange multipliers.
//!
//! Accelerations and multipliers are solved together from the saddle system
//!
//! ```text
//! [ g(q)  A(q)^T ] [  qdd ]   [ F(q, v)      ]
//! [ A(q)  0      ] [ -lam ] = [ -(v . dA) v  ]
//! ```
//!
//! where the rows of `A` are the constraint one-forms and `F` collects the
//! force terms of the constrained Lagrangian (metric-derivative terms minus
//! the potential differential).

use crate::chaplygin::BundleSystem;
use crate::error::{Error, Result};
use crate::numeric::diff::jacobian_fd;
use crate::numeric::matrix::{solve_linear, DenseMatrix};
use crate::numeric::{dot, norm_inf};

/// Tolerance on `|mu(v)|` for a state to count as constrained.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-8;

/// Acceleration and multipliers at one constrained state.
#[derive(Debug, Clone)]
pub struct LdaSolveResult {
    pub acceleration: Vec<f64>,
    pub multipliers: Vec<f64>,
}

/// Force covector of the unconstrained Lagrangian at `(q, v)`:
/// `F_k = 1/2 v^T (d_k g) v - sum_i (d_i g_{k.}) v^i . v - d_k V`.
fn force_terms(sys: &BundleSystem, q: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let n = sys.dim();
    let dg = sys.metric().partials(q)?;
    let mut force = vec![0.0; n];
    for k in 0..n {
        let mut quad = 0.5 * dg[k].bilinear(v, v);
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += dg[i].get(k, j) * v[j];
            }
            quad -= row * v[i];
        }
        force[k] = quad;
    }
    if let Some(pot) = sys.potential_on_total() {
        let dv = pot.differential(q)?;
        for (f, d) in force.iter_mut().zip(&dv) {
            *f -= d;
        }
    }
    Ok(force)
}

/// Solve the constrained dynamics at a state whose velocity satisfies the
/// constraints (within [`CONSTRAINT_TOLERANCE`]).
pub fn lda_rhs(sys: &BundleSystem, q: &[f64], v: &[f64]) -> Result<LdaSolveResult> {
    lda_rhs_with_tolerance(sys, q, v, CONSTRAINT_TOLERANCE)
}

pub fn lda_rhs_with_tolerance(
    sys: &BundleSystem,
    q: &[f64],
    v: &[f64],
    tolerance: f64,
) -> Result<LdaSolveResult> {
    let n = sys.dim();
    let c = sys.fiber_dim();
    let violation = sys.constraints().violation(q, v)?;
    if violation > tolerance {
        return Err(Error::ConstraintViolated {
            violation,
            tolerance,
        });
    }
    let g = sys.metric().evaluate(q)?;
    let force = force_terms(sys, q, v)?;
    if c == 0 {
        let acc = solve_linear(&g, &force)?;
        return Ok(LdaSolveResult {
            acceleration: acc,
            multipliers: Vec::new(),
        });
    }
    let rows = sys.constraints().one_forms(q)?;
    // Time derivative of each constraint row along the motion: (v . dA) v.
    let mut drift = vec![0.0; c];
    for (a, _) in rows.iter().enumerate() {
        let row_field = |p: &[f64]| sys.constraints().one_forms(p).map(|r| r[a].clone());
        let jac = jacobian_fd(row_field, q, n)?;
        // d/dt mu^a_i = sum_j d_j mu^a_i v^j; contracted once more with v.
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += jac.get(i, j) * v[j] * v[i];
            }
        }
        drift[a] = acc;
    }
    let size = n + c;
    let mut saddle = DenseMatrix::zeros(size, size);
    for i in 0..n {
        for j in 0..n {
            saddle.set(i, j, g.get(i, j));
        }
    }
    for (a, row) in rows.iter().enumerate() {
        for i in 0..n {
            saddle.set(i, n + a, row[i]);
            saddle.set(n + a, i, row[i]);
        }
    }
    let mut rhs = vec![0.0; size];
    rhs[..n].copy_from_slice(&force);
    for a in 0..c {
        rhs[n + a] = -drift[a];
    }
    let solution = solve_linear(&saddle, &rhs)
        .map_err(|e| Error::SingularSaddle(e.to_string()))?;
    let acceleration = solution[..n].to_vec();
    let multipliers: Vec<f64> = solution[n..].iter().map(|x| -x).collect();
    // Consistency of the constraint rows at the acceleration level.
    let mut residual = vec![0.0; c];
    for (a, row) in rows.iter().enumerate() {
        residual[a] = dot(row, &acceleration) + drift[a];
    }
    if norm_inf(&residual) > 1e-10 {
        return Err(Error::SingularSaddle(format!(
            "constraint acceleration residual {:.3e}",
            norm_inf(&residual)
        )));
    }
    Ok(LdaSolveResult {
        acceleration,
        multipliers,
    })
}
