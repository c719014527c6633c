//! Trajectory integration for the three dynamics of interest: constrained
//! motion, geodesics, and mechanical systems.

use crate::chaplygin::BundleSystem;
use crate::error::{Error, Result};
use crate::geometry::{geodesic_rhs, mechanical_rhs, project_g, MetricField, ScalarField};
use crate::numeric::ode::{integrate as ode_integrate, OdeStepper};

use super::lda::{lda_rhs, CONSTRAINT_TOLERANCE};
use super::trajectory::{State, Trajectory, TrajectoryMeta};

/// Largest admissible constraint violation of an initial velocity; violations
/// between the strict tolerance and this bound are projected away (float-entered
/// initial data), larger ones are rejected.
pub const PROJECTION_TOLERANCE: f64 = 1e-6;

fn pack(q: &[f64], v: &[f64]) -> Vec<f64> {
    let mut y = Vec::with_capacity(q.len() + v.len());
    y.extend_from_slice(q);
    y.extend_from_slice(v);
    y
}

fn unpack(y: &[f64]) -> (&[f64], &[f64]) {
    let n = y.len() / 2;
    (&y[..n], &y[n..])
}

fn to_trajectory(
    times: Vec<f64>,
    raw: Vec<Vec<f64>>,
    meta: TrajectoryMeta,
) -> Result<Trajectory> {
    let states = raw
        .into_iter()
        .map(|y| {
            let (q, v) = unpack(&y);
            State {
                q: q.to_vec(),
                v: v.to_vec(),
            }
        })
        .collect();
    Trajectory::new(times, states, meta)
}

/// Integrate the constrained dynamics from `(q0, v0)` over `[0, T]`.
///
/// An initial velocity violating the constraints by at most
/// [`PROJECTION_TOLERANCE`] is replaced by its metric-orthogonal projection
/// onto the distribution (with a warning); larger violations are errors.
pub fn integrate_nonholonomic(
    sys: &BundleSystem,
    q0: &[f64],
    v0: &[f64],
    t_final: f64,
    stepper: OdeStepper,
) -> Result<Trajectory> {
    let violation = sys.constraints().violation(q0, v0)?;
    let v0 = if violation <= CONSTRAINT_TOLERANCE {
        v0.to_vec()
    } else if violation <= PROJECTION_TOLERANCE {
        log::warn!(
            "initial velocity violates constraints by {violation:.3e}; projecting onto the distribution"
        );
        project_g(sys.metric(), sys.constraints(), q0, v0)?
    } else {
        return Err(Error::ConstraintViolated {
            violation,
            tolerance: PROJECTION_TOLERANCE,
        });
    };
    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let (q, v) = unpack(y);
        // The velocity drifts off the distribution only by integrator error;
        // solve with a loose gate and let the conservation checks measure it.
        let result = super::lda::lda_rhs_with_tolerance(sys, q, v, 1e-5)?;
        Ok(pack(v, &result.acceleration))
    };
    let (times, raw) = ode_integrate(&rhs, &pack(q0, &v0), t_final, stepper)?;
    to_trajectory(
        times,
        raw,
        TrajectoryMeta {
            system: sys.id().to_string(),
            stepper: stepper.label(),
            dt: stepper.dt(),
        },
    )
}

/// Integrate the geodesic flow of `metric` from `(q0, v0)` over `[0, T]`.
pub fn integrate_geodesic(
    metric: &MetricField,
    q0: &[f64],
    v0: &[f64],
    t_final: f64,
    stepper: OdeStepper,
) -> Result<Trajectory> {
    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let (q, v) = unpack(y);
        let (_, acc) = geodesic_rhs(metric, q, v)?;
        Ok(pack(v, &acc))
    };
    let (times, raw) = ode_integrate(&rhs, &pack(q0, v0), t_final, stepper)?;
    to_trajectory(
        times,
        raw,
        TrajectoryMeta {
            system: "geodesic".into(),
            stepper: stepper.label(),
            dt: stepper.dt(),
        },
    )
}

/// Integrate the mechanical flow of `(metric, potential)` over `[0, T]`.
pub fn integrate_mechanical(
    metric: &MetricField,
    potential: &ScalarField,
    q0: &[f64],
    v0: &[f64],
    t_final: f64,
    stepper: OdeStepper,
) -> Result<Trajectory> {
    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let (q, v) = unpack(y);
        let (_, acc) = mechanical_rhs(metric, potential, q, v)?;
        Ok(pack(v, &acc))
    };
    let (times, raw) = ode_integrate(&rhs, &pack(q0, v0), t_final, stepper)?;
    to_trajectory(
        times,
        raw,
        TrajectoryMeta {
            system: "mechanical".into(),
            stepper: stepper.label(),
            dt: stepper.dt(),
        },
    )
}

/// Convenience: the nonholonomic right-hand side exposed as acceleration only.
pub fn nonholonomic_acceleration(sys: &BundleSystem, q: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    Ok(lda_rhs(sys, q, v)?.acceleration)
}
