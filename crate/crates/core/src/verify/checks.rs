//! The three trajectory-level certificates: reparametrized equivalence,
//! relatedness of the rescaled constrained field to the principal-metric
//! field, and the local length-minimization property.

use crate::chaplygin::{phi_field, BundleSystem};
use crate::dynamics::{
    integrate_geodesic, integrate_mechanical, integrate_nonholonomic, lda_rhs_with_tolerance,
    time_map_with_phi, TimeMap, Trajectory,
};
use crate::error::{Error, Result};
use crate::geometry::{curve_length, mechanical_rhs, MetricField, ScalarField};
use crate::numeric::matrix::DenseMatrix;
use crate::numeric::ode::{rk4_step, OdeStepper};
use crate::numeric::quad::cumulative_simpson;
use crate::numeric::{norm_inf, solve_linear};

/// Outcome of the reparametrized-equivalence comparison.
#[derive(Debug, Clone)]
pub struct EquivalenceOutcome {
    /// `sup_t |gamma(tau(t)) - c(t)|` over the constrained trajectory's
    /// sample grid (the principal-side curve is Hermite-interpolated).
    pub residual: f64,
    /// Diagnostic: configurations compared at matched arclength fractions,
    /// which tests image equality independently of the predicted map.
    pub arclength_residual: f64,
    pub time_map: TimeMap,
    pub nonholonomic: Trajectory,
    pub principal: Trajectory,
}

/// Integrate both sides from the same constrained initial state and compare
/// through the predicted time map.
///
/// The constrained side runs the multiplier formulation; the principal side
/// integrates the (geodesic or mechanical) flow of `h` from the velocity
/// scaled by `exp(-phi)`. The two paths share no dynamics code.
pub fn check_equivalence(
    sys: &BundleSystem,
    h: &MetricField,
    q0: &[f64],
    v0: &[f64],
    t_final: f64,
    dt: f64,
) -> Result<EquivalenceOutcome> {
    let stepper = OdeStepper::Rk4Fixed { dt };
    let c = integrate_nonholonomic(sys, q0, v0, t_final, stepper)?;
    let phi = phi_field(sys)?;
    let tm = time_map_with_phi(&phi, sys.base_dim(), &c)?;
    let tau_final = tm.final_tau();

    let scale = (-phi.evaluate(&sys.project_base(q0))?).exp();
    let v0_scaled: Vec<f64> = v0.iter().map(|x| scale * x).collect();
    let gamma = match sys.potential_on_total() {
        Some(pot) => integrate_mechanical(h, &pot, q0, &v0_scaled, tau_final, stepper)?,
        None => integrate_geodesic(h, q0, &v0_scaled, tau_final, stepper)?,
    };

    let mut residual = 0.0f64;
    for (t, state) in c.iter() {
        let tau = tm.tau_at(t);
        let on_gamma = gamma.state_at(tau);
        let diff: Vec<f64> = on_gamma
            .q
            .iter()
            .zip(&state.q)
            .map(|(a, b)| a - b)
            .collect();
        residual = residual.max(norm_inf(&diff));
    }

    let arclength_residual = arclength_image_comparison(h, &c, &gamma, 100)?;

    Ok(EquivalenceOutcome {
        residual,
        arclength_residual,
        time_map: tm,
        nonholonomic: c,
        principal: gamma,
    })
}

/// Compare two curves as point sets: resample both at equal fractions of
/// their metric arclength and take the worst configuration difference.
fn arclength_image_comparison(
    metric: &MetricField,
    a: &Trajectory,
    b: &Trajectory,
    samples: usize,
) -> Result<f64> {
    let s_a = arclength_table(metric, a)?;
    let s_b = arclength_table(metric, b)?;
    let (total_a, total_b) = (*s_a.last().unwrap(), *s_b.last().unwrap());
    if total_a <= 0.0 || total_b <= 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for k in 0..=samples {
        let f = k as f64 / samples as f64;
        let qa = a.state_at(invert_monotone(a.times(), &s_a, f * total_a)).q;
        let qb = b.state_at(invert_monotone(b.times(), &s_b, f * total_b)).q;
        let diff: Vec<f64> = qa.iter().zip(&qb).map(|(x, y)| x - y).collect();
        worst = worst.max(norm_inf(&diff));
    }
    Ok(worst)
}

fn arclength_table(metric: &MetricField, traj: &Trajectory) -> Result<Vec<f64>> {
    let speeds: Vec<f64> = traj
        .iter()
        .map(|(_, s)| metric.norm(&s.q, &s.v))
        .collect::<Result<_>>()?;
    match traj.uniform_spacing() {
        Some(h) => cumulative_simpson(&speeds, h),
        None => {
            let mut acc = vec![0.0; traj.len()];
            for k in 1..traj.len() {
                let dt = traj.times()[k] - traj.times()[k - 1];
                acc[k] = acc[k - 1] + 0.5 * dt * (speeds[k] + speeds[k - 1]);
            }
            Ok(acc)
        }
    }
}

/// Parameter at which a monotone table reaches `target` (linear inversion).
fn invert_monotone(times: &[f64], values: &[f64], target: f64) -> f64 {
    if target <= values[0] {
        return times[0];
    }
    let n = values.len();
    if target >= values[n - 1] {
        return times[n - 1];
    }
    let k = values.partition_point(|v| *v < target) - 1;
    let span = values[k + 1] - values[k];
    let f = if span > 0.0 { (target - values[k]) / span } else { 0.0 };
    times[k] + f * (times[k + 1] - times[k])
}

/// Relatedness residual of the velocity-rescaling map.
///
/// At each constrained state the rescaled constrained field is pushed through
/// the fiberwise scaling `(q, v) -> (q, exp(-phi) v)` by finite differences
/// along short flows of the rescaled field, and compared with the principal
/// (geodesic or mechanical) field evaluated at the mapped state.
pub fn check_psi_relatedness(
    sys: &BundleSystem,
    h: &MetricField,
    states: &[(Vec<f64>, Vec<f64>)],
    flow_step: f64,
) -> Result<f64> {
    let phi = phi_field(sys)?;
    let m = sys.base_dim();
    let n = sys.dim();
    let potential = sys.potential_on_total();

    // Rescaled constrained field on the tangent space, as a flat ODE state.
    // Intermediate flow stages leave the distribution by O(step^2), so the
    // membership gate is the integrator's loose one.
    let scaled_rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let (q, v) = y.split_at(n);
        let factor = (-phi.evaluate(&q[..m])?).exp();
        let acc = lda_rhs_with_tolerance(sys, q, v, 1e-5)?.acceleration;
        let mut out = Vec::with_capacity(2 * n);
        out.extend(v.iter().map(|x| factor * x));
        out.extend(acc.iter().map(|x| factor * x));
        Ok(out)
    };

    let psi = |y: &[f64]| -> Result<Vec<f64>> {
        let (q, v) = y.split_at(n);
        let factor = (-phi.evaluate(&q[..m])?).exp();
        let mut out = q.to_vec();
        out.extend(v.iter().map(|x| factor * x));
        Ok(out)
    };

    let mut worst = 0.0f64;
    for (q, v) in states {
        let mut y0 = q.clone();
        y0.extend_from_slice(v);

        // Flow for +/- eps and +/- 2 eps; a single RK4 step per flow keeps
        // the flow error far below the differencing error.
        let flow = |s: f64| -> Result<Vec<f64>> {
            if s == 0.0 {
                return Ok(y0.clone());
            }
            let signed = |y: &[f64]| -> Result<Vec<f64>> {
                let d = scaled_rhs(y)?;
                Ok(d.iter().map(|x| x * s.signum()).collect())
            };
            rk4_step(&signed, &y0, s.abs())
        };
        let eps = flow_step;
        let p_m2 = psi(&flow(-2.0 * eps)?)?;
        let p_m1 = psi(&flow(-eps)?)?;
        let p_p1 = psi(&flow(eps)?)?;
        let p_p2 = psi(&flow(2.0 * eps)?)?;
        let pushed: Vec<f64> = (0..2 * n)
            .map(|i| (p_m2[i] - 8.0 * p_m1[i] + 8.0 * p_p1[i] - p_p2[i]) / (12.0 * eps))
            .collect();

        // Principal-side field at the mapped state.
        let factor = (-phi.evaluate(&q[..m])?).exp();
        let u: Vec<f64> = v.iter().map(|x| factor * x).collect();
        let (du, acc) = match &potential {
            Some(pot) => mechanical_rhs(h, pot, q, &u)?,
            None => crate::geometry::geodesic_rhs(h, q, &u)?,
        };
        let mut target = du;
        target.extend(acc);

        let diff: Vec<f64> = pushed.iter().zip(&target).map(|(a, b)| a - b).collect();
        worst = worst.max(norm_inf(&diff));
    }
    Ok(worst)
}

/// Outcome of the local distance comparison.
#[derive(Debug, Clone)]
pub struct DistanceOutcome {
    pub length: f64,
    pub distance: f64,
    pub residual: f64,
    pub iterations: usize,
    pub endpoint_error: f64,
    /// The time window actually used (halved on shooting failures).
    pub t_used: f64,
}

/// Compare the metric length of an initial trajectory segment with the
/// boundary-value distance between its endpoints.
///
/// The distance is computed by single shooting: damped Newton (forward-
/// difference Jacobian) on the initial velocity of a geodesic of `h` so that
/// it hits the segment endpoint at the segment's time; the distance is then
/// the connecting geodesic's length. On shooting failure the window is
/// halved (up to three times).
pub fn check_distance(
    h: &MetricField,
    traj: &Trajectory,
    t_small: f64,
    endpoint_tol: f64,
) -> Result<DistanceOutcome> {
    let mut window = t_small;
    let mut last_err: Option<Error> = None;
    for _ in 0..4 {
        match distance_once(h, traj, window, endpoint_tol) {
            Ok(outcome) => return Ok(outcome),
            Err(e @ Error::ShootingDiverged { .. }) => {
                last_err = Some(e);
                window *= 0.5;
            }
            Err(other) => return Err(other),
        }
    }
    Err(last_err.unwrap())
}

fn distance_once(
    h: &MetricField,
    traj: &Trajectory,
    t_small: f64,
    endpoint_tol: f64,
) -> Result<DistanceOutcome> {
    let segment = traj.truncated(t_small);
    if segment.len() < 2 {
        return Err(Error::InvalidArgument(
            "distance check needs at least two samples in the window".into(),
        ));
    }
    let t_used = segment.final_time();
    let q0 = segment.first_state().q.clone();
    let target = segment.final_state().q.clone();
    let n = q0.len();

    let length = curve_length(h, &segment)?;

    // Shooting: geodesic endpoint as a function of the initial velocity.
    let steps = 200usize;
    let dt = t_used / steps as f64;
    let endpoint = |v: &[f64]| -> Result<Vec<f64>> {
        let g = integrate_geodesic(h, &q0, v, t_used, OdeStepper::Rk4Fixed { dt })?;
        Ok(g.final_state().q.clone())
    };
    let mut v: Vec<f64> = target
        .iter()
        .zip(&q0)
        .map(|(a, b)| (a - b) / t_used)
        .collect();
    let mut residual_vec: Vec<f64> = endpoint(&v)?
        .iter()
        .zip(&target)
        .map(|(a, b)| a - b)
        .collect();
    let mut err = norm_inf(&residual_vec);
    let mut iterations = 0usize;
    while err > endpoint_tol {
        if iterations >= 50 {
            return Err(Error::ShootingDiverged {
                iterations,
                endpoint_error: err,
            });
        }
        iterations += 1;
        // Forward-difference Jacobian of the endpoint map.
        let mut jac = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let delta = 1e-6 * (1.0 + v[j].abs());
            let mut vj = v.clone();
            vj[j] += delta;
            let ej = endpoint(&vj)?;
            for i in 0..n {
                jac.set(i, j, (ej[i] - (residual_vec[i] + target[i])) / delta);
            }
        }
        let step = solve_linear(&jac, &residual_vec)
            .map_err(|_| Error::ShootingDiverged {
                iterations,
                endpoint_error: err,
            })?;
        // Damped update with step halving.
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let candidate: Vec<f64> = v
                .iter()
                .zip(&step)
                .map(|(x, s)| x - lambda * s)
                .collect();
            let cand_res: Vec<f64> = endpoint(&candidate)?
                .iter()
                .zip(&target)
                .map(|(a, b)| a - b)
                .collect();
            let cand_err = norm_inf(&cand_res);
            if cand_err < err {
                v = candidate;
                residual_vec = cand_res;
                err = cand_err;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            return Err(Error::ShootingDiverged {
                iterations,
                endpoint_error: err,
            });
        }
    }
    let distance = t_used * h.norm(&q0, &v)?;
    Ok(DistanceOutcome {
        length,
        distance,
        residual: (length - distance).abs(),
        iterations,
        endpoint_error: err,
        t_used,
    })
}

/// Constraint-violation supremum `max_t |mu(c'(t))|` along a trajectory.
pub fn constraint_violation_sup(sys: &BundleSystem, traj: &Trajectory) -> Result<f64> {
    let mut worst = 0.0f64;
    for (_, s) in traj.iter() {
        worst = worst.max(sys.constraints().violation(&s.q, &s.v)?);
    }
    Ok(worst)
}

/// Relative drift of a conserved energy along a trajectory.
pub fn relative_energy_drift<F>(traj: &Trajectory, energy: F) -> Result<f64>
where
    F: Fn(&[f64], &[f64]) -> Result<f64>,
{
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let e0 = {
        let s = traj.first_state();
        energy(&s.q, &s.v)?
    };
    for (_, s) in traj.iter() {
        let e = energy(&s.q, &s.v)?;
        min = min.min(e);
        max = max.max(e);
    }
    Ok((max - min) / e0.abs().max(f64::EPSILON))
}

/// Energy of the principal side: kinetic in `h` plus the basic potential.
pub fn principal_energy(
    h: &MetricField,
    potential: Option<&ScalarField>,
    base_dim: usize,
    q: &[f64],
    v: &[f64],
) -> Result<f64> {
    let kinetic = 0.5 * h.inner(q, v, v)?;
    let pot = match potential {
        Some(p) if p.dim() == base_dim => p.evaluate(&q[..base_dim])?,
        Some(p) => p.evaluate(q)?,
        None => 0.0,
    };
    Ok(kinetic + pot)
}
