//! Classical Runge-Kutta stepping.
//!
//! Fixed-step RK4 is the default throughout the crate (reproducible step
//! sequences); step-doubling error control is available where an accuracy
//! target matters more than an exact sample grid.

use crate::error::{Error, Result};

/// Stepper selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeStepper {
    /// Fixed-step classical RK4.
    Rk4Fixed { dt: f64 },
    /// RK4 with step-doubling error control: a full step is compared against
    /// two half steps and accepted when the estimated local error per unit
    /// step is below `tolerance`.
    Rk4StepDoubling { dt: f64, tolerance: f64 },
}

impl OdeStepper {
    pub fn validate(&self) -> Result<()> {
        let (dt, tol) = match *self {
            OdeStepper::Rk4Fixed { dt } => (dt, 1.0),
            OdeStepper::Rk4StepDoubling { dt, tolerance } => (dt, tolerance),
        };
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument("step must be positive".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        match *self {
            OdeStepper::Rk4Fixed { dt } => dt,
            OdeStepper::Rk4StepDoubling { dt, .. } => dt,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            OdeStepper::Rk4Fixed { dt } => format!("rk4-fixed(dt={dt})"),
            OdeStepper::Rk4StepDoubling { dt, tolerance } => {
                format!("rk4-step-doubling(dt={dt},tol={tolerance})")
            }
        }
    }
}

fn ensure_finite(y: &[f64], t: f64) -> Result<()> {
    if y.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteState { t })
    }
}

/// One classical 4-stage step of `y' = f(y)`.
pub fn rk4_step<F>(f: &F, y: &[f64], dt: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let n = y.len();
    let k1 = f(y)?;
    ensure_finite(&k1, 0.0)?;
    let mut stage = vec![0.0; n];
    for i in 0..n {
        stage[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = f(&stage)?;
    ensure_finite(&k2, 0.0)?;
    for i in 0..n {
        stage[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = f(&stage)?;
    ensure_finite(&k3, 0.0)?;
    for i in 0..n {
        stage[i] = y[i] + dt * k3[i];
    }
    let k4 = f(&stage)?;
    ensure_finite(&k4, 0.0)?;
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    ensure_finite(&out, 0.0)?;
    Ok(out)
}

/// Integrate `y' = f(y)` over `[0, t_final]`, returning the sample times and
/// states (including the initial one).
pub fn integrate<F>(
    f: &F,
    y0: &[f64],
    t_final: f64,
    stepper: OdeStepper,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    stepper.validate()?;
    if !(t_final >= 0.0) {
        return Err(Error::InvalidArgument("final time must be non-negative".into()));
    }
    let mut times = vec![0.0];
    let mut states = vec![y0.to_vec()];
    if t_final == 0.0 {
        return Ok((times, states));
    }
    match stepper {
        OdeStepper::Rk4Fixed { dt } => {
            // Uniform grid; the count is rounded so dt is honored exactly when
            // t_final is a multiple of it.
            let steps = (t_final / dt).round().max(1.0) as usize;
            let dt = t_final / steps as f64;
            let mut y = y0.to_vec();
            for k in 1..=steps {
                y = rk4_step(f, &y, dt).map_err(|e| match e {
                    Error::NonFiniteState { .. } => Error::NonFiniteState { t: k as f64 * dt },
                    other => other,
                })?;
                times.push(k as f64 * dt);
                states.push(y.clone());
            }
        }
        OdeStepper::Rk4StepDoubling { dt, tolerance } => {
            let mut t = 0.0;
            let mut h = dt.min(t_final);
            let mut y = y0.to_vec();
            while t < t_final - 1e-15 * t_final.max(1.0) {
                h = h.min(t_final - t);
                let full = rk4_step(f, &y, h)?;
                let half = rk4_step(f, &y, 0.5 * h)?;
                let two_half = rk4_step(f, &half, 0.5 * h)?;
                // Richardson estimate of the local error of the two-half-step
                // result; RK4 has order 4, hence the factor 15.
                let err = full
                    .iter()
                    .zip(&two_half)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
                    / 15.0;
                if err <= tolerance || h <= 1e-12 {
                    t += h;
                    y = two_half;
                    times.push(t);
                    states.push(y.clone());
                    if err < tolerance / 32.0 {
                        h *= 2.0;
                    }
                } else {
                    h *= 0.5;
                }
            }
        }
    }
    Ok((times, states))
}
