//! The predicted reparametrization between constrained trajectories and
//! geodesics of the principal metric.
//!
//! Along a constrained trajectory `c`, `tau(t)` is the integral of
//! `exp(phi)` evaluated at the projected curve. The geodesic started at
//! `c(0)` with velocity `exp(-phi) c'(0)` passes through `c(t)` at parameter
//! `tau(t)`.

use crate::chaplygin::{phi_field, BundleSystem};
use crate::error::{Error, Result};
use crate::geometry::ScalarField;
use crate::numeric::quad::cumulative_simpson;

use super::trajectory::Trajectory;

/// Monotone map from trajectory time to geodesic parameter, tabulated on the
/// trajectory's sample grid. The derivative values are kept so evaluation
/// between samples stays 4th order.
#[derive(Debug, Clone)]
pub struct TimeMap {
    times: Vec<f64>,
    tau: Vec<f64>,
    dtau: Vec<f64>,
}

impl TimeMap {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn tau_values(&self) -> &[f64] {
        &self.tau
    }

    pub fn final_tau(&self) -> f64 {
        *self.tau.last().unwrap()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.tau.windows(2).all(|w| w[1] > w[0])
    }

    /// Evaluate by cubic Hermite interpolation (the derivative of `tau` is
    /// known exactly at the samples).
    pub fn tau_at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.tau[0];
        }
        if t >= self.times[n - 1] {
            return self.tau[n - 1];
        }
        let seg = match self.times.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(k) => return self.tau[k],
            Err(k) => k - 1,
        };
        let (t0, t1) = (self.times[seg], self.times[seg + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.tau[seg]
            + (s3 - 2.0 * s2 + s) * h * self.dtau[seg]
            + (-2.0 * s3 + 3.0 * s2) * self.tau[seg + 1]
            + (s3 - s2) * h * self.dtau[seg + 1]
    }
}

/// Time map from a conformal exponent on the base and a trajectory.
pub fn time_map_with_phi(
    phi: &ScalarField,
    base_dim: usize,
    traj: &Trajectory,
) -> Result<TimeMap> {
    let integrand: Vec<f64> = traj
        .states()
        .iter()
        .map(|s| phi.evaluate(&s.q[..base_dim]).map(f64::exp))
        .collect::<Result<_>>()?;
    let tau = match traj.uniform_spacing() {
        Some(h) => cumulative_simpson(&integrand, h)?,
        None => {
            // Non-uniform grid: per-interval Simpson with interpolated
            // midpoint states.
            let mut acc = vec![0.0; traj.len()];
            for k in 0..traj.len() - 1 {
                let (t0, _) = traj.sample(k);
                let (t1, _) = traj.sample(k + 1);
                let mid = traj.state_at(0.5 * (t0 + t1));
                let f_mid = phi.evaluate(&mid.q[..base_dim])?.exp();
                acc[k + 1] =
                    acc[k] + (t1 - t0) / 6.0 * (integrand[k] + 4.0 * f_mid + integrand[k + 1]);
            }
            acc
        }
    };
    let map = TimeMap {
        times: traj.times().to_vec(),
        tau,
        dtau: integrand,
    };
    if !map.is_strictly_increasing() {
        return Err(Error::InvalidArgument(
            "time map is not strictly increasing".into(),
        ));
    }
    Ok(map)
}

/// Time map of a constrained trajectory of `sys`, using the system's
/// conformal exponent (closed form when available, recovered otherwise).
pub fn time_map(sys: &BundleSystem, traj: &Trajectory) -> Result<TimeMap> {
    let phi = phi_field(sys)?;
    time_map_with_phi(&phi, sys.base_dim(), traj)
}
