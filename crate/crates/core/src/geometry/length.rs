//! Curve length with respect to a metric, from stored trajectory samples.

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::numeric::quad::simpson_samples;

use super::metric::MetricField;

/// Length `integral of sqrt(g(c', c'))` over the stored samples.
///
/// Uniform sample grids use composite Simpson directly (an odd interval count
/// is closed with a 3/8 tail); non-uniform grids fall back to per-interval
/// Simpson with Hermite-interpolated midpoints. Both are 4th order.
pub fn curve_length(metric: &MetricField, traj: &Trajectory) -> Result<f64> {
    let n = traj.len();
    if n < 2 {
        return Ok(0.0);
    }
    let speeds: Vec<f64> = traj
        .iter()
        .map(|(_, s)| metric.norm(&s.q, &s.v))
        .collect::<Result<_>>()?;
    if let Some(h) = traj.uniform_spacing() {
        return simpson_samples(&speeds, h);
    }
    let mut total = 0.0;
    for k in 0..n - 1 {
        let (t0, _) = traj.sample(k);
        let (t1, _) = traj.sample(k + 1);
        let mid = traj.state_at(0.5 * (t0 + t1));
        let f_mid = metric.norm(&mid.q, &mid.v)?;
        total += (t1 - t0) / 6.0 * (speeds[k] + 4.0 * f_mid + speeds[k + 1]);
    }
    Ok(total)
}
