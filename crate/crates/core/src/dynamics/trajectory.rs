//! Time-stamped trajectories and cubic Hermite interpolation between samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One configuration/velocity sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub q: Vec<f64>,
    pub v: Vec<f64>,
}

/// Integrator provenance carried with a trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub system: String,
    pub stepper: String,
    pub dt: f64,
}

/// Strictly increasing sample times with matching states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<State>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<State>, meta: TrajectoryMeta) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidArgument(
                "trajectory times and states differ in length".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        if let Some(first) = states.first() {
            let dim = first.q.len();
            if states
                .iter()
                .any(|s| s.q.len() != dim || s.v.len() != dim)
            {
                return Err(Error::InvalidArgument(
                    "trajectory states have inconsistent dimensions".into(),
                ));
            }
        }
        Ok(Self {
            times,
            states,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map(|s| s.q.len()).unwrap_or(0)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn sample(&self, k: usize) -> (f64, &State) {
        (self.times[k], &self.states[k])
    }

    pub fn first_state(&self) -> &State {
        &self.states[0]
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn final_state(&self) -> &State {
        self.states.last().unwrap()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &State)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// Sample spacing when the grid is uniform (within 1e-9 relative).
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let h = self.times[1] - self.times[0];
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
        uniform.then_some(h)
    }

    /// Cubic Hermite interpolation at time `t` (clamped to the sample range).
    /// Positions use the stored endpoint velocities; the returned velocity is
    /// the derivative of the interpolant.
    pub fn state_at(&self, t: f64) -> State {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.states[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.states[n - 1].clone();
        }
        let seg = match self
            .times
            .binary_search_by(|probe| probe.total_cmp(&t))
        {
            Ok(k) => return self.states[k].clone(),
            Err(k) => k - 1,
        };
        let (t0, t1) = (self.times[seg], self.times[seg + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        let a = &self.states[seg];
        let b = &self.states[seg + 1];
        let dim = a.q.len();
        let mut q = vec![0.0; dim];
        let mut v = vec![0.0; dim];
        for i in 0..dim {
            q[i] = h00 * a.q[i] + h10 * h * a.v[i] + h01 * b.q[i] + h11 * h * b.v[i];
            v[i] = d00 * a.q[i] + d10 * a.v[i] + d01 * b.q[i] + d11 * b.v[i];
        }
        State { q, v }
    }

    /// Prefix of the trajectory with `t <= t_max` (sample times only).
    pub fn truncated(&self, t_max: f64) -> Trajectory {
        let count = self
            .times
            .iter()
            .take_while(|&&t| t <= t_max + 1e-12 * t_max.abs().max(1.0))
            .count()
            .max(1);
        Trajectory {
            times: self.times[..count].to_vec(),
            states: self.states[..count].to_vec(),
            meta: self.meta.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cubic_trajectory() -> Trajectory {
        // q(t) = t^3 - t on [0, 2]: the Hermite interpolant is exact.
        let times: Vec<f64> = (0..21).map(|k| k as f64 * 0.1).collect();
        let states = times
            .iter()
            .map(|&t| State {
                q: vec![t * t * t - t],
                v: vec![3.0 * t * t - 1.0],
            })
            .collect();
        Trajectory::new(times, states, TrajectoryMeta::default()).unwrap()
    }

    #[test]
    fn hermite_exact_on_cubics() {
        let traj = cubic_trajectory();
        for &t in &[0.05, 0.333, 1.111, 1.95] {
            let s = traj.state_at(t);
            assert_abs_diff_eq!(s.q[0], t * t * t - t, epsilon = 1e-13);
            assert_abs_diff_eq!(s.v[0], 3.0 * t * t - 1.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn non_increasing_times_rejected() {
        let states = vec![
            State { q: vec![0.0], v: vec![0.0] },
            State { q: vec![1.0], v: vec![0.0] },
        ];
        assert!(Trajectory::new(vec![0.0, 0.0], states, TrajectoryMeta::default()).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let states = vec![
            State { q: vec![0.0], v: vec![0.0] },
            State { q: vec![1.0, 2.0], v: vec![0.0, 0.0] },
        ];
        assert!(Trajectory::new(vec![0.0, 1.0], states, TrajectoryMeta::default()).is_err());
    }

    #[test]
    fn truncation_keeps_prefix() {
        let traj = cubic_trajectory();
        let cut = traj.truncated(0.95);
        assert_eq!(cut.len(), 10);
        assert_abs_diff_eq!(cut.final_time(), 0.9, epsilon = 1e-12);
    }
}
