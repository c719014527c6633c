//! Python bindings: the built-in systems, the principal-metric construction,
//! trajectory integration and the verification suite.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use chaplygin_core::chaplygin::{
    canonical_metric, gyroscopic_tensor, horizontal_lift, principal_metric, recover_dphi,
    recover_phi, reduced_metric, RecoverOptions,
};
use chaplygin_core::dynamics::{
    integrate_geodesic, integrate_mechanical, integrate_nonholonomic, Trajectory,
};
use chaplygin_core::geometry::MetricField;
use chaplygin_core::numeric::matrix::DenseMatrix;
use chaplygin_core::numeric::ode::OdeStepper;
use chaplygin_core::systems::{
    build, BuiltSystem, PotentialKind, SystemDescriptor, SystemName,
};
use chaplygin_core::verify::{check_equivalence, run_suite, SuiteConfig};

fn err(e: chaplygin_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn trajectory_tuple(traj: &Trajectory) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let times = traj.times().to_vec();
    let qs = traj.states().iter().map(|s| s.q.clone()).collect();
    let vs = traj.states().iter().map(|s| s.v.clone()).collect();
    (times, qs, vs)
}

/// One of the built-in constrained systems with its constructed metrics.
#[pyclass]
struct System {
    built: BuiltSystem,
    principal: MetricField,
}

#[pymethods]
impl System {
    /// System("vertical-disk" | "nonholonomic-particle" | "veselova",
    ///        params=dict, potential="none" | "quadratic-y")
    #[new]
    #[pyo3(signature = (name, params=None, potential=None))]
    fn new(
        name: &str,
        params: Option<BTreeMap<String, f64>>,
        potential: Option<&str>,
    ) -> PyResult<Self> {
        let mut descriptor = SystemDescriptor::new(SystemName::parse(name).map_err(err)?);
        for (k, v) in params.unwrap_or_default() {
            descriptor = descriptor.with_param(&k, v);
        }
        descriptor = match potential.unwrap_or("none") {
            "none" => descriptor.with_potential(PotentialKind::None),
            "quadratic-y" => descriptor.with_potential(PotentialKind::QuadraticY),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown potential '{other}'"
                )))
            }
        };
        let built = build(&descriptor).map_err(err)?;
        let principal = principal_metric(&built.system).map_err(err)?;
        Ok(Self { built, principal })
    }

    fn dim(&self) -> usize {
        self.built.dim()
    }

    fn base_dim(&self) -> usize {
        self.built.base_dim()
    }

    fn coordinate_names(&self) -> Vec<String> {
        self.built.coord_names.iter().map(|s| s.to_string()).collect()
    }

    /// A constraint-compatible initial state with generic behavior.
    fn default_initial(&self) -> (Vec<f64>, Vec<f64>) {
        self.built.default_initial.clone()
    }

    /// Principal metric matrix at a chart point.
    fn principal_metric(&self, point: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(matrix_rows(&self.principal.evaluate(&point).map_err(err)?))
    }

    /// Reduced metric matrix at a base point.
    fn reduced_metric(&self, base: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(matrix_rows(
            &reduced_metric(&self.built.system, &base).map_err(err)?,
        ))
    }

    /// Conformally rescaled reduced metric at a base point.
    fn canonical_metric(&self, base: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let g = canonical_metric(&self.built.system).map_err(err)?;
        Ok(matrix_rows(&g.evaluate(&base).map_err(err)?))
    }

    /// Gyroscopic coefficients `C[c][a][b]` at a base point.
    fn gyroscopic(&self, base: Vec<f64>) -> PyResult<Vec<Vec<Vec<f64>>>> {
        let field = gyroscopic_tensor(&self.built.system, &base).map_err(err)?;
        let m = field.base_dim();
        Ok((0..m)
            .map(|c| {
                (0..m)
                    .map(|a| (0..m).map(|b| field.get(c, a, b)).collect())
                    .collect()
            })
            .collect())
    }

    /// Differential of the conformal exponent and the pattern residual.
    fn recover_dphi(&self, base: Vec<f64>) -> PyResult<(Vec<f64>, f64)> {
        let field = gyroscopic_tensor(&self.built.system, &base).map_err(err)?;
        let est = recover_dphi(&field, f64::INFINITY).map_err(err)?;
        Ok((est.dphi, est.residual))
    }

    /// Conformal exponent rebuilt by line integration from the system's
    /// pinned basepoint.
    fn recover_phi(&self, base: Vec<f64>) -> PyResult<f64> {
        let opts = RecoverOptions {
            check_closedness: false,
            ..RecoverOptions::default()
        };
        let basepoint = self.built.system.phi_basepoint().to_vec();
        recover_phi(&self.built.system, &basepoint, &base, &opts).map_err(err)
    }

    /// Closed-form conformal exponent, when the system has one.
    fn analytic_phi(&self, base: Vec<f64>) -> PyResult<Option<f64>> {
        match self.built.system.analytic_phi() {
            Some(phi) => Ok(Some(phi.evaluate(&base).map_err(err)?)),
            None => Ok(None),
        }
    }

    /// The unique constraint-compatible vector over a base vector.
    fn horizontal_lift(&self, point: Vec<f64>, base_vector: Vec<f64>) -> PyResult<Vec<f64>> {
        horizontal_lift(&self.built.system, &point, &base_vector).map_err(err)
    }

    /// Integrate the constrained dynamics; returns (times, positions,
    /// velocities).
    #[pyo3(signature = (q0, v0, t_final, dt=1e-3))]
    fn simulate(
        &self,
        q0: Vec<f64>,
        v0: Vec<f64>,
        t_final: f64,
        dt: f64,
    ) -> PyResult<(Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let traj = integrate_nonholonomic(
            &self.built.system,
            &q0,
            &v0,
            t_final,
            OdeStepper::Rk4Fixed { dt },
        )
        .map_err(err)?;
        Ok(trajectory_tuple(&traj))
    }

    /// Integrate the principal-side flow (geodesic, or mechanical when the
    /// system carries a potential).
    #[pyo3(signature = (q0, v0, t_final, dt=1e-3))]
    fn principal_flow(
        &self,
        q0: Vec<f64>,
        v0: Vec<f64>,
        t_final: f64,
        dt: f64,
    ) -> PyResult<(Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let stepper = OdeStepper::Rk4Fixed { dt };
        let traj = match self.built.system.potential_on_total() {
            Some(pot) => integrate_mechanical(&self.principal, &pot, &q0, &v0, t_final, stepper),
            None => integrate_geodesic(&self.principal, &q0, &v0, t_final, stepper),
        }
        .map_err(err)?;
        Ok(trajectory_tuple(&traj))
    }

    /// Supremum of |gamma(tau(t)) - c(t)| between the constrained trajectory
    /// and the reparametrized principal-side trajectory.
    #[pyo3(signature = (q0, v0, t_final, dt=1e-3))]
    fn equivalence_residual(
        &self,
        q0: Vec<f64>,
        v0: Vec<f64>,
        t_final: f64,
        dt: f64,
    ) -> PyResult<f64> {
        let out = check_equivalence(&self.built.system, &self.principal, &q0, &v0, t_final, dt)
            .map_err(err)?;
        Ok(out.residual)
    }

    /// Run the verification suite; returns the report as a JSON string.
    #[pyo3(signature = (seed=0, t_trajectory=10.0))]
    fn verify(&self, seed: u64, t_trajectory: f64) -> String {
        let config = SuiteConfig {
            t_trajectory,
            ..SuiteConfig::default()
        };
        run_suite(&self.built, seed, &config).to_json()
    }

    fn __repr__(&self) -> String {
        format!("System('{}')", self.built.system.id())
    }
}

/// Names accepted by `System`.
#[pyfunction]
fn system_names() -> Vec<&'static str> {
    vec!["vertical-disk", "nonholonomic-particle", "veselova"]
}

#[pymodule]
fn chaplygin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(system_names, m)?)?;
    Ok(())
}
