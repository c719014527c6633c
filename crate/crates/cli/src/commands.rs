//! Command implementations: each returns the rendered output plus the exit
//! status mandated by the contract (0 all-pass, 1 check failure, 2 config
//! error, 3 numerical failure).

use serde_json::json;

use chaplygin_core::chaplygin::{
    gyroscopic_tensor, principal_metric, recover_dphi, recover_phi, RecoverOptions,
};
use chaplygin_core::dynamics::integrate_nonholonomic;
use chaplygin_core::error::Result;
use chaplygin_core::numeric::matrix::DenseMatrix;
use chaplygin_core::numeric::ode::OdeStepper;
use chaplygin_core::verify::{check_distance, run_suite, SuiteConfig};

use crate::config::ValidatedRun;

/// Rendered command output and the exit code to report.
pub struct CommandOutcome {
    pub payload: String,
    pub exit_code: i32,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn matrix_json(m: &DenseMatrix) -> serde_json::Value {
    let rows: Vec<Vec<f64>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect();
    json!(rows)
}

/// Trajectory CSV: header `t,q1..qn,v1..vn`, one sample per line, 17
/// significant digits, LF endings, ASCII.
pub fn cmd_simulate(run: &ValidatedRun) -> Result<CommandOutcome> {
    let cfg = &run.config;
    let traj = integrate_nonholonomic(
        &run.built.system,
        &run.q0,
        &run.v0,
        cfg.t_final,
        OdeStepper::Rk4Fixed { dt: cfg.dt },
    )?;
    let n = traj.dim();
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        out.push_str(&format!(",q{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",v{i}"));
    }
    out.push('\n');
    for (t, s) in traj.iter() {
        out.push_str(&fmt17(t));
        for x in &s.q {
            out.push(',');
            out.push_str(&fmt17(*x));
        }
        for x in &s.v {
            out.push(',');
            out.push_str(&fmt17(*x));
        }
        out.push('\n');
    }
    Ok(CommandOutcome {
        payload: out,
        exit_code: 0,
    })
}

/// Principal-metric matrices at the requested chart points.
pub fn cmd_build_metric(run: &ValidatedRun) -> Result<CommandOutcome> {
    let h = principal_metric(&run.built.system)?;
    let points: Vec<Vec<f64>> = match &run.config.points {
        Some(p) => p.clone(),
        None => {
            let center: Vec<f64> = run
                .built
                .sampling_box
                .iter()
                .map(|(lo, hi)| 0.5 * (lo + hi))
                .collect();
            vec![center]
        }
    };
    let mut entries = Vec::with_capacity(points.len());
    for q in &points {
        let m = h.evaluate(q)?;
        entries.push(json!({ "point": q, "metric": matrix_json(&m) }));
    }
    let mut payload = serde_json::to_string_pretty(&json!({
        "system": run.built.system.id(),
        "coordinates": run.built.coord_names,
        "results": entries,
    }))
    .expect("json");
    payload.push('\n');
    Ok(CommandOutcome {
        payload,
        exit_code: 0,
    })
}

/// Conformal exponent, its differential and the pattern residual on a base
/// grid.
pub fn cmd_recover_phi(run: &ValidatedRun) -> Result<CommandOutcome> {
    let sys = &run.built.system;
    let base_box = run.built.base_box();
    let (nx, ny) = (run.config.grid[0], run.config.grid[1]);
    let basepoint = sys.phi_basepoint().to_vec();
    let opts = RecoverOptions {
        check_closedness: false,
        ..RecoverOptions::default()
    };
    let mut values = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let fx = i as f64 / (nx - 1) as f64;
            let fy = j as f64 / (ny - 1) as f64;
            let p = vec![
                base_box[0].0 + fx * (base_box[0].1 - base_box[0].0),
                base_box[1].0 + fy * (base_box[1].1 - base_box[1].0),
            ];
            let tensor = gyroscopic_tensor(sys, &p)?;
            let est = recover_dphi(&tensor, f64::INFINITY)?;
            let phi = recover_phi(sys, &basepoint, &p, &opts)?;
            values.push(json!({
                "point": p,
                "phi": phi,
                "dphi": est.dphi,
                "residual": est.residual,
            }));
        }
    }
    let mut payload = serde_json::to_string_pretty(&json!({
        "system": sys.id(),
        "basepoint": basepoint,
        "grid": [nx, ny],
        "values": values,
    }))
    .expect("json");
    payload.push('\n');
    Ok(CommandOutcome {
        payload,
        exit_code: 0,
    })
}

/// Full verification report; exit 0 only when every check passes.
pub fn cmd_verify(run: &ValidatedRun) -> Result<CommandOutcome> {
    let cfg = &run.config;
    let suite = SuiteConfig {
        dt: cfg.dt,
        t_trajectory: cfg.t_final,
        t_small: cfg.t_small,
        tolerances: cfg.tolerances.clone(),
        ..SuiteConfig::default()
    };
    let report = run_suite(&run.built, cfg.seed, &suite);
    let exit_code = if report.all_passed { 0 } else { 1 };
    let mut payload = report.to_json();
    payload.push('\n');
    Ok(CommandOutcome {
        payload,
        exit_code,
    })
}

/// Segment length against the boundary-value distance.
pub fn cmd_distance(run: &ValidatedRun) -> Result<CommandOutcome> {
    let cfg = &run.config;
    let sys = &run.built.system;
    let h = principal_metric(sys)?;
    let traj = integrate_nonholonomic(
        sys,
        &run.q0,
        &run.v0,
        cfg.t_small,
        OdeStepper::Rk4Fixed { dt: cfg.dt },
    )?;
    let outcome = check_distance(&h, &traj, cfg.t_small, 1e-8)?;
    let pass = outcome.residual <= cfg.tolerances.distance;
    let mut payload = serde_json::to_string_pretty(&json!({
        "system": sys.id(),
        "t_small": outcome.t_used,
        "length": outcome.length,
        "distance": outcome.distance,
        "residual": outcome.residual,
        "tolerance": cfg.tolerances.distance,
        "newton_iterations": outcome.iterations,
        "endpoint_error": outcome.endpoint_error,
        "pass": pass,
    }))
    .expect("json");
    payload.push('\n');
    Ok(CommandOutcome {
        payload,
        exit_code: if pass { 0 } else { 1 },
    })
}
