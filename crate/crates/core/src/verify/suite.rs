//! The full verification suite: every module-level property evaluated with
//! recorded seeds, tolerances and stepper settings.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chaplygin::{
    canonical_metric, gyroscopic_at_point, phi_simplicity_residual, principal_metric,
    recover_dphi, recover_phi, reduced_metric_at_point, RecoverOptions,
};
use crate::dynamics::{integrate_geodesic, integrate_mechanical};
use crate::error::Result;
use crate::numeric::ode::OdeStepper;
use crate::numeric::norm_inf;
use crate::systems::{analytic_crosschecks, BuiltSystem, Crosschecks, PotentialKind};

use super::checks::{
    check_distance, check_equivalence, check_psi_relatedness, constraint_violation_sup,
    principal_energy, relative_energy_drift,
};
use super::report::{CheckResult, VerificationReport};

/// Effective tolerances, all overridable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub phi_simplicity: f64,
    pub dphi_consistency: f64,
    pub phi_constancy: f64,
    pub closedness: f64,
    pub fiber_invariance: f64,
    pub metric_reproduction: f64,
    pub submersion: f64,
    pub orthogonality: f64,
    pub constraint_preservation: f64,
    pub energy_drift: f64,
    pub horizontality: f64,
    pub base_projection: f64,
    pub equivalence: f64,
    pub psi_relatedness: f64,
    pub distance: f64,
    pub time_map_identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            phi_simplicity: 1e-6,
            dphi_consistency: 1e-7,
            phi_constancy: 1e-5,
            closedness: 1e-5,
            fiber_invariance: 1e-8,
            metric_reproduction: 1e-9,
            submersion: 1e-10,
            orthogonality: 1e-10,
            constraint_preservation: 1e-8,
            energy_drift: 1e-8,
            horizontality: 1e-7,
            base_projection: 1e-6,
            equivalence: 1e-5,
            psi_relatedness: 1e-6,
            distance: 1e-4,
            time_map_identity: 1e-12,
        }
    }
}

/// Suite parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Step of every fixed-step integration in the suite.
    pub dt: f64,
    /// Window of the trajectory-level checks.
    pub t_trajectory: f64,
    /// Window of the local distance comparison.
    pub t_small: f64,
    /// Endpoint tolerance of the distance shooting.
    pub shooting_tolerance: f64,
    /// Pointwise sample count for randomized metric/tensor checks.
    pub sample_points: usize,
    /// Sampled constrained states for the relatedness check.
    pub psi_samples: usize,
    /// Points at which the conformal exponent is rebuilt by line integration.
    pub phi_recovery_points: usize,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_trajectory: 10.0,
            t_small: 0.3,
            shooting_tolerance: 1e-8,
            sample_points: 50,
            psi_samples: 20,
            phi_recovery_points: 12,
            tolerances: Tolerances::default(),
        }
    }
}

fn sample_in(rng: &mut ChaCha8Rng, bounds: &[(f64, f64)]) -> Vec<f64> {
    bounds
        .iter()
        .map(|(lo, hi)| rng.random_range(*lo..*hi))
        .collect()
}

fn sample_components(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn run_check<F>(name: &str, property: &str, tolerance: f64, f: F) -> CheckResult
where
    F: FnOnce() -> Result<(f64, String)>,
{
    match f() {
        Ok((residual, details)) => CheckResult::new(name, property, residual, tolerance, details),
        Err(e) => CheckResult::errored(name, property, tolerance, e.to_string()),
    }
}

/// Run every check against the built system, using its closed-form
/// cross-check table.
pub fn run_suite(built: &BuiltSystem, seed: u64, config: &SuiteConfig) -> VerificationReport {
    run_suite_with(built, Some(&analytic_crosschecks(built)), seed, config)
}

/// Run the suite with an explicit (or absent) cross-check table. Negative
/// controls pass `None` so only the intrinsic detectors fire.
pub fn run_suite_with(
    built: &BuiltSystem,
    crosschecks: Option<&Crosschecks>,
    seed: u64,
    config: &SuiteConfig,
) -> VerificationReport {
    let sys = &built.system;
    let tol = &config.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks: Vec<CheckResult> = Vec::new();

    let base_box = built.base_box();
    let full_box = &built.sampling_box;
    let m = sys.base_dim();
    let n = sys.dim();
    let has_potential = built.potential != PotentialKind::None;

    // Shared expensive objects. If the principal metric cannot be built at
    // all, record that as a failed construction check and stop early.
    let h = match principal_metric(sys) {
        Ok(h) => h,
        Err(e) => {
            checks.push(CheckResult::errored(
                "principal-construction",
                "the principal metric can be constructed",
                0.0,
                e.to_string(),
            ));
            return VerificationReport::assemble(
                sys.id(),
                seed,
                format!("rk4-fixed(dt={})", config.dt),
                config.dt,
                serde_json::to_value(config).expect("config serialization"),
                checks,
            );
        }
    };
    let g_can = canonical_metric(sys).expect("canonical metric after principal succeeded");

    // --- pointwise pattern and recovery checks --------------------------

    let points: Vec<Vec<f64>> = (0..config.sample_points)
        .map(|_| sample_in(&mut rng, &base_box))
        .collect();

    checks.push(run_check(
        "phi-simplicity",
        "gyroscopic coefficients fit the conformal pattern C^c_ab = d_b(phi) delta^c_a - d_a(phi) delta^c_b",
        tol.phi_simplicity,
        || {
            let mut worst = 0.0f64;
            for p in &points {
                worst = worst.max(phi_simplicity_residual(sys, p)?);
            }
            Ok((worst, format!("{} sampled base points", points.len())))
        },
    ));

    if let Some(phi) = sys.analytic_phi() {
        checks.push(run_check(
            "phi-consistency-dphi",
            "the differential recovered from the gyroscopic coefficients matches the closed form",
            tol.dphi_consistency,
            || {
                let mut worst = 0.0f64;
                for p in &points {
                    let est = recover_dphi(&crate::chaplygin::gyroscopic_tensor(sys, p)?, f64::INFINITY)?;
                    let reference = phi.differential(p)?;
                    let diff: Vec<f64> = est
                        .dphi
                        .iter()
                        .zip(&reference)
                        .map(|(a, b)| a - b)
                        .collect();
                    worst = worst.max(norm_inf(&diff));
                }
                Ok((worst, format!("{} sampled base points", points.len())))
            },
        ));

        let phi_clone = phi.clone();
        let recovery_points: Vec<Vec<f64>> = (0..config.phi_recovery_points)
            .map(|_| sample_in(&mut rng, &base_box))
            .collect();
        checks.push(run_check(
            "phi-constancy",
            "the exponent rebuilt by line integration differs from the closed form by a constant",
            tol.phi_constancy,
            || {
                let opts = RecoverOptions {
                    check_closedness: false,
                    ..RecoverOptions::default()
                };
                let basepoint = sys.phi_basepoint().to_vec();
                let mut offsets = Vec::new();
                for p in &recovery_points {
                    let rebuilt = recover_phi(sys, &basepoint, p, &opts)?;
                    offsets.push(rebuilt - phi_clone.evaluate(p)?);
                }
                // Deviation from constancy; the pinned offset itself is
                // reported in the details.
                let max = offsets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let min = offsets.iter().cloned().fold(f64::INFINITY, f64::min);
                let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
                Ok((
                    max - min,
                    format!("mean offset {:.3e} over {} rebuilt values", mean, offsets.len()),
                ))
            },
        ));
    }

    checks.push(run_check(
        "phi-closedness",
        "mixed partials of the recovered differential commute",
        tol.closedness,
        || {
            let mut worst = 0.0f64;
            for p in points.iter().take(3) {
                worst = worst.max(crate::chaplygin::dphi_curl(sys, p, f64::INFINITY)?);
            }
            Ok((worst, "3 sampled base points".into()))
        },
    ));

    checks.push(run_check(
        "fiber-invariance",
        "reduced metric, gyroscopic coefficients and recovered differential do not depend on the fiber representative",
        tol.fiber_invariance,
        || {
            let mut worst = 0.0f64;
            for p in points.iter().take(10) {
                let at_section = sys.section(p);
                let mut other = at_section.clone();
                for (j, (lo, hi)) in full_box.iter().enumerate().skip(m) {
                    other[j] = lo + 0.63 * (hi - lo);
                }
                let g1 = reduced_metric_at_point(sys, &at_section)?;
                let g2 = reduced_metric_at_point(sys, &other)?;
                for (a, b) in g1.data().iter().zip(g2.data()) {
                    worst = worst.max((a - b).abs());
                }
                let c1 = gyroscopic_at_point(sys, &at_section)?;
                let c2 = gyroscopic_at_point(sys, &other)?;
                for c in 0..m {
                    for a in 0..m {
                        for b in 0..m {
                            worst = worst.max((c1.get(c, a, b) - c2.get(c, a, b)).abs());
                        }
                    }
                }
                let d1 = recover_dphi(&c1, f64::INFINITY)?.dphi;
                let d2 = recover_dphi(&c2, f64::INFINITY)?.dphi;
                for (a, b) in d1.iter().zip(&d2) {
                    worst = worst.max((a - b).abs());
                }
            }
            Ok((worst, "10 base points, 2 fiber representatives each".into()))
        },
    ));

    // --- constructed metrics against closed forms ------------------------

    if let Some(cc) = crosschecks {
        if let Some(expected) = &cc.reduced_metric {
            checks.push(run_check(
                "metric-reproduction-reduced",
                "the reduced metric matches its closed form",
                tol.metric_reproduction,
                || {
                    let mut worst = 0.0f64;
                    for p in &points {
                        let got = crate::chaplygin::reduced_metric(sys, p)?;
                        let want = expected(p);
                        for (a, b) in got.data().iter().zip(want.data()) {
                            worst = worst.max((a - b).abs());
                        }
                    }
                    Ok((worst, format!("{} sampled base points", points.len())))
                },
            ));
        }
        if let Some(expected) = &cc.canonical_metric {
            let g_can_ref = &g_can;
            checks.push(run_check(
                "metric-reproduction-canonical",
                "the conformal reduced metric matches its closed form",
                tol.metric_reproduction,
                || {
                    let mut worst = 0.0f64;
                    for p in &points {
                        let got = g_can_ref.evaluate(p)?;
                        let want = expected(p);
                        for (a, b) in got.data().iter().zip(want.data()) {
                            worst = worst.max((a - b).abs());
                        }
                    }
                    Ok((worst, format!("{} sampled base points", points.len())))
                },
            ));
        }
        if let Some(expected) = &cc.principal_metric {
            let h_ref = &h;
            let mut rng_pm = ChaCha8Rng::seed_from_u64(seed ^ 0x5bd1_e995);
            checks.push(run_check(
                "metric-reproduction-principal",
                "the constructed principal metric matches its closed form",
                tol.metric_reproduction,
                || {
                    let mut worst = 0.0f64;
                    for _ in 0..config.sample_points {
                        let q = sample_in(&mut rng_pm, full_box);
                        let got = h_ref.evaluate(&q)?;
                        let want = expected(&q);
                        for (a, b) in got.data().iter().zip(want.data()) {
                            worst = worst.max((a - b).abs());
                        }
                    }
                    Ok((worst, format!("{} sampled chart points", config.sample_points)))
                },
            ));
        }
    }

    // --- submersion structure of the principal metric --------------------

    {
        let h_ref = &h;
        let g_can_ref = &g_can;
        let mut rng_sub = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
        checks.push(run_check(
            "submersion-isometry",
            "on the constraint distribution the principal metric equals the conformal reduced metric through the projection",
            tol.submersion,
            || {
                let mut worst = 0.0f64;
                for _ in 0..config.sample_points {
                    let q = sample_in(&mut rng_sub, full_box);
                    let w1 = sample_components(&mut rng_sub, m);
                    let w2 = sample_components(&mut rng_sub, m);
                    let u1 = crate::chaplygin::horizontal_lift(sys, &q, &w1)?;
                    let u2 = crate::chaplygin::horizontal_lift(sys, &q, &w2)?;
                    let lhs = h_ref.inner(&q, &u1, &u2)?;
                    let rhs = g_can_ref.inner(&sys.project_base(&q), &w1, &w2)?;
                    worst = worst.max((lhs - rhs).abs());
                }
                Ok((worst, format!("{} random constrained pairs", config.sample_points)))
            },
        ));

        let mut rng_orth = ChaCha8Rng::seed_from_u64(seed ^ 0x85eb_ca6b);
        checks.push(run_check(
            "vertical-orthogonality",
            "constrained directions and fiber directions are orthogonal for the principal metric",
            tol.orthogonality,
            || {
                let mut worst = 0.0f64;
                for _ in 0..config.sample_points {
                    let q = sample_in(&mut rng_orth, full_box);
                    let w = sample_components(&mut rng_orth, m);
                    let u = crate::chaplygin::horizontal_lift(sys, &q, &w)?;
                    let mut z = vec![0.0; n];
                    let fiber = sample_components(&mut rng_orth, n - m);
                    z[m..].copy_from_slice(&fiber);
                    worst = worst.max(h_ref.inner(&q, &u, &z)?.abs());
                }
                Ok((worst, format!("{} random pairs", config.sample_points)))
            },
        ));
    }

    // --- trajectory-level checks -----------------------------------------

    let (q0, v0) = built.default_initial.clone();
    let stepper = OdeStepper::Rk4Fixed { dt: config.dt };

    let equivalence = check_equivalence(sys, &h, &q0, &v0, config.t_trajectory, config.dt);
    match &equivalence {
        Ok(out) => {
            checks.push(CheckResult::new(
                "equivalence",
                "the principal-side trajectory reparametrized by the predicted time map coincides with the constrained trajectory",
                out.residual,
                tol.equivalence,
                format!(
                    "window {}, arclength-matched image residual {:.3e}",
                    config.t_trajectory, out.arclength_residual
                ),
            ));

            checks.push(run_check(
                "constraint-preservation",
                "integrated constrained trajectories satisfy the constraints at every sample",
                tol.constraint_preservation,
                || {
                    let sup = constraint_violation_sup(sys, &out.nonholonomic)?;
                    Ok((sup, format!("window {}", config.t_trajectory)))
                },
            ));

            checks.push(run_check(
                "energy-conservation-nonholonomic",
                "energy is constant along constrained trajectories",
                tol.energy_drift,
                || {
                    let drift =
                        relative_energy_drift(&out.nonholonomic, |q, v| sys.energy(q, v))?;
                    Ok((drift, format!("window {}", config.t_trajectory)))
                },
            ));

            let h_ref = &h;
            checks.push(run_check(
                "energy-conservation-principal",
                "energy is constant along principal-side trajectories",
                tol.energy_drift,
                || {
                    let pot = sys.potential().cloned();
                    let drift = relative_energy_drift(&out.principal, |q, v| {
                        principal_energy(h_ref, pot.as_ref(), m, q, v)
                    })?;
                    Ok((drift, format!("window {:.6}", out.time_map.final_tau())))
                },
            ));

            checks.push(run_check(
                "horizontality-persistence",
                "principal-side trajectories with constrained initial velocity stay constrained",
                tol.horizontality,
                || {
                    let sup = constraint_violation_sup(sys, &out.principal)?;
                    Ok((sup, format!("window {:.6}", out.time_map.final_tau())))
                },
            ));

            // Projected principal-side trajectory against direct reduced
            // integration on the same parameter grid.
            let g_can_ref = &g_can;
            checks.push(run_check(
                "base-projection",
                "the projected principal-side trajectory solves the reduced conformal dynamics",
                tol.base_projection,
                || {
                    let tau_final = out.time_map.final_tau();
                    let u0 = out.principal.first_state();
                    let base_q0 = sys.project_base(&u0.q);
                    let base_v0 = u0.v[..m].to_vec();
                    let reduced = match sys.potential() {
                        Some(pot) => integrate_mechanical(
                            g_can_ref, pot, &base_q0, &base_v0, tau_final, stepper,
                        )?,
                        None => integrate_geodesic(
                            g_can_ref, &base_q0, &base_v0, tau_final, stepper,
                        )?,
                    };
                    let mut worst = 0.0f64;
                    for (k, (_, s)) in reduced.iter().enumerate() {
                        let (_, total) = out.principal.sample(k);
                        for i in 0..m {
                            worst = worst.max((total.q[i] - s.q[i]).abs());
                        }
                    }
                    Ok((worst, format!("{} shared samples", reduced.len())))
                },
            ));

            // Identity of the time map when the exponent vanishes.
            let phi_is_zero = sys
                .analytic_phi()
                .map(|phi| {
                    points
                        .iter()
                        .take(5)
                        .all(|p| phi.evaluate(p).map(|v| v == 0.0).unwrap_or(false))
                })
                .unwrap_or(false);
            if phi_is_zero {
                let mut worst = 0.0f64;
                for (k, t) in out.time_map.times().iter().enumerate() {
                    worst = worst.max((out.time_map.tau_values()[k] - t).abs());
                }
                checks.push(CheckResult::new(
                    "time-map-identity",
                    "with vanishing exponent the predicted time map is the identity",
                    worst,
                    tol.time_map_identity,
                    format!("{} samples", out.time_map.times().len()),
                ));
            }

            if !has_potential {
                let h_ref = &h;
                checks.push(run_check(
                    "distance-local",
                    "the length of a short initial trajectory segment equals the boundary-value distance of its endpoints",
                    tol.distance,
                    || {
                        let outcome = check_distance(
                            h_ref,
                            &out.nonholonomic,
                            config.t_small,
                            config.shooting_tolerance,
                        )?;
                        Ok((
                            outcome.residual,
                            format!(
                                "window {:.3}, length {:.9}, distance {:.9}, {} Newton iterations, endpoint error {:.2e}",
                                outcome.t_used,
                                outcome.length,
                                outcome.distance,
                                outcome.iterations,
                                outcome.endpoint_error
                            ),
                        ))
                    },
                ));
            }
        }
        Err(e) => {
            checks.push(CheckResult::errored(
                "equivalence",
                "the principal-side trajectory reparametrized by the predicted time map coincides with the constrained trajectory",
                tol.equivalence,
                e.to_string(),
            ));
        }
    }

    // --- relatedness of the rescaled fields --------------------------------

    {
        let h_ref = &h;
        let mut rng_psi = ChaCha8Rng::seed_from_u64(seed ^ 0xc2b2_ae35);
        checks.push(run_check(
            "psi-relatedness",
            "the fiberwise velocity rescaling intertwines the rescaled constrained field with the principal-side field",
            tol.psi_relatedness,
            || {
                let mut states = Vec::with_capacity(config.psi_samples);
                for _ in 0..config.psi_samples {
                    let q = sample_in(&mut rng_psi, full_box);
                    let w = sample_components(&mut rng_psi, m);
                    let v = crate::chaplygin::horizontal_lift(sys, &q, &w)?;
                    states.push((q, v));
                }
                let residual = check_psi_relatedness(sys, h_ref, &states, 1e-3)?;
                Ok((residual, format!("{} sampled constrained states", states.len())))
            },
        ));
    }

    VerificationReport::assemble(
        sys.id(),
        seed,
        stepper.label(),
        config.dt,
        serde_json::to_value(config).expect("config serialization"),
        checks,
    )
}
