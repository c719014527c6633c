//! Oracle tests: every constructed object is compared against closed forms
//! and hand-derived dynamics equations that never touch the construction
//! code.

use approx::assert_abs_diff_eq;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use chaplygin_core::chaplygin::{
    canonical_metric, gyroscopic_tensor, horizontal_lift, principal_metric, recover_dphi,
    recover_phi, reduced_metric, RecoverOptions,
};
use chaplygin_core::dynamics::{
    integrate_geodesic, integrate_nonholonomic, lda_rhs, time_map,
};
use chaplygin_core::geometry::{christoffel, geodesic_rhs, mechanical_rhs, ScalarField};
use chaplygin_core::numeric::ode::OdeStepper;
use chaplygin_core::systems::{
    analytic_crosschecks, build, veselova_a_diag, veselova_gamma_point, PotentialKind,
    SystemDescriptor, SystemName,
};

fn disk(params: &[(&str, f64)]) -> chaplygin_core::systems::BuiltSystem {
    let mut d = SystemDescriptor::new(SystemName::VerticalDisk);
    for (k, v) in params {
        d = d.with_param(k, *v);
    }
    build(&d).expect("disk build")
}

fn particle() -> chaplygin_core::systems::BuiltSystem {
    build(&SystemDescriptor::new(SystemName::NonholonomicParticle)).expect("particle build")
}

fn veselova(inertia: [f64; 3]) -> chaplygin_core::systems::BuiltSystem {
    let d = SystemDescriptor::new(SystemName::Veselova)
        .with_param("I1", inertia[0])
        .with_param("I2", inertia[1])
        .with_param("I3", inertia[2]);
    build(&d).expect("veselova build")
}

// ---------------------------------------------------------------------------
// Horizontal lifts
// ---------------------------------------------------------------------------

#[test]
fn disk_lift_of_spin_direction() {
    // At phi = pi/2 the lift of the spin coordinate field is
    // d/dtheta + R d/dy (chart order theta, phi, x, y).
    let built = disk(&[]);
    let q = [0.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0];
    let lift = horizontal_lift(&built.system, &q, &[1.0, 0.0]).unwrap();
    assert_abs_diff_eq!(lift[0], 1.0);
    assert_abs_diff_eq!(lift[1], 0.0);
    assert_abs_diff_eq!(lift[2], 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(lift[3], 1.0, epsilon = 1e-15);
}

#[test]
fn particle_lift_slants_with_height() {
    // Constraint zd = y xd: the lift of d/dx at y = 2 is d/dx + 2 d/dz.
    let built = particle();
    let lift = horizontal_lift(&built.system, &[0.0, 2.0, 0.0], &[1.0, 0.0]).unwrap();
    assert_eq!(lift, vec![1.0, 0.0, 2.0]);
}

#[test]
fn lift_is_linear_and_zero_maps_to_zero() {
    let built = disk(&[("R", 0.7)]);
    let q = [0.3, -0.9, 0.1, 0.2];
    let zero = horizontal_lift(&built.system, &q, &[0.0, 0.0]).unwrap();
    assert!(zero.iter().all(|x| x.abs() < 1e-15));
    let a = horizontal_lift(&built.system, &q, &[1.0, 0.0]).unwrap();
    let b = horizontal_lift(&built.system, &q, &[0.0, 1.0]).unwrap();
    let ab = horizontal_lift(&built.system, &q, &[2.0, -3.0]).unwrap();
    for i in 0..4 {
        assert_abs_diff_eq!(ab[i], 2.0 * a[i] - 3.0 * b[i], epsilon = 1e-13);
    }
}

// ---------------------------------------------------------------------------
// Reduced metrics
// ---------------------------------------------------------------------------

#[test]
fn disk_reduced_metric_is_diagonal() {
    let (m, r, i, j) = (1.4, 0.8, 1.2, 0.6);
    let built = disk(&[("m", m), ("R", r), ("I", i), ("J", j)]);
    let g = reduced_metric(&built.system, &[0.4, -1.1]).unwrap();
    assert_abs_diff_eq!(g.get(0, 0), i + m * r * r, epsilon = 1e-13);
    assert_abs_diff_eq!(g.get(1, 1), j, epsilon = 1e-13);
    assert_abs_diff_eq!(g.get(0, 1), 0.0, epsilon = 1e-13);
}

#[test]
fn particle_reduced_metric() {
    let built = particle();
    for y in [-1.0, 0.0, 0.5, 2.0] {
        let g = reduced_metric(&built.system, &[0.3, y]).unwrap();
        assert_abs_diff_eq!(g.get(0, 0), 1.0 + y * y, epsilon = 1e-13);
        assert_abs_diff_eq!(g.get(1, 1), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(g.get(0, 1), 0.0, epsilon = 1e-13);
    }
}

#[test]
fn veselova_reduced_metric_matches_body_frame_formula() {
    let built = veselova([1.0, 2.0, 3.0]);
    let cc = analytic_crosschecks(&built);
    let expected = cc.reduced_metric.unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..30 {
        let p = [rng.random_range(0.5..2.6), rng.random_range(-3.0..3.0)];
        let got = reduced_metric(&built.system, &p).unwrap();
        let want = expected(&p);
        for a in 0..2 {
            for b in 0..2 {
                assert_abs_diff_eq!(got.get(a, b), want.get(a, b), epsilon = 1e-12);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Gyroscopic tensor and recovery of the exponent
// ---------------------------------------------------------------------------

#[test]
fn disk_gyroscopic_tensor_vanishes() {
    let built = disk(&[]);
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..10 {
        let p = [
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        ];
        let c = gyroscopic_tensor(&built.system, &p).unwrap();
        assert!(c.max_abs() < 1e-11, "coefficients {:.3e}", c.max_abs());
    }
}

#[test]
fn particle_gyroscopic_coefficients() {
    // Hand bracket: [d/dx + y d/dz, d/dy] = -d/dz; Euclidean projection onto
    // the distribution gives -y/(1+y^2) (d/dx + y d/dz), so
    // C^1_12 = -y/(1+y^2) and C^2_12 = 0.
    let built = particle();
    for y in [-1.5, -0.3, 1.0, 2.0] {
        let c = gyroscopic_tensor(&built.system, &[0.2, y]).unwrap();
        let expected = -y / (1.0 + y * y);
        assert_abs_diff_eq!(c.get(0, 0, 1), expected, epsilon = 1e-10);
        assert_abs_diff_eq!(c.get(1, 0, 1), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c.get(0, 1, 0), -expected, epsilon = 1e-10);
    }
    let c1 = gyroscopic_tensor(&built.system, &[0.2, 1.0]).unwrap();
    assert_abs_diff_eq!(c1.get(0, 0, 1), -0.5, epsilon = 1e-10);
}

#[test]
fn particle_dphi_recovery() {
    let built = particle();
    let c = gyroscopic_tensor(&built.system, &[0.0, 1.0]).unwrap();
    let est = recover_dphi(&c, 1e-6).unwrap();
    assert_abs_diff_eq!(est.dphi[0], 0.0, epsilon = 1e-8);
    assert_abs_diff_eq!(est.dphi[1], -0.5, epsilon = 1e-8);
    assert!(est.residual <= 1e-8);
}

#[test]
fn disk_dphi_recovery_is_zero() {
    let built = disk(&[]);
    let c = gyroscopic_tensor(&built.system, &[1.0, -0.4]).unwrap();
    let est = recover_dphi(&c, 1e-6).unwrap();
    assert!(est.dphi.iter().all(|x| x.abs() < 1e-11));
    assert!(est.residual < 1e-11);
}

#[test]
fn veselova_dphi_matches_chain_rule() {
    let built = veselova([1.0, 2.0, 3.0]);
    let cc = analytic_crosschecks(&built);
    let dphi_closed = cc.dphi.unwrap();
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..20 {
        let p = [rng.random_range(0.5..2.6), rng.random_range(-3.0..3.0)];
        let c = gyroscopic_tensor(&built.system, &p).unwrap();
        let est = recover_dphi(&c, 1e-6).unwrap();
        let want = dphi_closed(&p);
        assert_abs_diff_eq!(est.dphi[0], want[0], epsilon = 1e-7);
        assert_abs_diff_eq!(est.dphi[1], want[1], epsilon = 1e-7);
        assert!(est.residual <= 1e-6);
    }
}

#[test]
fn isotropic_veselova_has_constant_exponent() {
    // Equal inertia makes (A gamma, gamma) = |gamma|^2 = 1 on the sphere.
    let built = veselova([1.0, 1.0, 1.0]);
    let a = veselova_a_diag(&[1.0, 1.0, 1.0]);
    assert_eq!(a, [1.0, 1.0, 1.0]);
    let c = gyroscopic_tensor(&built.system, &[1.2, 0.7]).unwrap();
    assert!(c.max_abs() < 1e-11);
    let g = veselova_gamma_point(&[1.2, 0.7]);
    let norm: f64 = g.iter().map(|x| x * x).sum();
    assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-14);
}

#[test]
fn particle_phi_rebuilt_by_line_integration() {
    let built = particle();
    let opts = RecoverOptions::default();
    // Straight segment from the origin to (0, 1): closed form -ln(2)/2.
    let phi = recover_phi(&built.system, &[0.0, 0.0], &[0.0, 1.0], &opts).unwrap();
    assert_abs_diff_eq!(phi, -0.5 * 2.0f64.ln(), epsilon = 1e-6);
    // Degenerate segment pins to the closed form at the basepoint.
    let at_base = recover_phi(&built.system, &[0.0, 1.0], &[0.0, 1.0], &opts).unwrap();
    assert_abs_diff_eq!(at_base, -0.5 * 2.0f64.ln(), epsilon = 1e-14);
}

#[test]
fn disk_phi_rebuilt_is_zero() {
    let built = disk(&[]);
    let opts = RecoverOptions::default();
    let phi = recover_phi(&built.system, &[0.0, 0.0], &[1.0, -0.8], &opts).unwrap();
    assert_abs_diff_eq!(phi, 0.0, epsilon = 1e-9);
}

// ---------------------------------------------------------------------------
// Canonical and principal metrics
// ---------------------------------------------------------------------------

#[test]
fn particle_canonical_metric() {
    let built = particle();
    let g_can = canonical_metric(&built.system).unwrap();
    for y in [-2.0, 0.0, 1.0, 1.7] {
        let g = g_can.evaluate(&[0.4, y]).unwrap();
        assert_abs_diff_eq!(g.get(0, 0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.get(1, 1), 1.0 / (1.0 + y * y), epsilon = 1e-12);
        assert_abs_diff_eq!(g.get(0, 1), 0.0, epsilon = 1e-13);
    }
}

#[test]
fn disk_canonical_equals_reduced() {
    let built = disk(&[("m", 1.2), ("R", 0.9)]);
    let g_can = canonical_metric(&built.system).unwrap();
    let g = g_can.evaluate(&[0.7, 0.2]).unwrap();
    let reduced = reduced_metric(&built.system, &[0.7, 0.2]).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert_abs_diff_eq!(g.get(a, b), reduced.get(a, b), epsilon = 1e-13);
        }
    }
}

#[test]
fn disk_principal_metric_entries_at_zero_steering() {
    // Chart order (theta, phi, x, y) with phi = 0:
    // H_thth = I + 2 m R^2, H_phph = J, H_xx = H_yy = m,
    // H_thx = -m R, everything else zero.
    let (m, r, i, j) = (1.0, 1.0, 1.0, 1.0);
    let built = disk(&[]);
    let h = principal_metric(&built.system).unwrap();
    let hm = h.evaluate(&[0.4, 0.0, 0.3, -0.2]).unwrap();
    assert_abs_diff_eq!(hm.get(0, 0), i + 2.0 * m * r * r, epsilon = 1e-12);
    assert_abs_diff_eq!(hm.get(1, 1), j, epsilon = 1e-12);
    assert_abs_diff_eq!(hm.get(2, 2), m, epsilon = 1e-12);
    assert_abs_diff_eq!(hm.get(3, 3), m, epsilon = 1e-12);
    assert_abs_diff_eq!(hm.get(0, 2), -m * r, epsilon = 1e-12);
    assert_abs_diff_eq!(hm.get(0, 3), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(hm.get(0, 1), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(hm.get(1, 2), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(hm.get(1, 3), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(hm.get(2, 3), 0.0, epsilon = 1e-12);
}

#[test]
fn disk_principal_metric_cross_entry_at_one_third_turn() {
    // H_thx = -m R cos(phi) = -m R / 2 at phi = pi/3.
    let built = disk(&[("m", 1.3), ("R", 0.8)]);
    let h = principal_metric(&built.system).unwrap();
    let hm = h
        .evaluate(&[0.0, std::f64::consts::FRAC_PI_3, 0.0, 0.0])
        .unwrap();
    assert_abs_diff_eq!(hm.get(0, 2), -1.3 * 0.8 / 2.0, epsilon = 1e-12);
}

#[test]
fn particle_principal_metric_matrix() {
    // At y = 1: [[2, 0, -1], [0, 1/2, 0], [-1, 0, 1]]; at y = 2:
    // [[5, 0, -2], [0, 1/5, 0], [-2, 0, 1]].
    let built = particle();
    let h = principal_metric(&built.system).unwrap();
    let h1 = h.evaluate(&[0.3, 1.0, -0.4]).unwrap();
    let expect1 = [[2.0, 0.0, -1.0], [0.0, 0.5, 0.0], [-1.0, 0.0, 1.0]];
    for a in 0..3 {
        for b in 0..3 {
            assert_abs_diff_eq!(h1.get(a, b), expect1[a][b], epsilon = 1e-12);
        }
    }
    let h2 = h.evaluate(&[0.0, 2.0, 0.0]).unwrap();
    let expect2 = [[5.0, 0.0, -2.0], [0.0, 0.2, 0.0], [-2.0, 0.0, 1.0]];
    for a in 0..3 {
        for b in 0..3 {
            assert_abs_diff_eq!(h2.get(a, b), expect2[a][b], epsilon = 1e-12);
        }
    }
}

#[test]
fn principal_metric_is_positive_definite_at_random_points() {
    let built = veselova([1.0, 2.0, 3.0]);
    let h = principal_metric(&built.system).unwrap();
    let mut rng = StdRng::seed_from_u64(77);
    for _ in 0..100 {
        let q = [
            rng.random_range(0.5..2.6),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        ];
        let hm = h.evaluate(&q).unwrap();
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().all(|x| x.abs() < 1e-12) {
            continue;
        }
        assert!(hm.bilinear(&v, &v) > 0.0);
    }
}

// ---------------------------------------------------------------------------
// Dynamics against the printed equations of motion
// ---------------------------------------------------------------------------

/// Full geodesic system of the particle's principal metric:
/// xdd = -y xd yd + yd zd
/// ydd = ((1+y^2)^2 y xd^2 - (1+y^2)^2 xd zd + y yd^2) / (1+y^2)
/// zdd = -y^2 xd yd + xd yd + y yd zd
fn particle_h_acceleration(q: &[f64], v: &[f64]) -> [f64; 3] {
    let y = q[1];
    let (xd, yd, zd) = (v[0], v[1], v[2]);
    let w = 1.0 + y * y;
    [
        -y * xd * yd + yd * zd,
        (w * w * y * xd * xd - w * w * xd * zd + y * yd * yd) / w,
        -y * y * xd * yd + xd * yd + y * yd * zd,
    ]
}

/// Full geodesic system of the disk's principal metric, in chart order
/// (theta, phi, x, y).
fn disk_h_acceleration(params: (f64, f64, f64, f64), q: &[f64], v: &[f64]) -> [f64; 4] {
    let (m, r, i, j) = params;
    let phi = q[1];
    let (thd, phd, xd, yd) = (v[0], v[1], v[2], v[3]);
    let k = m * r * r / (i + m * r * r);
    let (s, c) = (phi.sin(), phi.cos());
    let s2 = (2.0 * phi).sin();
    let xdd = -0.5 * k * s2 * xd * phd + k * c * c * yd * phd - r * s * thd * phd;
    let ydd = -k * s * s * xd * phd + 0.5 * k * s2 * yd * phd + r * c * thd * phd;
    let thdd = (m * r / (i + m * r * r)) * (-s * xd * phd + c * yd * phd);
    let phdd = (m * r / j) * (s * xd * thd - c * yd * thd);
    [thdd, phdd, xdd, ydd]
}

#[test]
fn particle_principal_geodesic_equations_at_random_states() {
    let built = particle();
    let h = principal_metric(&built.system).unwrap();
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..25 {
        let q = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.0..1.0),
        ];
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let (_, acc) = geodesic_rhs(&h, &q, &v).unwrap();
        let want = particle_h_acceleration(&q, &v);
        for k in 0..3 {
            assert_abs_diff_eq!(acc[k], want[k], epsilon = 1e-9);
        }
    }
}

#[test]
fn particle_principal_geodesic_christoffels() {
    // Coefficients of the xdd equation: Gamma^x_xy = y/2, Gamma^x_yz = -1/2.
    let built = particle();
    let h = principal_metric(&built.system).unwrap();
    let gamma = christoffel(&h, &[0.0, 1.0, 0.0]).unwrap();
    assert_abs_diff_eq!(gamma.get(0, 0, 1), 0.5, epsilon = 1e-10);
    assert_abs_diff_eq!(gamma.get(0, 1, 2), -0.5, epsilon = 1e-10);
}

#[test]
fn particle_principal_initial_acceleration_off_distribution() {
    // Full system at y = 0 with velocity (1, 1, 1): (1, -1, 1).
    let built = particle();
    let h = principal_metric(&built.system).unwrap();
    let (_, acc) = geodesic_rhs(&h, &[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
    assert_abs_diff_eq!(acc[0], 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(acc[1], -1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(acc[2], 1.0, epsilon = 1e-10);
}

#[test]
fn disk_principal_geodesic_equations_at_random_states() {
    let params = (1.3, 0.8, 1.1, 0.7);
    let built = disk(&[("m", params.0), ("R", params.1), ("I", params.2), ("J", params.3)]);
    let h = principal_metric(&built.system).unwrap();
    let mut rng = StdRng::seed_from_u64(101);
    for _ in 0..25 {
        let q = [
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let (_, acc) = geodesic_rhs(&h, &q, &v).unwrap();
        let want = disk_h_acceleration(params, &q, &v);
        for k in 0..4 {
            assert_abs_diff_eq!(acc[k], want[k], epsilon = 1e-8);
        }
    }
}

#[test]
fn disk_constrained_geodesic_acceleration() {
    // Velocity in the distribution at phi = 0 with thd = phd = 1:
    // (thdd, phdd, xdd, ydd) = (0, 0, 0, R).
    let r = 1.0;
    let built = disk(&[]);
    let h = principal_metric(&built.system).unwrap();
    let q = [0.2, 0.0, 0.0, 0.0];
    let v = horizontal_lift(&built.system, &q, &[1.0, 1.0]).unwrap();
    let (_, acc) = geodesic_rhs(&h, &q, &v).unwrap();
    assert_abs_diff_eq!(acc[0], 0.0, epsilon = 1e-10);
    assert_abs_diff_eq!(acc[1], 0.0, epsilon = 1e-10);
    assert_abs_diff_eq!(acc[2], 0.0, epsilon = 1e-10);
    assert_abs_diff_eq!(acc[3], r, epsilon = 1e-10);
}

#[test]
fn particle_multiplier_solve() {
    // At y = 1 with qd = (1, 1, 1) the constraint zd = y xd holds;
    // the printed constrained equations give qdd = (-1/2, 0, 1/2) and the
    // flat-metric force balance fixes the single multiplier at 1/2.
    let built = particle();
    let out = lda_rhs(&built.system, &[0.0, 1.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
    assert_abs_diff_eq!(out.acceleration[0], -0.5, epsilon = 1e-10);
    assert_abs_diff_eq!(out.acceleration[1], 0.0, epsilon = 1e-10);
    assert_abs_diff_eq!(out.acceleration[2], 0.5, epsilon = 1e-10);
    assert_eq!(out.multipliers.len(), 1);
    assert_abs_diff_eq!(out.multipliers[0], 0.5, epsilon = 1e-10);
}

#[test]
fn particle_constrained_equations_at_random_states() {
    // xdd = -y xd yd / (1+y^2), ydd = 0, zdd = xd yd / (1+y^2).
    let built = particle();
    let mut rng = StdRng::seed_from_u64(321);
    for _ in 0..25 {
        let q = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.0..1.0),
        ];
        let base_v = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let v = horizontal_lift(&built.system, &q, &base_v).unwrap();
        let out = lda_rhs(&built.system, &q, &v).unwrap();
        let w = 1.0 + q[1] * q[1];
        assert_abs_diff_eq!(out.acceleration[0], -q[1] * v[0] * v[1] / w, epsilon = 1e-9);
        assert_abs_diff_eq!(out.acceleration[1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(out.acceleration[2], v[0] * v[1] / w, epsilon = 1e-9);
    }
}

#[test]
fn disk_multiplier_solve() {
    // R = 1 at phi = 0 with thd = phd = 1, xd = 1, yd = 0 (constrained):
    // chart-order acceleration (0, 0, 0, 1).
    let built = disk(&[]);
    let out = lda_rhs(
        &built.system,
        &[0.5, 0.0, 0.0, 0.0],
        &[1.0, 1.0, 1.0, 0.0],
    )
    .unwrap();
    assert_abs_diff_eq!(out.acceleration[0], 0.0, epsilon = 1e-10);
    assert_abs_diff_eq!(out.acceleration[1], 0.0, epsilon = 1e-10);
    assert_abs_diff_eq!(out.acceleration[2], 0.0, epsilon = 1e-10);
    assert_abs_diff_eq!(out.acceleration[3], 1.0, epsilon = 1e-10);
}

#[test]
fn unconstrained_flat_system_is_free() {
    use chaplygin_core::chaplygin::BundleSystem;
    use chaplygin_core::geometry::{MetricField, SmoothMatrix};
    use chaplygin_core::numeric::dual::Scalar;
    struct Flat;
    impl SmoothMatrix for Flat {
        fn dim(&self) -> usize {
            2
        }
        fn entries<S: Scalar>(&self, _q: &[S]) -> Vec<S> {
            vec![S::one(), S::zero(), S::zero(), S::one()]
        }
    }
    // Base dimension equals the total dimension: no constraints at all.
    let sys = BundleSystem::new(2, MetricField::analytic(Flat), vec![]).unwrap();
    let out = lda_rhs(&sys, &[0.4, -0.7], &[1.0, 2.0]).unwrap();
    assert!(out.multipliers.is_empty());
    assert!(out.acceleration.iter().all(|a| a.abs() < 1e-12));
}

// ---------------------------------------------------------------------------
// Integrated trajectories against closed forms
// ---------------------------------------------------------------------------

#[test]
fn particle_constrained_trajectory_closed_form() {
    // From the origin with lifted base velocity (1, 1):
    // x(t) = asinh(t), y(t) = t, z(t) = sqrt(1 + t^2) - 1.
    let built = particle();
    let (q0, v0) = built.default_initial.clone();
    let traj = integrate_nonholonomic(
        &built.system,
        &q0,
        &v0,
        2.0,
        OdeStepper::Rk4Fixed { dt: 1e-3 },
    )
    .unwrap();
    for &t in &[0.5, 1.0, 2.0] {
        let s = traj.state_at(t);
        assert_abs_diff_eq!(s.q[0], t.asinh(), epsilon = 1e-10);
        assert_abs_diff_eq!(s.q[1], t, epsilon = 1e-12);
        assert_abs_diff_eq!(s.q[2], (1.0 + t * t).sqrt() - 1.0, epsilon = 1e-10);
    }
}

#[test]
fn disk_spin_and_steering_are_affine() {
    let built = disk(&[]);
    let (q0, v0) = built.default_initial.clone();
    let traj = integrate_nonholonomic(
        &built.system,
        &q0,
        &v0,
        3.0,
        OdeStepper::Rk4Fixed { dt: 1e-3 },
    )
    .unwrap();
    for (t, s) in traj.iter() {
        assert_abs_diff_eq!(s.q[0], q0[0] + v0[0] * t, epsilon = 1e-9);
        assert_abs_diff_eq!(s.q[1], q0[1] + v0[1] * t, epsilon = 1e-9);
    }
}

#[test]
fn zero_velocity_stays_put() {
    let built = particle();
    let traj = integrate_nonholonomic(
        &built.system,
        &[0.3, -0.2, 0.6],
        &[0.0, 0.0, 0.0],
        1.0,
        OdeStepper::Rk4Fixed { dt: 1e-2 },
    )
    .unwrap();
    let end = traj.final_state();
    assert_abs_diff_eq!(end.q[0], 0.3, epsilon = 1e-14);
    assert_abs_diff_eq!(end.q[1], -0.2, epsilon = 1e-14);
    assert_abs_diff_eq!(end.q[2], 0.6, epsilon = 1e-14);
}

#[test]
fn constraint_violating_initial_velocity_is_rejected() {
    let built = particle();
    let r = integrate_nonholonomic(
        &built.system,
        &[0.0, 0.0, 0.0],
        &[1.0, 1.0, 1.0],
        1.0,
        OdeStepper::Rk4Fixed { dt: 1e-2 },
    );
    assert!(matches!(
        r,
        Err(chaplygin_core::Error::ConstraintViolated { .. })
    ));
}

#[test]
fn particle_principal_geodesic_closed_form() {
    // From the origin with velocity (1, 1, 0):
    // gamma(s) = (s, sinh(s), cosh(s) - 1).
    let built = particle();
    let h = principal_metric(&built.system).unwrap();
    let traj = integrate_geodesic(
        &h,
        &[0.0, 0.0, 0.0],
        &[1.0, 1.0, 0.0],
        1.5,
        OdeStepper::Rk4Fixed { dt: 1e-3 },
    )
    .unwrap();
    for &s in &[0.4, 1.0, 1.5] {
        let st = traj.state_at(s);
        assert_abs_diff_eq!(st.q[0], s, epsilon = 1e-10);
        assert_abs_diff_eq!(st.q[1], s.sinh(), epsilon = 1e-9);
        assert_abs_diff_eq!(st.q[2], s.cosh() - 1.0, epsilon = 1e-9);
    }
}

#[test]
fn euclidean_geodesics_are_straight() {
    use chaplygin_core::geometry::{MetricField, SmoothMatrix};
    use chaplygin_core::numeric::dual::Scalar;
    struct Flat;
    impl SmoothMatrix for Flat {
        fn dim(&self) -> usize {
            3
        }
        fn entries<S: Scalar>(&self, _q: &[S]) -> Vec<S> {
            let mut e = vec![S::zero(); 9];
            e[0] = S::one();
            e[4] = S::one();
            e[8] = S::one();
            e
        }
    }
    let g = MetricField::analytic(Flat);
    let traj = integrate_geodesic(
        &g,
        &[0.0, 1.0, -1.0],
        &[0.5, -0.25, 1.0],
        2.0,
        OdeStepper::Rk4Fixed { dt: 1e-2 },
    )
    .unwrap();
    for (t, s) in traj.iter() {
        assert_abs_diff_eq!(s.q[0], 0.5 * t, epsilon = 1e-12);
        assert_abs_diff_eq!(s.q[1], 1.0 - 0.25 * t, epsilon = 1e-12);
        assert_abs_diff_eq!(s.q[2], -1.0 + t, epsilon = 1e-12);
    }
}

#[test]
fn particle_with_potential_mechanical_rhs() {
    // Flat space with V = y^2/2 pulls straight toward y = 0; the principal
    // metric at y = 0 is the identity so the mechanical acceleration at rest
    // is (0, -y, 0) evaluated at y = 0, i.e. zero.
    let built = build(
        &SystemDescriptor::new(SystemName::NonholonomicParticle)
            .with_potential(PotentialKind::QuadraticY),
    )
    .unwrap();
    let h = principal_metric(&built.system).unwrap();
    let pot = built.system.potential_on_total().unwrap();
    let (_, acc) = mechanical_rhs(&h, &pot, &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]).unwrap();
    assert!(acc.iter().all(|a| a.abs() < 1e-10));
    // At y = 1 and rest the acceleration is -h^{-1} dV.
    let (_, acc1) = mechanical_rhs(&h, &pot, &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]).unwrap();
    // h^{-1} at y = 1: [[1, 0, 1], [0, 2, 0], [1, 0, 2]]; dV = (0, 1, 0).
    assert_abs_diff_eq!(acc1[0], 0.0, epsilon = 1e-9);
    assert_abs_diff_eq!(acc1[1], -2.0, epsilon = 1e-9);
    assert_abs_diff_eq!(acc1[2], 0.0, epsilon = 1e-9);
}

// ---------------------------------------------------------------------------
// Time map
// ---------------------------------------------------------------------------

#[test]
fn disk_time_map_is_identity() {
    let built = disk(&[]);
    let (q0, v0) = built.default_initial.clone();
    let traj = integrate_nonholonomic(
        &built.system,
        &q0,
        &v0,
        2.0,
        OdeStepper::Rk4Fixed { dt: 1e-3 },
    )
    .unwrap();
    let tm = time_map(&built.system, &traj).unwrap();
    assert!(tm.is_strictly_increasing());
    for (k, t) in tm.times().iter().enumerate() {
        assert_abs_diff_eq!(tm.tau_values()[k], *t, epsilon = 1e-12);
    }
}

#[test]
fn particle_time_map_hits_inverse_hyperbolic_sine() {
    // y(s) = s along the constrained trajectory, so
    // tau(t) = integral of (1 + s^2)^{-1/2} = asinh(t).
    let built = particle();
    let (q0, v0) = built.default_initial.clone();
    let traj = integrate_nonholonomic(
        &built.system,
        &q0,
        &v0,
        1.0,
        OdeStepper::Rk4Fixed { dt: 1e-3 },
    )
    .unwrap();
    let tm = time_map(&built.system, &traj).unwrap();
    assert_abs_diff_eq!(tm.tau_values()[0], 0.0);
    assert!(tm.is_strictly_increasing());
    assert_abs_diff_eq!(tm.final_tau(), 1.0f64.asinh(), epsilon = 1e-10);
    assert_abs_diff_eq!(tm.tau_at(0.5), 0.5f64.asinh(), epsilon = 1e-10);
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

#[test]
fn invalid_parameters_are_rejected() {
    let d = SystemDescriptor::new(SystemName::VerticalDisk).with_param("m", -1.0);
    assert!(build(&d).is_err());
    let d2 = SystemDescriptor::new(SystemName::VerticalDisk).with_param("mass", 1.0);
    assert!(build(&d2).is_err());
    let d3 = SystemDescriptor::new(SystemName::Veselova).with_param("I1", 0.0);
    assert!(build(&d3).is_err());
}

#[test]
fn state_dimension_mismatch_is_rejected() {
    let built = particle();
    assert!(horizontal_lift(&built.system, &[0.0, 0.0, 0.0], &[1.0]).is_err());
    let f = ScalarField::zero(2);
    assert!(f.evaluate(&[1.0, 2.0, 3.0]).is_err());
}

// ---------------------------------------------------------------------------
// Exact-derivative construction route
// ---------------------------------------------------------------------------

#[test]
fn exact_route_agrees_with_default_construction() {
    // Same construction, two scalar types: values must coincide and the
    // forward-mode derivatives must match the stencil derivatives.
    use chaplygin_core::systems::principal_metric_exact_for;
    for name in [
        SystemName::VerticalDisk,
        SystemName::NonholonomicParticle,
        SystemName::Veselova,
    ] {
        let built = build(&SystemDescriptor::new(name)).unwrap();
        let h_fd = principal_metric(&built.system).unwrap();
        let h_exact = principal_metric_exact_for(&built).unwrap();
        let mut rng = StdRng::seed_from_u64(2024);
        for _ in 0..20 {
            let q: Vec<f64> = built
                .sampling_box
                .iter()
                .map(|(lo, hi)| rng.random_range(*lo..*hi))
                .collect();
            let a = h_fd.evaluate(&q).unwrap();
            let b = h_exact.evaluate(&q).unwrap();
            for (x, y) in a.data().iter().zip(b.data()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
            for axis in 0..built.dim() {
                let da = h_fd.partial(&q, axis).unwrap();
                let db = h_exact.partial(&q, axis).unwrap();
                for (x, y) in da.data().iter().zip(db.data()) {
                    assert_abs_diff_eq!(x, y, epsilon = 1e-8);
                }
            }
        }
    }
}

#[test]
fn corrupted_variant_has_no_exact_route() {
    use chaplygin_core::systems::{corrupted_particle, principal_metric_exact_for};
    assert!(principal_metric_exact_for(&corrupted_particle()).is_none());
}
