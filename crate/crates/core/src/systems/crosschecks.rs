//! Closed-form expected values for the built-in systems.
//!
//! These are independent oracles: they are written from the hand-derived
//! formulas, not from the construction code, and the verification suite
//! compares the constructed objects against them.

use std::sync::Arc;

use crate::numeric::matrix::DenseMatrix;

use super::builders::{veselova_a_diag, veselova_gamma_point, BuiltSystem};
use super::descriptor::SystemName;

type MatrixFn = Arc<dyn Fn(&[f64]) -> DenseMatrix + Send + Sync>;
type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Expected-value table for one system. Entries are `None` where no closed
/// form is used (the Veselova principal metric is checked intrinsically).
#[derive(Clone, Default)]
pub struct Crosschecks {
    /// Expected principal metric on the total chart.
    pub principal_metric: Option<MatrixFn>,
    /// Expected reduced metric on the base chart.
    pub reduced_metric: Option<MatrixFn>,
    /// Expected conformal reduced metric on the base chart.
    pub canonical_metric: Option<MatrixFn>,
    /// Closed-form conformal exponent.
    pub phi: Option<ScalarFn>,
    /// Closed-form differential of the exponent.
    pub dphi: Option<VectorFn>,
}

/// Expected principal metric of the disk in chart order `(theta, phi, x, y)`.
pub fn disk_principal_entries(mass: f64, radius: f64, spin: f64, steer: f64, q: &[f64]) -> DenseMatrix {
    let phi = q[1];
    let mut h = DenseMatrix::zeros(4, 4);
    h.set(0, 0, spin + 2.0 * mass * radius * radius);
    h.set(1, 1, steer);
    h.set(2, 2, mass);
    h.set(3, 3, mass);
    let hx = -mass * radius * phi.cos();
    let hy = -mass * radius * phi.sin();
    h.set(0, 2, hx);
    h.set(2, 0, hx);
    h.set(0, 3, hy);
    h.set(3, 0, hy);
    h
}

/// Expected principal metric of the particle in chart order `(x, y, z)`.
pub fn particle_principal_entries(q: &[f64]) -> DenseMatrix {
    let y = q[1];
    let mut h = DenseMatrix::zeros(3, 3);
    h.set(0, 0, 1.0 + y * y);
    h.set(1, 1, 1.0 / (1.0 + y * y));
    h.set(2, 2, 1.0);
    h.set(0, 2, -y);
    h.set(2, 0, -y);
    h
}

/// Crosscheck table for a built system.
pub fn analytic_crosschecks(built: &BuiltSystem) -> Crosschecks {
    match built.name {
        SystemName::VerticalDisk => {
            let (m, r) = (built.params["m"], built.params["R"]);
            let (i, j) = (built.params["I"], built.params["J"]);
            let reduced = move |_q: &[f64]| {
                let mut g = DenseMatrix::zeros(2, 2);
                g.set(0, 0, i + m * r * r);
                g.set(1, 1, j);
                g
            };
            Crosschecks {
                principal_metric: Some(Arc::new(move |q| disk_principal_entries(m, r, i, j, q))),
                reduced_metric: Some(Arc::new(reduced)),
                canonical_metric: Some(Arc::new(reduced)),
                phi: Some(Arc::new(|_q| 0.0)),
                dphi: Some(Arc::new(|_q| vec![0.0, 0.0])),
            }
        }
        SystemName::NonholonomicParticle => Crosschecks {
            principal_metric: Some(Arc::new(particle_principal_entries)),
            reduced_metric: Some(Arc::new(|q: &[f64]| {
                let y = q[1];
                let mut g = DenseMatrix::zeros(2, 2);
                g.set(0, 0, 1.0 + y * y);
                g.set(1, 1, 1.0);
                g
            })),
            canonical_metric: Some(Arc::new(|q: &[f64]| {
                let y = q[1];
                let mut g = DenseMatrix::zeros(2, 2);
                g.set(0, 0, 1.0);
                g.set(1, 1, 1.0 / (1.0 + y * y));
                g
            })),
            phi: Some(Arc::new(|q: &[f64]| -0.5 * (1.0 + q[1] * q[1]).ln())),
            dphi: Some(Arc::new(|q: &[f64]| {
                vec![0.0, -q[1] / (1.0 + q[1] * q[1])]
            })),
        },
        SystemName::Veselova => {
            let inertia = [
                built.params["I1"],
                built.params["I2"],
                built.params["I3"],
            ];
            let a = veselova_a_diag(&inertia);
            // Reduced metric from the body-frame images of the lifted base
            // fields: u_beta = (cos g, -sin g, 0),
            // u_gamma = sin b (-cos b sin g, -cos b cos g, sin b).
            let reduced = move |base: &[f64]| {
                let (b, g) = (base[0], base[1]);
                let (sb, cb) = (b.sin(), b.cos());
                let (sg, cg) = (g.sin(), g.cos());
                let [i1, i2, i3] = inertia;
                let mut out = DenseMatrix::zeros(2, 2);
                out.set(0, 0, i1 * cg * cg + i2 * sg * sg);
                let off = (i2 - i1) * sb * cb * sg * cg;
                out.set(0, 1, off);
                out.set(1, 0, off);
                out.set(
                    1,
                    1,
                    i1 * sb * sb * cb * cb * sg * sg
                        + i2 * sb * sb * cb * cb * cg * cg
                        + i3 * sb.powi(4),
                );
                out
            };
            let phi = move |base: &[f64]| {
                let g = veselova_gamma_point(base);
                let s: f64 = (0..3).map(|k| a[k] * g[k] * g[k]).sum();
                -0.5 * s.ln()
            };
            let canonical = move |base: &[f64]| {
                let factor = (2.0 * phi(base)).exp();
                let g = reduced(base);
                let data: Vec<f64> = g.data().iter().map(|x| factor * x).collect();
                DenseMatrix::from_vec(2, 2, data)
            };
            let dphi = move |base: &[f64]| {
                let g = veselova_gamma_point(base);
                let (sb, cb) = (base[0].sin(), base[0].cos());
                let (sg, cg) = (base[1].sin(), base[1].cos());
                let dgb = [cb * sg, cb * cg, -sb];
                let dgg = [sb * cg, -sb * sg, 0.0];
                let s: f64 = (0..3).map(|k| a[k] * g[k] * g[k]).sum();
                let dsb: f64 = (0..3).map(|k| 2.0 * a[k] * g[k] * dgb[k]).sum();
                let dsg: f64 = (0..3).map(|k| 2.0 * a[k] * g[k] * dgg[k]).sum();
                vec![-0.5 * dsb / s, -0.5 * dsg / s]
            };
            Crosschecks {
                principal_metric: None,
                reduced_metric: Some(Arc::new(reduced)),
                canonical_metric: Some(Arc::new(canonical)),
                phi: Some(Arc::new(phi)),
                dphi: Some(Arc::new(dphi)),
            }
        }
    }
}
