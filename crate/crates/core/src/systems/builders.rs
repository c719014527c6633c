//! Construction of the built-in systems in their bundle-adapted charts.
//!
//! Chart conventions (base coordinates first, projection = truncation):
//!   vertical-disk          (theta, phi | x, y)
//!   nonholonomic-particle  (x, y | z)
//!   veselova               (beta, gamma | alpha), ZXZ Euler angles with the
//!                          symmetry acting by shifts of the first rotation
//!                          angle alpha; domain keeps beta away from the
//!                          Euler-angle degeneracy.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::chaplygin::{horizontal_lift, principal_metric_exact, BundleSystem, ScalarBundleData};
use crate::error::{Error, Result};
use crate::geometry::{MetricField, ScalarField, SmoothMatrix};
use crate::numeric::dual::Scalar;

use super::descriptor::{PotentialKind, SystemDescriptor, SystemName};

/// A built system plus the chart data the verification suite needs.
#[derive(Clone)]
pub struct BuiltSystem {
    pub system: BundleSystem,
    pub name: SystemName,
    pub params: BTreeMap<String, f64>,
    pub potential: PotentialKind,
    pub coord_names: Vec<&'static str>,
    /// Per-coordinate sampling intervals for randomized checks.
    pub sampling_box: Vec<(f64, f64)>,
    /// A constraint-compatible initial state with generic behavior.
    pub default_initial: (Vec<f64>, Vec<f64>),
}

impl BuiltSystem {
    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn base_dim(&self) -> usize {
        self.system.base_dim()
    }

    /// Sampling intervals of the base coordinates only.
    pub fn base_box(&self) -> Vec<(f64, f64)> {
        self.sampling_box[..self.base_dim()].to_vec()
    }
}

// ---------------------------------------------------------------------------
// Vertical rolling disk
// ---------------------------------------------------------------------------

/// Disk data in chart order (theta, phi, x, y), generic over the scalar.
#[derive(Clone)]
pub struct DiskData {
    pub mass: f64,
    pub radius: f64,
    pub spin_inertia: f64,
    pub steer_inertia: f64,
}

impl SmoothMatrix for DiskData {
    fn dim(&self) -> usize {
        4
    }
    fn entries<S: Scalar>(&self, _q: &[S]) -> Vec<S> {
        let mut e = vec![S::zero(); 16];
        e[0] = S::from_f64(self.spin_inertia);
        e[5] = S::from_f64(self.steer_inertia);
        e[10] = S::from_f64(self.mass);
        e[15] = S::from_f64(self.mass);
        e
    }
}

impl ScalarBundleData for DiskData {
    fn dim(&self) -> usize {
        4
    }
    fn base_dim(&self) -> usize {
        2
    }
    fn section_fiber(&self) -> Vec<f64> {
        vec![0.0, 0.0]
    }
    fn metric_entries<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        SmoothMatrix::entries(self, q)
    }
    fn constraint_rows<S: Scalar>(&self, q: &[S]) -> Vec<Vec<S>> {
        let r = S::from_f64(self.radius);
        let phi = q[1];
        vec![
            vec![-r * phi.cos(), S::zero(), S::one(), S::zero()],
            vec![-r * phi.sin(), S::zero(), S::zero(), S::one()],
        ]
    }
    fn conformal_exponent<S: Scalar>(&self, _base: &[S]) -> S {
        S::zero()
    }
}

fn disk_data(params: &BTreeMap<String, f64>) -> DiskData {
    DiskData {
        mass: params["m"],
        radius: params["R"],
        spin_inertia: params["I"],
        steer_inertia: params["J"],
    }
}

fn build_disk(params: &BTreeMap<String, f64>) -> Result<BundleSystem> {
    let r = params["R"];
    let metric = MetricField::analytic(disk_data(params));
    // Rolling without slipping: xd = R cos(phi) thetad, yd = R sin(phi) thetad.
    let r1 = r;
    let mu1 = Arc::new(move |q: &[f64]| vec![-r1 * q[1].cos(), 0.0, 1.0, 0.0]);
    let r2 = r;
    let mu2 = Arc::new(move |q: &[f64]| vec![-r2 * q[1].sin(), 0.0, 0.0, 1.0]);
    Ok(BundleSystem::new(2, metric, vec![mu1, mu2])?
        .with_analytic_phi(ScalarField::zero(2))
        .with_id("vertical-disk"))
}

// ---------------------------------------------------------------------------
// Nonholonomic particle
// ---------------------------------------------------------------------------

/// Particle data in chart order (x, y, z), generic over the scalar.
#[derive(Clone)]
pub struct ParticleData;

impl SmoothMatrix for ParticleData {
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

impl ScalarBundleData for ParticleData {
    fn dim(&self) -> usize {
        3
    }
    fn base_dim(&self) -> usize {
        2
    }
    fn section_fiber(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn metric_entries<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        SmoothMatrix::entries(self, q)
    }
    fn constraint_rows<S: Scalar>(&self, q: &[S]) -> Vec<Vec<S>> {
        vec![vec![-q[1], S::zero(), S::one()]]
    }
    fn conformal_exponent<S: Scalar>(&self, base: &[S]) -> S {
        let y = base[1];
        S::from_f64(-0.5) * (S::one() + y * y).ln()
    }
}

fn particle_phi() -> ScalarField {
    ScalarField::new(2, |q| -0.5 * (1.0 + q[1] * q[1]).ln())
        .with_differential(|q| vec![0.0, -q[1] / (1.0 + q[1] * q[1])])
}

fn build_particle() -> Result<BundleSystem> {
    let metric = MetricField::analytic(ParticleData);
    // Constraint zd = y xd.
    let mu = Arc::new(|q: &[f64]| vec![-q[1], 0.0, 1.0]);
    Ok(BundleSystem::new(2, metric, vec![mu])?
        .with_analytic_phi(particle_phi())
        .with_id("nonholonomic-particle"))
}

/// Negative-control variant: constraint corrupted to `zd = y^2 xd` while the
/// attached conformal exponent is left at the uncorrupted closed form. The
/// verification suite must flag the mismatch rather than pass it through.
pub fn corrupted_particle() -> BuiltSystem {
    let metric = MetricField::analytic(ParticleData);
    let mu = Arc::new(|q: &[f64]| vec![-q[1] * q[1], 0.0, 1.0]);
    let system = BundleSystem::new(2, metric, vec![mu])
        .expect("corrupted particle construction")
        .with_analytic_phi(particle_phi())
        .with_id("corrupted-particle");
    let q0 = vec![0.0, 0.0, 0.0];
    let v0 = horizontal_lift(&system, &q0, &[1.0, 1.0]).expect("initial lift");
    BuiltSystem {
        system,
        name: SystemName::NonholonomicParticle,
        params: BTreeMap::new(),
        potential: PotentialKind::None,
        coord_names: vec!["x", "y", "z"],
        sampling_box: vec![(-1.5, 1.5), (-1.5, 1.5), (-1.0, 1.0)],
        default_initial: (q0, v0),
    }
}

// ---------------------------------------------------------------------------
// Veselova system
// ---------------------------------------------------------------------------

/// Body angular velocity in ZXZ Euler angles `(beta, gamma, alpha)` (chart
/// order, base first): `Omega = W(beta, gamma) * (betad, gammad, alphad)`.
fn euler_omega_columns<S: Scalar>(q: &[S]) -> [[S; 3]; 3] {
    let (beta, gamma) = (q[0], q[1]);
    let (sb, cb) = (beta.sin(), beta.cos());
    let (sg, cg) = (gamma.sin(), gamma.cos());
    [
        [cg, -sg, S::zero()],
        [S::zero(), S::zero(), S::one()],
        [sb * sg, sb * cg, cb],
    ]
}

/// Veselova data in chart order (beta, gamma, alpha), generic over the
/// scalar.
#[derive(Clone)]
pub struct VeselovaData {
    pub inertia: [f64; 3],
}

impl SmoothMatrix for VeselovaData {
    fn dim(&self) -> usize {
        3
    }
    fn entries<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        let cols = euler_omega_columns(q);
        let inertia = self.inertia.map(S::from_f64);
        let mut e = vec![S::zero(); 9];
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = S::zero();
                for k in 0..3 {
                    acc = acc + inertia[k] * cols[a][k] * cols[b][k];
                }
                e[a * 3 + b] = acc;
            }
        }
        e
    }
}

impl ScalarBundleData for VeselovaData {
    fn dim(&self) -> usize {
        3
    }
    fn base_dim(&self) -> usize {
        2
    }
    fn section_fiber(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn metric_entries<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        SmoothMatrix::entries(self, q)
    }
    fn constraint_rows<S: Scalar>(&self, q: &[S]) -> Vec<Vec<S>> {
        vec![vec![S::zero(), q[0].cos(), S::one()]]
    }
    fn conformal_exponent<S: Scalar>(&self, base: &[S]) -> S {
        let a = veselova_a_diag(&self.inertia).map(S::from_f64);
        let (sb, cb) = (base[0].sin(), base[0].cos());
        let (sg, cg) = (base[1].sin(), base[1].cos());
        let gamma = [sb * sg, sb * cg, cb];
        let mut s = S::zero();
        for k in 0..3 {
            s = s + a[k] * gamma[k] * gamma[k];
        }
        S::from_f64(-0.5) * s.ln()
    }
}

/// Unit vector `gamma_pt = g^{-1} e3` expressed through the base chart.
pub fn veselova_gamma_point(base: &[f64]) -> [f64; 3] {
    let (sb, cb) = (base[0].sin(), base[0].cos());
    let (sg, cg) = (base[1].sin(), base[1].cos());
    [sb * sg, sb * cg, cb]
}

/// Diagonal of the matrix `A` with `I(u x v) = (A u) x (A v)`.
pub fn veselova_a_diag(inertia: &[f64; 3]) -> [f64; 3] {
    let [i1, i2, i3] = *inertia;
    [
        (i2 * i3 / i1).sqrt(),
        (i1 * i3 / i2).sqrt(),
        (i1 * i2 / i3).sqrt(),
    ]
}

fn veselova_phi(inertia: [f64; 3]) -> ScalarField {
    let a = veselova_a_diag(&inertia);
    let value = move |base: &[f64]| {
        let g = veselova_gamma_point(base);
        let s: f64 = (0..3).map(|k| a[k] * g[k] * g[k]).sum();
        -0.5 * s.ln()
    };
    let diff = move |base: &[f64]| {
        let g = veselova_gamma_point(base);
        let (sb, cb) = (base[0].sin(), base[0].cos());
        let (sg, cg) = (base[1].sin(), base[1].cos());
        let dg_dbeta = [cb * sg, cb * cg, -sb];
        let dg_dgamma = [sb * cg, -sb * sg, 0.0];
        let s: f64 = (0..3).map(|k| a[k] * g[k] * g[k]).sum();
        let ds_dbeta: f64 = (0..3).map(|k| 2.0 * a[k] * g[k] * dg_dbeta[k]).sum();
        let ds_dgamma: f64 = (0..3).map(|k| 2.0 * a[k] * g[k] * dg_dgamma[k]).sum();
        vec![-0.5 * ds_dbeta / s, -0.5 * ds_dgamma / s]
    };
    ScalarField::new(2, value).with_differential(diff)
}

fn build_veselova(params: &BTreeMap<String, f64>) -> Result<BundleSystem> {
    let inertia = [params["I1"], params["I2"], params["I3"]];
    let metric = MetricField::analytic(VeselovaData { inertia });
    // Spatial angular velocity about e3 vanishes: alphad + cos(beta) gammad = 0.
    let mu = Arc::new(|q: &[f64]| vec![0.0, q[0].cos(), 1.0]);
    Ok(BundleSystem::new(2, metric, vec![mu])?
        .with_analytic_phi(veselova_phi(inertia))
        .with_section_fiber(vec![0.0])
        .with_phi_basepoint(vec![std::f64::consts::FRAC_PI_2, 0.0])
        .with_id("veselova"))
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Build a validated descriptor into a usable system.
pub fn build(descriptor: &SystemDescriptor) -> Result<BuiltSystem> {
    let params = descriptor.validated_params()?;
    let (mut system, coord_names, sampling_box, q0, base_v0): (
        BundleSystem,
        Vec<&'static str>,
        Vec<(f64, f64)>,
        Vec<f64>,
        Vec<f64>,
    ) = match descriptor.name {
        SystemName::VerticalDisk => (
            build_disk(&params)?,
            vec!["theta", "phi", "x", "y"],
            vec![
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-1.0, 1.0),
                (-1.0, 1.0),
            ],
            vec![0.0, 0.3, 0.0, 0.0],
            vec![1.0, 0.7],
        ),
        SystemName::NonholonomicParticle => (
            build_particle()?,
            vec!["x", "y", "z"],
            vec![(-1.5, 1.5), (-1.5, 1.5), (-1.0, 1.0)],
            vec![0.0, 0.0, 0.0],
            vec![1.0, 1.0],
        ),
        SystemName::Veselova => (
            build_veselova(&params)?,
            vec!["beta", "gamma", "alpha"],
            vec![
                (0.4, std::f64::consts::PI - 0.4),
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-std::f64::consts::PI, std::f64::consts::PI),
            ],
            vec![std::f64::consts::FRAC_PI_2, 0.4, 0.0],
            vec![0.25, 0.35],
        ),
    };
    match descriptor.potential {
        PotentialKind::None => {}
        PotentialKind::QuadraticY => {
            system = system.with_potential(
                ScalarField::new(2, |base| 0.5 * base[1] * base[1])
                    .with_differential(|base| vec![0.0, base[1]]),
            );
        }
    }
    let v0 = horizontal_lift(&system, &q0, &base_v0)?;
    let built = BuiltSystem {
        system,
        name: descriptor.name,
        params,
        potential: descriptor.potential,
        coord_names,
        sampling_box,
        default_initial: (q0, v0),
    };
    validate_built(&built)?;
    Ok(built)
}

/// Cheap structural validation at a few chart points: metric positive
/// definite, constraints full rank, distribution complementary to the fiber,
/// and metric entries independent of the fiber coordinates.
fn validate_built(built: &BuiltSystem) -> Result<()> {
    let sys = &built.system;
    let n = sys.dim();
    let m = sys.base_dim();
    let center: Vec<f64> = built
        .sampling_box
        .iter()
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect();
    let mut probes = vec![center.clone()];
    for (i, (lo, hi)) in built.sampling_box.iter().enumerate() {
        let mut p = center.clone();
        p[i] = lo + 0.25 * (hi - lo);
        probes.push(p.clone());
        p[i] = lo + 0.75 * (hi - lo);
        probes.push(p);
    }
    for q in &probes {
        sys.metric()
            .check_positive_definite(q)
            .map_err(|_| Error::InvalidParameters(format!("metric not positive definite at {q:?}")))?;
        sys.constraints().one_forms(q)?;
        // Complementarity of the distribution and the fiber: the lift solve
        // must succeed for every base direction.
        for a in 0..m {
            let mut w = vec![0.0; m];
            w[a] = 1.0;
            horizontal_lift(sys, q, &w)?;
        }
        // Fiber invariance of the metric entries in the adapted chart.
        let g0 = sys.metric().evaluate(q)?;
        let mut shifted = q.clone();
        for j in m..n {
            shifted[j] += 0.37;
        }
        let g1 = sys.metric().evaluate(&shifted)?;
        let defect = g0
            .data()
            .iter()
            .zip(g1.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if defect > 1e-10 {
            return Err(Error::InvalidParameters(format!(
                "metric entries vary along the fiber (defect {defect:.3e})"
            )));
        }
    }
    Ok(())
}

/// Principal metric with exact forward-mode derivatives, available for the
/// genuine built-in systems (the construction itself is identical to the
/// finite-difference route; only the derivative path changes). Returns
/// `None` for modified variants such as the corrupted-constraint control.
pub fn principal_metric_exact_for(built: &BuiltSystem) -> Option<MetricField> {
    if built.system.id() != built.name.as_str() {
        return None;
    }
    match built.name {
        SystemName::VerticalDisk => Some(principal_metric_exact(disk_data(&built.params))),
        SystemName::NonholonomicParticle => Some(principal_metric_exact(ParticleData)),
        SystemName::Veselova => Some(principal_metric_exact(VeselovaData {
            inertia: [
                built.params["I1"],
                built.params["I2"],
                built.params["I3"],
            ],
        })),
    }
}
