//! Chaplygin data in a bundle-adapted chart.
//!
//! The chart convention: the first `m` coordinates are base coordinates and
//! the bundle projection is the truncation onto them. The constraint
//! distribution has rank `m`, is given by `n - m` one-forms, and is
//! complementary to the span of the fiber coordinate fields.

use crate::error::{Error, Result};
use crate::geometry::{CoordField, Distribution, MetricField, ScalarField};
use crate::numeric::matrix::{solve_linear, DenseMatrix};
use crate::numeric::dot;

/// A Chaplygin system in a bundle-adapted chart.
#[derive(Clone)]
pub struct BundleSystem {
    n: usize,
    m: usize,
    metric: MetricField,
    constraints: std::sync::Arc<Distribution>,
    potential: Option<ScalarField>,
    analytic_phi: Option<ScalarField>,
    section_fiber: Vec<f64>,
    phi_basepoint: Vec<f64>,
    id: String,
}

impl BundleSystem {
    /// Build from a metric on the total space and `n - m` constraint
    /// one-forms; `m` is the base dimension.
    pub fn new(m: usize, metric: MetricField, one_forms: Vec<CoordField>) -> Result<Self> {
        let n = metric.dim();
        if m == 0 || m > n {
            return Err(Error::InvalidParameters(format!(
                "base dimension {m} incompatible with total dimension {n}"
            )));
        }
        if one_forms.len() != n - m {
            return Err(Error::InvalidParameters(format!(
                "expected {} constraint one-forms, got {}",
                n - m,
                one_forms.len()
            )));
        }
        let constraints = Distribution::from_one_forms(n, one_forms);
        Ok(Self {
            n,
            m,
            metric,
            constraints: std::sync::Arc::new(constraints),
            potential: None,
            analytic_phi: None,
            section_fiber: vec![0.0; n - m],
            phi_basepoint: vec![0.0; m],
            id: "unnamed".into(),
        })
    }

    /// Attach a potential on the base (the total-space potential is its
    /// pullback through the projection).
    pub fn with_potential(mut self, potential: ScalarField) -> Self {
        debug_assert_eq!(potential.dim(), self.m);
        self.potential = Some(potential);
        self
    }

    /// Attach the closed-form conformal exponent on the base.
    pub fn with_analytic_phi(mut self, phi: ScalarField) -> Self {
        debug_assert_eq!(phi.dim(), self.m);
        self.analytic_phi = Some(phi);
        self
    }

    /// Fiber coordinates of the local section used for reduced quantities.
    pub fn with_section_fiber(mut self, fiber: Vec<f64>) -> Self {
        debug_assert_eq!(fiber.len(), self.n - self.m);
        self.section_fiber = fiber;
        self
    }

    /// Base point pinning the additive constant of a recovered conformal
    /// exponent.
    pub fn with_phi_basepoint(mut self, basepoint: Vec<f64>) -> Self {
        debug_assert_eq!(basepoint.len(), self.m);
        self.phi_basepoint = basepoint;
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn base_dim(&self) -> usize {
        self.m
    }

    pub fn fiber_dim(&self) -> usize {
        self.n - self.m
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn constraints(&self) -> &Distribution {
        &self.constraints
    }

    pub fn potential(&self) -> Option<&ScalarField> {
        self.potential.as_ref()
    }

    pub fn analytic_phi(&self) -> Option<&ScalarField> {
        self.analytic_phi.as_ref()
    }

    pub fn phi_basepoint(&self) -> &[f64] {
        &self.phi_basepoint
    }

    pub fn section_fiber(&self) -> &[f64] {
        &self.section_fiber
    }

    /// Projection onto the base: truncation to the first `m` coordinates.
    pub fn project_base(&self, q: &[f64]) -> Vec<f64> {
        q[..self.m].to_vec()
    }

    /// The local section `sigma(base) = (base, fixed fiber constants)`.
    pub fn section(&self, base: &[f64]) -> Vec<f64> {
        let mut q = Vec::with_capacity(self.n);
        q.extend_from_slice(base);
        q.extend_from_slice(&self.section_fiber);
        q
    }

    /// Potential pulled back to the total space.
    pub fn potential_on_total(&self) -> Option<ScalarField> {
        let m = self.m;
        self.potential.as_ref().map(|p| {
            let p_eval = p.clone();
            let p_diff = p.clone();
            let n = self.n;
            ScalarField::new(n, move |q: &[f64]| {
                p_eval.evaluate(&q[..m]).unwrap_or(f64::NAN)
            })
            .with_differential(move |q: &[f64]| {
                let mut d = vec![0.0; n];
                if let Ok(db) = p_diff.differential(&q[..m]) {
                    d[..m].copy_from_slice(&db);
                }
                d
            })
        })
    }

    /// Kinetic-plus-potential energy of a state.
    pub fn energy(&self, q: &[f64], v: &[f64]) -> Result<f64> {
        let kinetic = 0.5 * self.metric.inner(q, v, v)?;
        let potential = match &self.potential {
            Some(p) => p.evaluate(&q[..self.m])?,
            None => 0.0,
        };
        Ok(kinetic + potential)
    }
}

/// The unique horizontal lift of a base vector `w` at `q`: the vector `v`
/// with base components equal to `w` that annihilates every constraint
/// one-form. The fiber components come from an `(n-m) x (n-m)` solve.
pub fn horizontal_lift(sys: &BundleSystem, q: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let (n, m) = (sys.n, sys.m);
    if w.len() != m {
        return Err(Error::InvalidArgument(format!(
            "base vector dimension {} does not match base dimension {m}",
            w.len()
        )));
    }
    let rows = sys.constraints.one_forms(q)?;
    let c = n - m;
    if c == 0 {
        return Ok(w.to_vec());
    }
    let mut fiber_block = DenseMatrix::zeros(c, c);
    let mut rhs = vec![0.0; c];
    for (a, mu) in rows.iter().enumerate() {
        for j in 0..c {
            fiber_block.set(a, j, mu[m + j]);
        }
        rhs[a] = -dot(&mu[..m], w);
    }
    let fiber = solve_linear(&fiber_block, &rhs).map_err(|_| Error::RankDeficient {
        what: "fiber block of the constraint forms".into(),
        point: q.to_vec(),
    })?;
    let mut v = Vec::with_capacity(n);
    v.extend_from_slice(w);
    v.extend_from_slice(&fiber);
    Ok(v)
}

/// Horizontal lifts of all base coordinate fields at `q`, in order.
///
/// The constraint rows are evaluated and the fiber block factored once for
/// all `m` lifts; this sits on the hot path of every principal-metric
/// evaluation.
pub fn coordinate_lifts(sys: &BundleSystem, q: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = sys.dim();
    let m = sys.base_dim();
    let c = n - m;
    if c == 0 {
        return Ok((0..m)
            .map(|a| {
                let mut v = vec![0.0; n];
                v[a] = 1.0;
                v
            })
            .collect());
    }
    let rows = sys.constraints.one_forms(q)?;
    let mut fiber_block = DenseMatrix::zeros(c, c);
    for (a, mu) in rows.iter().enumerate() {
        for j in 0..c {
            fiber_block.set(a, j, mu[m + j]);
        }
    }
    let lu = crate::numeric::matrix::LuFactors::factor(&fiber_block).map_err(|_| {
        Error::RankDeficient {
            what: "fiber block of the constraint forms".into(),
            point: q.to_vec(),
        }
    })?;
    let mut rhs = vec![0.0; c];
    let mut lifts = Vec::with_capacity(m);
    for a in 0..m {
        for (slot, mu) in rhs.iter_mut().zip(rows.iter()) {
            *slot = -mu[a];
        }
        let fiber = lu.solve(&rhs);
        let mut v = vec![0.0; n];
        v[a] = 1.0;
        v[m..].copy_from_slice(&fiber);
        lifts.push(v);
    }
    Ok(lifts)
}

/// Reduced metric entries at an explicit total-space point: pairwise metric
/// products of the coordinate-field lifts. Exposed separately so fiber
/// independence can be checked against different representatives.
pub fn reduced_metric_at_point(sys: &BundleSystem, q: &[f64]) -> Result<DenseMatrix> {
    let m = sys.base_dim();
    let lifts = coordinate_lifts(sys, q)?;
    let g = sys.metric().evaluate(q)?;
    let mut out = DenseMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let value = g.bilinear(&lifts[a], &lifts[b]);
            out.set(a, b, value);
            out.set(b, a, value);
        }
    }
    Ok(out)
}

/// Reduced metric at a base point, evaluated through the local section.
pub fn reduced_metric(sys: &BundleSystem, base: &[f64]) -> Result<DenseMatrix> {
    reduced_metric_at_point(sys, &sys.section(base))
}
