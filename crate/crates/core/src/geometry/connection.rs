//! Levi-Civita data: Christoffel symbols, geodesic and mechanical
//! right-hand sides, metric gradients.

use crate::error::Result;
use crate::numeric::matrix::{DenseMatrix, LuFactors};

use super::metric::MetricField;
use super::scalar_field::ScalarField;

/// Christoffel symbols of the second kind at a point, `Gamma^k_{ij}`,
/// symmetric in the lower pair.
pub struct Christoffel {
    n: usize,
    vals: Vec<f64>,
}

impl Christoffel {
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.vals[(k * self.n + i) * self.n + j]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Geodesic acceleration `a^k = -Gamma^k_{ij} v^i v^j`.
    pub fn acceleration(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut acc = vec![0.0; n];
        for k in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += self.get(k, i, j) * v[i] * v[j];
                }
            }
            acc[k] = -s;
        }
        acc
    }
}

/// Christoffel symbols `Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})`.
pub fn christoffel(metric: &MetricField, q: &[f64]) -> Result<Christoffel> {
    let n = metric.dim();
    let g = metric.evaluate(q)?;
    let dg = metric.partials(q)?;
    let lu = LuFactors::factor(&g)?;
    let mut vals = vec![0.0; n * n * n];
    let mut lower = vec![0.0; n];
    for i in 0..n {
        for j in i..n {
            for (l, slot) in lower.iter_mut().enumerate() {
                *slot = 0.5 * (dg[i].get(j, l) + dg[j].get(i, l) - dg[l].get(i, j));
            }
            let upper = lu.solve(&lower);
            for k in 0..n {
                vals[(k * n + i) * n + j] = upper[k];
                vals[(k * n + j) * n + i] = upper[k];
            }
        }
    }
    Ok(Christoffel { n, vals })
}

/// Geodesic right-hand side: `(dq, dv) = (v, -Gamma(v, v))`.
pub fn geodesic_rhs(metric: &MetricField, q: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let gamma = christoffel(metric, q)?;
    Ok((v.to_vec(), gamma.acceleration(v)))
}

/// Mechanical right-hand side: geodesic acceleration plus `-grad V`.
pub fn mechanical_rhs(
    metric: &MetricField,
    potential: &ScalarField,
    q: &[f64],
    v: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let gamma = christoffel(metric, q)?;
    let mut acc = gamma.acceleration(v);
    let gv = grad(metric, potential, q)?;
    for (a, g) in acc.iter_mut().zip(&gv) {
        *a -= g;
    }
    Ok((v.to_vec(), acc))
}

/// Metric gradient: the vector `X` with `g(X, .) = df`, i.e. `g^{-1} df`.
pub fn grad(metric: &MetricField, f: &ScalarField, q: &[f64]) -> Result<Vec<f64>> {
    let g = metric.evaluate(q)?;
    let df = f.differential(q)?;
    DenseMatrix::solve(&g, &df)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::SmoothMatrix;
    use crate::numeric::dual::Scalar;
    use approx::assert_abs_diff_eq;

    struct Euclid(usize);
    impl SmoothMatrix for Euclid {
        fn dim(&self) -> usize {
            self.0
        }
        fn entries<S: Scalar>(&self, _q: &[S]) -> Vec<S> {
            let n = self.0;
            let mut v = vec![S::zero(); n * n];
            for i in 0..n {
                v[i * n + i] = S::one();
            }
            v
        }
    }

    /// Reduced conformal metric dx^2 + dy^2/(1+y^2) on the plane.
    struct PlaneCanonical;
    impl SmoothMatrix for PlaneCanonical {
        fn dim(&self) -> usize {
            2
        }
        fn entries<S: Scalar>(&self, q: &[S]) -> Vec<S> {
            let y = q[1];
            vec![
                S::one(),
                S::zero(),
                S::zero(),
                S::one() / (S::one() + y * y),
            ]
        }
    }

    #[test]
    fn euclidean_christoffels_vanish() {
        let g = MetricField::analytic(Euclid(3));
        let gamma = christoffel(&g, &[0.4, -0.2, 1.0]).unwrap();
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert_abs_diff_eq!(gamma.get(k, i, j), 0.0, epsilon = 1e-13);
                }
            }
        }
        let (_, acc) = geodesic_rhs(&g, &[0.0; 3], &[1.0, 2.0, 3.0]).unwrap();
        assert!(acc.iter().all(|a| a.abs() < 1e-13));
    }

    #[test]
    fn conformal_plane_christoffel() {
        // Gamma^y_{yy} = 1/2 g^{yy} d_y g_yy = -y/(1+y^2) = -0.5 at y = 1.
        let g = MetricField::analytic(PlaneCanonical);
        let gamma = christoffel(&g, &[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(gamma.get(1, 1, 1), -0.5, epsilon = 1e-12);
        // Restricted geodesic equation: ydd = y yd^2 / (1 + y^2).
        let (_, acc) = geodesic_rhs(&g, &[0.0, 1.0], &[0.0, 2.0]).unwrap();
        assert_abs_diff_eq!(acc[1], 1.0 * 4.0 / 2.0, epsilon = 1e-11);
    }

    #[test]
    fn gradient_in_flat_space() {
        let g = MetricField::analytic(Euclid(3));
        let f = ScalarField::new(3, |q| 0.5 * q[1] * q[1]);
        let gv = grad(&g, &f, &[0.0, 3.0, 0.0]).unwrap();
        assert_abs_diff_eq!(gv[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gv[1], 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(gv[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = MetricField::analytic(PlaneCanonical);
        let f = ScalarField::constant(2, 9.0);
        let gv = grad(&g, &f, &[0.3, 0.8]).unwrap();
        assert!(gv.iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn canonical_plane_gradient_of_conformal_factor() {
        // f = -1/2 ln(1+y^2); grad = g_can^{-1} df = (0, -(1+y^2) y/(1+y^2)) = (0, -y).
        let g = MetricField::analytic(PlaneCanonical);
        let f = ScalarField::new(2, |q| -0.5 * (1.0 + q[1] * q[1]).ln());
        let gv = grad(&g, &f, &[0.2, 1.0]).unwrap();
        assert_abs_diff_eq!(gv[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gv[1], -1.0, epsilon = 1e-9);
    }

    #[test]
    fn mechanical_rhs_reduces_to_geodesic_without_potential() {
        let g = MetricField::analytic(PlaneCanonical);
        let v0 = ScalarField::zero(2);
        let q = [0.1, 0.7];
        let v = [1.0, -2.0];
        let (_, a_geo) = geodesic_rhs(&g, &q, &v).unwrap();
        let (_, a_mech) = mechanical_rhs(&g, &v0, &q, &v).unwrap();
        for (a, b) in a_geo.iter().zip(&a_mech) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn flat_mechanical_rhs_is_minus_gradient() {
        let g = MetricField::analytic(Euclid(3));
        let pot = ScalarField::new(3, |q| 0.5 * q[1] * q[1]);
        let (_, acc) = mechanical_rhs(&g, &pot, &[0.0, 2.0, 0.0], &[0.0; 3]).unwrap();
        assert_abs_diff_eq!(acc[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(acc[1], -2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(acc[2], 0.0, epsilon = 1e-12);
    }
}
