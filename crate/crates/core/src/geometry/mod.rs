//! Differential-geometric layer: metric fields, distributions, Levi-Civita
//! data, projections, gradients and curve lengths.

pub mod connection;
pub mod distribution;
pub mod length;
pub mod metric;
pub mod scalar_field;

pub use connection::{christoffel, geodesic_rhs, grad, mechanical_rhs, Christoffel};
pub use distribution::{project_g, project_g_span, CoordField, Distribution};
pub use length::curve_length;
pub use metric::{Analytic, DiffMode, MatrixField, MetricField, SmoothMatrix};
pub use scalar_field::ScalarField;
