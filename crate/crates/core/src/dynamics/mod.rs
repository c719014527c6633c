//! Trajectory integration and the predicted time reparametrization.

pub mod integrate;
pub mod lda;
pub mod time_map;
pub mod trajectory;

pub use integrate::{
    integrate_geodesic, integrate_mechanical, integrate_nonholonomic, nonholonomic_acceleration,
    PROJECTION_TOLERANCE,
};
pub use lda::{lda_rhs, lda_rhs_with_tolerance, LdaSolveResult, CONSTRAINT_TOLERANCE};
pub use time_map::{time_map, time_map_with_phi, TimeMap};
pub use trajectory::{State, Trajectory, TrajectoryMeta};
