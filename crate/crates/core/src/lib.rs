//! Construction and verification of principal Riemannian metrics for
//! conformally Hamiltonizable Chaplygin systems.
//!
//! Given a nonholonomic system with kinematic symmetry in a bundle-adapted
//! chart, the crate recovers the conformal exponent from the gyroscopic
//! tensor, builds the conformally rescaled reduced metric and the principal
//! metric on the total space, and certifies numerically — by independent
//! integration paths — that geodesics (or mechanical trajectories) of the
//! new metric started inside the constraint distribution are time
//! reparametrizations of the constrained trajectories.

pub mod chaplygin;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod systems;
pub mod verify;

pub use error::{Error, Result};
