//! Bundle-adapted Chaplygin structure: horizontal lifts, the reduced metric,
//! the gyroscopic tensor, recovery of the conformal exponent, and the
//! canonical and principal metrics built from them.

pub mod gyroscopic;
pub mod metrics;
pub mod system;

pub use gyroscopic::{
    dphi_curl, gyroscopic_at_point, gyroscopic_tensor, phi_simplicity_residual, recover_dphi,
    recover_phi, recovered_dphi_at, DphiEstimate, GyroscopicField, RecoverOptions,
    CLOSEDNESS_THRESHOLD, PHI_SIMPLE_THRESHOLD,
};
pub use metrics::{
    canonical_metric, phi_field, principal_metric, principal_metric_exact, PrincipalEntries,
    ScalarBundleData,
};
pub use system::{
    coordinate_lifts, horizontal_lift, reduced_metric, reduced_metric_at_point, BundleSystem,
};
