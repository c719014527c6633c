//! Numerical certification of the construction: trajectory equivalence,
//! relatedness of the rescaled fields, submersion structure, conservation
//! laws, and the local distance property.

pub mod checks;
pub mod report;
pub mod suite;

pub use checks::{
    check_distance, check_equivalence, check_psi_relatedness, constraint_violation_sup,
    principal_energy, relative_energy_drift, DistanceOutcome, EquivalenceOutcome,
};
pub use report::{CheckResult, VerificationReport};
pub use suite::{run_suite, run_suite_with, SuiteConfig, Tolerances};
