//! Built-in example systems with analytic cross-check data.

pub mod builders;
pub mod crosschecks;
pub mod descriptor;

pub use builders::{
    build, corrupted_particle, principal_metric_exact_for, veselova_a_diag,
    veselova_gamma_point, BuiltSystem, DiskData, ParticleData, VeselovaData,
};
pub use crosschecks::{
    analytic_crosschecks, disk_principal_entries, particle_principal_entries, Crosschecks,
};
pub use descriptor::{PotentialKind, SystemDescriptor, SystemName};
