//! Library walkthrough: build a system, construct its principal metric,
//! integrate both dynamics and compare them through the predicted time map.

use chaplygin_core::chaplygin::{
    gyroscopic_tensor, principal_metric, recover_dphi, reduced_metric,
};
use chaplygin_core::systems::{build, SystemDescriptor, SystemName};
use chaplygin_core::verify::{check_equivalence, run_suite, SuiteConfig};

fn main() {
    let built = build(&SystemDescriptor::new(SystemName::NonholonomicParticle)).unwrap();
    let sys = &built.system;

    let base = [0.0, 1.0];
    println!("reduced metric at y = 1:\n{:?}", reduced_metric(sys, &base).unwrap());

    let tensor = gyroscopic_tensor(sys, &base).unwrap();
    let est = recover_dphi(&tensor, 1e-6).unwrap();
    println!("recovered d(phi) = {:?} (pattern residual {:.2e})", est.dphi, est.residual);

    let h = principal_metric(sys).unwrap();
    println!("principal metric at y = 1:\n{:?}", h.evaluate(&[0.0, 1.0, 0.0]).unwrap());

    let (q0, v0) = built.default_initial.clone();
    let out = check_equivalence(sys, &h, &q0, &v0, 5.0, 1e-3).unwrap();
    println!(
        "equivalence sup |gamma(tau(t)) - c(t)| = {:.3e} over T = 5",
        out.residual
    );

    let report = run_suite(&built, 7, &SuiteConfig::default());
    println!(
        "verification: {} checks, all passed: {}",
        report.checks.len(),
        report.all_passed
    );
}
