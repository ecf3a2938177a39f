//! The verification ladder as an integration test target: one test per
//! check, each printing its one-line report (visible with --nocapture)
//! and failing if the check or its wall-clock budget fails.

use vorlink_core::acceptance::*;

const SEED: u64 = 7;

fn assert_criterion(r: CriterionResult) {
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn criterion_01_metric_exactness_holds() {
    assert_criterion(criterion_01_metric_exactness(SEED));
}

#[test]
fn criterion_02_lattice_oracle_agreement_holds() {
    assert_criterion(criterion_02_lattice_oracle_agreement(SEED));
}

#[test]
fn criterion_03_pseudometric_identities_hold() {
    assert_criterion(criterion_03_pseudometric_identities(SEED));
}

#[test]
fn criterion_04_assignment_duality_holds() {
    assert_criterion(criterion_04_assignment_duality(SEED));
}

#[test]
fn criterion_05_structure_certificates_hold() {
    assert_criterion(criterion_05_structure_certificates(SEED));
}

#[test]
fn criterion_06_coarea_lower_bound_holds() {
    assert_criterion(criterion_06_coarea_lower_bound(SEED));
}

#[test]
fn criterion_07_radial_profile_holds() {
    assert_criterion(criterion_07_radial_profile(SEED));
}

#[test]
fn criterion_08_energy_decoupling_holds() {
    assert_criterion(criterion_08_energy_decoupling(SEED));
}

#[test]
fn criterion_09_symmetric_energy_slope_holds() {
    assert_criterion(criterion_09_symmetric_energy_slope(SEED));
}

#[test]
fn criterion_10_curved_link_energy_slope_holds() {
    assert_criterion(criterion_10_curved_link_energy_slope(SEED));
}

#[test]
fn criterion_11_dumbbell_function_holds() {
    assert_criterion(criterion_11_dumbbell_function(SEED));
}
