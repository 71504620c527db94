//! Full-scale acceptance checks. Each test prints one PASS/FAIL line.

use std::io::Write;

use wildtree::harness::checks::{self, CheckOutcome, CheckScale};
use wildtree::rng::derive_id;
use wildtree::Execution;

const SEED: u64 = 1;

// Written to the process stdout directly so the line shows even when the
// test harness captures output.
fn report(outcome: CheckOutcome) {
    let _ = writeln!(std::io::stdout().lock(), "{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

fn seed(id: u64) -> u64 {
    derive_id(SEED, id)
}

#[test]
fn acceptance_01_collision_conservation() {
    report(checks::collision_conservation(&CheckScale::full(), seed(1), Execution::Parallel));
}

#[test]
fn acceptance_02_post_collision_energy_moment() {
    report(checks::sigma_moment_identity(&CheckScale::full(), seed(2), Execution::Parallel));
}

#[test]
fn acceptance_03_weighted_moment_conservation() {
    report(checks::weighted_moments(&CheckScale::full(), seed(3), Execution::Parallel));
}

#[test]
fn acceptance_04_counter_bound_and_no_jump_probability() {
    report(checks::counter_checks(&CheckScale::full(), seed(4), Execution::Parallel));
}

#[test]
fn acceptance_05_maxwellian_sampler_triangle() {
    report(checks::maxwell_triangle(&CheckScale::full(), seed(5), Execution::Parallel));
}

#[test]
fn acceptance_06_wild_truncation_identity() {
    report(checks::wild_truncation());
}

#[test]
fn acceptance_07_series_consistency() {
    report(checks::series_consistency(&CheckScale::full(), seed(7), Execution::Parallel));
}

#[test]
fn acceptance_08_oracle_agreement() {
    report(checks::oracle_agreement(&CheckScale::full(), seed(8), Execution::Parallel));
}

#[test]
fn acceptance_09_tree_enumeration_and_codec() {
    report(checks::tree_codec());
}

#[test]
fn acceptance_10_rerun_determinism() {
    report(checks::rerun_determinism(seed(10)));
}
