//! Full-scale acceptance suite: one test per numbered criterion, each
//! printing its pass/fail line with the measured quantities.

use ein_causal::selftest::{run_criterion, Scale};

fn run(index: usize) {
    let r = run_criterion(index, Scale::Full);
    println!("{}", render(&r));
    assert!(r.passed, "{}", render(&r));
}

fn render(r: &ein_causal::selftest::CriterionResult) -> String {
    format!(
        "criterion {:02} {} {}: {}",
        r.index,
        if r.passed { "PASS" } else { "FAIL" },
        r.name,
        r.details
    )
}

#[test]
fn criterion_01_causal_formula_oracle_equivalence() {
    run(1);
}

#[test]
fn criterion_02_refocusing_at_conjugate_points() {
    run(2);
}

#[test]
fn criterion_03_sigma_squared_equals_delta() {
    run(3);
}

#[test]
fn criterion_04_liouville_round_trip() {
    run(4);
}

#[test]
fn criterion_05_penrose_embedding_conformality() {
    run(5);
}

#[test]
fn criterion_06_compact_cauchy_boundary_of_past() {
    run(6);
}

#[test]
fn criterion_07_limit_curve_extraction() {
    run(7);
}

#[test]
fn criterion_08_domain_suite() {
    run(8);
}

#[test]
fn criterion_09_expansion_of_the_sphere_projection() {
    run(9);
}

#[test]
fn criterion_10_total_viciousness_of_the_compact_model() {
    run(10);
}

#[test]
fn criterion_11_byte_identical_determinism() {
    run(11);
}
