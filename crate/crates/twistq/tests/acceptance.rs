//! The acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with --nocapture) and asserting every contained check.

use twistq::report::ReportBundle;
use twistq::suite;

fn assert_bundle(criterion: &str, bundle: ReportBundle) {
    let ok = bundle.all_ok();
    println!(
        "[{}] {criterion} ({} checks)",
        if ok { "PASS" } else { "FAIL" },
        bundle.checks.len()
    );
    if !ok {
        println!("{}", bundle.render_lines());
    }
    assert!(ok, "{criterion} failed:\n{}", bundle.render_lines());
}

#[test]
fn criterion_01_determinants() {
    assert_bundle(
        "structure-constant determinants match closed forms, k = 1..4 per class",
        suite::criterion_determinants(),
    );
}

#[test]
fn criterion_02_presentations() {
    assert_bundle(
        "all four built-in modules satisfy every defining relation at N = 10",
        suite::criterion_presentations(),
    );
}

#[test]
fn criterion_03_phi_spectrum() {
    assert_bundle(
        "phi eigenvalue series equal the closed rational formula for i+j <= 8",
        suite::criterion_phi_spectrum(),
    );
}

#[test]
fn criterion_04_module_characters() {
    assert_bundle(
        "module-derived l-weight windows equal the closed-form characters to height 8",
        suite::criterion_module_characters(),
    );
}

#[test]
fn criterion_05_counterexamples() {
    assert_bundle(
        "dimension counterexample 6 vs 9; folded window differs; normalized windows agree",
        suite::criterion_counterexamples(),
    );
}

#[test]
fn criterion_06_qq_systems() {
    assert_bundle(
        "QQ~ systems hold exactly at every orbit, three parameters, height 6",
        suite::criterion_qq(),
    );
}

#[test]
fn criterion_07_tq_relation() {
    assert_bundle(
        "TQ relation matches the canonical template and balances at truncation 4",
        suite::criterion_tq(),
    );
}

#[test]
fn criterion_08_folding_instances() {
    assert_bundle(
        "normalized twisted characters equal folded normalized untwisted ones",
        suite::criterion_folding_instances(),
    );
}

#[test]
fn criterion_09_vanishing() {
    assert_bundle(
        "vanishing at highest-weight polynomial roots on the N = 10 windows",
        suite::criterion_vanishing(),
    );
}

#[test]
fn criterion_10_stabilization() {
    assert_bundle(
        "normalized KR windows are k-independent for k >= h+1, h <= 6",
        suite::criterion_stabilization(),
    );
}

#[test]
fn criterion_11_bethe_ansatz() {
    assert_bundle(
        "Bethe systems match their templates; numeric consistency exact at q0 = 5/4",
        suite::criterion_bae(),
    );
}
