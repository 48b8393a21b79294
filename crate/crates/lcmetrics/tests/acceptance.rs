//! The acceptance suite: every promised numerical property, end to end,
//! one test (and one printed pass/fail line) per criterion. Run with
//! `cargo test --release --test acceptance -- --nocapture` to see the
//! lines; any failure carries the offending sub-checks in its message.

use lcmetrics::harness::verify;

fn run(f: fn() -> lcmetrics::Result<verify::CriterionOutcome>) {
    let outcome = f().expect("criterion ran");
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.detail);
}

#[test]
fn criterion_01_closed_form_oracles() {
    run(verify::closed_form_oracles);
}

#[test]
fn criterion_02_classical_inequalities() {
    run(verify::classical_inequalities);
}

#[test]
fn criterion_03_reversed_inequalities() {
    run(verify::reversed_inequalities);
}

#[test]
fn criterion_04_duality_consistency() {
    run(verify::duality_consistency);
}

#[test]
fn criterion_05_optimization_lemma() {
    run(verify::optimization_lemma);
}

#[test]
fn criterion_06_smoothing_gap() {
    run(verify::smoothing_gap);
}

#[test]
fn criterion_07_norm_concentration() {
    run(verify::norm_concentration);
}

#[test]
fn criterion_08_log_density_variance() {
    run(verify::log_density_variance);
}

#[test]
fn criterion_09_entropy_and_density_caps() {
    run(verify::entropy_and_density_caps);
}

#[test]
fn criterion_10_interpolation_convergence() {
    run(verify::interpolation_convergence);
}

#[test]
fn criterion_11_envelope_figure() {
    run(verify::envelope_figure);
}

#[test]
fn criterion_12_determinism() {
    run(verify::determinism);
}
