//! One test per end-to-end check; each prints its pass/fail line so a
//! full run reads as a report.

use spinnet::acceptance::{self, CheckResult};

fn report(name: &str, r: CheckResult) {
    match r {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(detail) => panic!("FAIL {name}: {detail}"),
    }
}

#[test]
fn state_sum_vs_curve_sum() {
    report(
        "state sum vs curve-sum evaluation",
        acceptance::check_state_sum(),
    );
}

#[test]
fn theta_and_sixj_closed_forms() {
    report(
        "theta and 6j closed forms",
        acceptance::check_closed_forms(),
    );
}

#[test]
fn generating_function_coefficients() {
    report(
        "generating function coefficients",
        acceptance::check_series_coefficients(),
    );
}

#[test]
fn cayley_menger_determinants() {
    report(
        "Cayley-Menger determinants",
        acceptance::check_geometry_constants(),
    );
}

#[test]
fn growth_rates() {
    report("growth rates", acceptance::check_growth_rates());
}

#[test]
fn formal_series_coefficients() {
    report(
        "formal series coefficients",
        acceptance::check_formal_series(),
    );
}

#[test]
fn recurrence_pipeline() {
    report(
        "recurrence pipeline",
        acceptance::check_recurrence_pipeline(),
    );
}

#[test]
fn leading_order_numerics() {
    report(
        "leading-order numerics",
        acceptance::check_leading_numerics(),
    );
}

#[test]
fn spectral_radius_estimates() {
    report(
        "spectral radius estimates",
        acceptance::check_spectral_radius(),
    );
}

#[test]
fn flip_signs_and_subdivision() {
    report(
        "flip signs and subdivision",
        acceptance::check_sign_lemmas(),
    );
}

#[test]
fn drum_and_k33_families() {
    report("drum and k33 families", acceptance::check_family_formulas());
}
