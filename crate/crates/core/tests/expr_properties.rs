//! Property checks of the parser and the jet arithmetic, plus agreement with
//! a high-precision finite-difference oracle.

mod support;

use proptest::prelude::*;
use support::properties;
use wagner_core::expr::MAX_ORDER;
use wagner_core::{eval_jet, parse, Point};

fn point() -> impl Strategy<Value = Point> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Point::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn product_rule(fs in any::<u64>(), gs in any::<u64>(), x in point()) {
        properties::product_rule(fs, gs, x).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn chain_rule(fs in any::<u64>(), x in point()) {
        properties::chain_rule(fs, x).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn polynomials_are_exact(coeffs in prop::collection::vec(-3.0..3.0f64, 15), x in point()) {
        properties::polynomial_exact(&coeffs, x).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn fuzz_never_panics(text in "[-+*/^() .,0-9a-z]{0,40}", x in point(), order in 0usize..6) {
        properties::fuzz(&text, x, order).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn display_round_trips(s in any::<u64>()) {
        let e = properties::expression(s);
        prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
    }
}

#[test]
fn jets_match_finite_differences() {
    let worst = properties::finite_difference_agreement(50, 2024).unwrap();
    // the oracle is far more accurate than the 1e-5 requirement
    assert!(worst < 1e-9, "{worst:e}");
}

#[test]
fn domain_errors_are_reported() {
    let x = Point::new(-0.5, 0.5);
    for text in ["log(x1)", "sqrt(x1)", "1 / (x1 + 0.5)", "x1^0.5"] {
        assert!(eval_jet(&parse(text).unwrap(), x, 2).is_err(), "{text}");
    }
}

#[test]
fn tanh_saturates_without_overflow() {
    let j = eval_jet(
        &parse("tanh(1000 * x1)").unwrap(),
        Point::new(1.0, 0.0),
        MAX_ORDER,
    )
    .unwrap();
    assert!(j.is_finite());
    assert_eq!(j.value(), 1.0);
    assert!(j.derivatives()[1..].iter().all(|d| d.abs() < 1e-300));
}
