//! Finite-difference cross-check: jet coefficients against central
//! differences of plain pointwise evaluation. The oracle never touches jet
//! arithmetic, so agreement validates the whole differential engine.

mod common;

use common::fd_partial2;
use crtube::exprlang::{self, Expr, VarSet};

const STEP: f64 = 1e-3;
const REL_TOL: f64 = 1e-6;

fn check_expr_at(src: &str, points: &[(f64, f64)]) {
    let expr = Expr::parse(src, VarSet::Bivariate).unwrap();
    for &(t1, t2) in points {
        let jet = exprlang::eval_jet2(&expr, (t1, t2), 3).unwrap();
        for i in 0..=3usize {
            for j in 0..=(3 - i) {
                let from_jet = jet.partial_value(i, j).unwrap();
                let from_fd = fd_partial2(&expr, t1, t2, i, j, STEP);
                let scale = 1.0f64.max(from_jet.abs()).max(from_fd.abs());
                assert!(
                    (from_jet - from_fd).abs() <= REL_TOL * scale,
                    "{src} at ({t1},{t2}), order ({i},{j}): jet {from_jet} vs fd {from_fd}"
                );
            }
        }
    }
}

#[test]
fn flat_example_matches_finite_differences() {
    check_expr_at(
        "t1^2/(2*(1-t2))",
        &[(0.0, 0.0), (0.1, -0.15), (-0.2, 0.2), (0.17, 0.03)],
    );
}

#[test]
fn expression_corpus_matches_finite_differences() {
    // the explicit closed forms appearing across the surface families,
    // plus assorted expression-language features
    check_expr_at("t1^2/(2*(1-t2)-t1)", &[(0.0, 0.0), (0.1, -0.1), (-0.15, 0.12)]);
    check_expr_at("t1^2 + t2^2", &[(0.0, 0.0), (0.3, -0.4)]);
    check_expr_at(
        "sqrt(4 + t1 - t2) * pow(2 + t2, -2/3)",
        &[(0.0, 0.0), (0.2, 0.1), (-0.3, -0.2)],
    );
    check_expr_at("(1 + t1)^3 - t2^2/(2 - t1)", &[(0.0, 0.0), (0.25, -0.3)]);
    check_expr_at("-t1^3 + t1*t2 - 0.5*t2^3", &[(0.1, 0.2), (-0.2, 0.15)]);
}

#[test]
fn univariate_generators_match_finite_differences() {
    // p and q of the generated flat families, viewed through the bivariate
    // oracle in the t1 slot with t2 unused
    for src in [
        "t1/2 + 1/(2*(1+t1)) - 1/2",
        "1/2 - 1/(2*(1+t1)^2)",
        "-4*sqrt(1+t1) + 2*t1 + 4",
        "2 - 2*pow(1+t1, -1/2)",
        "sqrt(t1^2 + 1) - 1",
        "t1 * pow(t1^2 + 1, -1/2)",
    ] {
        check_expr_at(src, &[(0.0, 0.0), (0.12, 0.0), (-0.15, 0.0)]);
    }
}
