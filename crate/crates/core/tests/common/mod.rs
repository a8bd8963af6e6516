//! Shared helpers for the integration suites: the finite-difference
//! derivative oracle (independent of the jet arithmetic it checks) and
//! random admissible surface generators.

use crtube::exprlang::{self, Expr};
use crtube::jets::Jet1;
use crtube::maparam::PQData;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Fourth-order central-difference stencil for one axis: offsets (in
/// steps) and weights (to be divided by h^order).
fn stencil(order: usize) -> Vec<(i32, f64)> {
    match order {
        0 => vec![(0, 1.0)],
        1 => vec![
            (-2, 1.0 / 12.0),
            (-1, -8.0 / 12.0),
            (1, 8.0 / 12.0),
            (2, -1.0 / 12.0),
        ],
        2 => vec![
            (-2, -1.0 / 12.0),
            (-1, 16.0 / 12.0),
            (0, -30.0 / 12.0),
            (1, 16.0 / 12.0),
            (2, -1.0 / 12.0),
        ],
        3 => vec![
            (-3, 1.0 / 8.0),
            (-2, -1.0),
            (-1, 13.0 / 8.0),
            (1, -13.0 / 8.0),
            (2, 1.0),
            (3, -1.0 / 8.0),
        ],
        _ => panic!("finite differences implemented for orders <= 3"),
    }
}

/// d^{i+j} f / dt1^i dt2^j at (t1, t2) by central differences of pointwise
/// evaluation, step h. Completely independent of jet arithmetic.
pub fn fd_partial2(expr: &Expr, t1: f64, t2: f64, i: usize, j: usize, h: f64) -> f64 {
    let mut total = 0.0;
    for &(di, wi) in &stencil(i) {
        for &(dj, wj) in &stencil(j) {
            let value = exprlang::eval_point2(expr, t1 + di as f64 * h, t2 + dj as f64 * h)
                .expect("oracle evaluation in domain");
            total += wi * wj * value;
        }
    }
    total / h.powi((i + j) as i32)
}

pub fn assert_rel_close(a: f64, b: f64, tol: f64, what: &str) {
    let scale = 1.0f64.max(a.abs()).max(b.abs());
    assert!(
        (a - b).abs() <= tol * scale,
        "{what}: {a} vs {b} (tol {tol}, scale {scale})"
    );
}

/// Random polynomial (p, q) jets satisfying the origin conditions, with
/// q' - w p'' bounded away from zero on |v|, |w| <= 0.15.
pub fn random_admissible_pq(rng: &mut ChaCha8Rng) -> PQData {
    let mut p = vec![0.0; 7];
    let mut q = vec![0.0; 7];
    p[1] = rng.gen_range(-0.5..0.5);
    p[2] = rng.gen_range(0.2..0.6); // p''(0) = 2 c2, kept positive
    for c in p.iter_mut().skip(3) {
        *c = rng.gen_range(-0.25..0.25);
    }
    q[1] = rng.gen_range(0.8..1.5);
    for c in q.iter_mut().skip(2) {
        *c = rng.gen_range(-0.2..0.2);
    }
    PQData {
        p: Jet1::from_coeffs(p),
        q: Jet1::from_coeffs(q),
        base_v: 0.0,
        integral_base: 0.0,
    }
}

/// Expression source for a polynomial with the given jet coefficients.
pub fn poly_expr_src(jet: &Jet1) -> String {
    let mut terms = vec![];
    for k in 0..=jet.degree() {
        let c = jet.coeff(k);
        if c != 0.0 {
            match k {
                0 => terms.push(format!("{c}")),
                1 => terms.push(format!("{c}*v")),
                _ => terms.push(format!("{c}*v^{k}")),
            }
        }
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}
