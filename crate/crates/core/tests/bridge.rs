//! Cross-oracle tests for the (p, q) parametrization bridge.
//!
//! The closed-form derivative expressions in the (v, w) chart and the jet
//! reconstruction of the defining function are algebraically independent
//! routes to the same values; their agreement on random admissible data
//! validates both.

mod common;

use common::{assert_rel_close, poly_expr_src, random_admissible_pq};
use crtube::maparam;
use crtube::surface::{self, SurfaceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn bridge_fields_match_jet_partials() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for surface_index in 0..10 {
        let pq = random_admissible_pq(&mut rng);
        for point_index in 0..30 {
            let v = rng.gen_range(-0.15..0.15);
            let w = rng.gen_range(-0.15..0.15);
            let bridge = maparam::vw_derivatives(&pq, v, w).unwrap();
            let point = maparam::pq_to_rho(&pq, v, w, 5).unwrap();
            let jet = &point.jet;
            let (s, s1) = surface::s_invariant(jet).unwrap();

            let label = format!("surface {surface_index}, point {point_index} at ({v}, {w})");
            assert_rel_close(bridge.rho11, jet.partial_value(2, 0).unwrap(), 1e-8, &label);
            assert_rel_close(bridge.rho12, jet.partial_value(1, 1).unwrap(), 1e-8, &label);
            assert_rel_close(bridge.rho111, jet.partial_value(3, 0).unwrap(), 1e-8, &label);
            assert_rel_close(bridge.rho4, jet.partial_value(4, 0).unwrap(), 1e-8, &label);
            assert_rel_close(bridge.rho5, jet.partial_value(5, 0).unwrap(), 1e-8, &label);
            assert_rel_close(bridge.s, s, 1e-8, &label);
            assert_rel_close(bridge.s1, s1, 1e-8, &label);
        }
    }
}

#[test]
fn monge_ampere_residual_vanishes_in_the_chart() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..10 {
        let pq = random_admissible_pq(&mut rng);
        for _ in 0..20 {
            let v = rng.gen_range(-0.15..0.15);
            let w = rng.gen_range(-0.15..0.15);
            let point = maparam::pq_to_rho(&pq, v, w, 5).unwrap();
            let residual = surface::ma_residual(&point.jet).unwrap();
            assert!(
                residual.abs() <= 1e-10,
                "MA residual {residual} at ({v}, {w})"
            );
        }
    }
}

#[test]
fn round_trip_recovers_pq_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for surface_index in 0..10 {
        let seed_pq = random_admissible_pq(&mut rng);
        // realize the pair as a parametric surface, then run the full
        // reconstruction: (p, q) -> rho jets -> series reversion -> (p, q)
        let spec = SurfaceSpec::parametric_src(
            &poly_expr_src(&seed_pq.p),
            &poly_expr_src(&seed_pq.q),
            (-0.2, 0.2),
        )
        .unwrap();
        let recovered = maparam::rho_to_pq(&spec, 5).unwrap();
        for k in 0..=5usize {
            assert!(
                (recovered.p.coeff(k) - seed_pq.p.coeff(k)).abs() <= 1e-9,
                "surface {surface_index}: p coefficient {k}: {} vs {}",
                recovered.p.coeff(k),
                seed_pq.p.coeff(k)
            );
            assert!(
                (recovered.q.coeff(k) - seed_pq.q.coeff(k)).abs() <= 1e-9,
                "surface {surface_index}: q coefficient {k}: {} vs {}",
                recovered.q.coeff(k),
                seed_pq.q.coeff(k)
            );
        }
    }
}

#[test]
fn explicit_round_trip_through_the_chart() {
    // explicit surface -> (p, q) -> chart reconstruction of rho jets must
    // reproduce the expression jets at matching base points
    let spec =
        SurfaceSpec::explicit_src("t1^2/(2*(1-t2))", (-0.2, 0.2), (-0.2, 0.2)).unwrap();
    let pq = maparam::rho_to_pq(&spec, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..20 {
        let v = rng.gen_range(-0.12..0.12);
        let w = rng.gen_range(-0.12..0.12);
        let point = maparam::pq_to_rho(&pq, v, w, 5).unwrap();
        let direct = spec.rho_jet((point.t1, point.t2), 5).unwrap();
        for d in 0..=5usize {
            for j in 0..=d {
                let i = d - j;
                assert!(
                    (point.jet.coeff(i, j) - direct.coeff(i, j)).abs() <= 1e-9,
                    "coefficient ({i},{j}) at chart point ({v},{w})"
                );
            }
        }
    }
}
