//! End-to-end classification of the closed-form flat families and the
//! soundness of the gates against the curvature invariants.

mod common;

use crtube::curvature::{self, SampleOutcome};
use crtube::flatness::{self, generators, CaseTag, GateStage, Verdict};
use crtube::maparam;
use crtube::surface::SurfaceSpec;

fn assert_flat_family(spec: &SurfaceSpec, expected: CaseTag, name: &str) {
    let result = flatness::classify(spec, 1e-8).unwrap();
    assert_eq!(result.verdict, Verdict::Flat, "{name} must classify flat");
    assert_eq!(result.case, Some(expected), "{name} case tag");
    let reconstruction = result.reconstruction_residual.unwrap();
    assert!(
        reconstruction <= 1e-8,
        "{name}: reconstruction residual {reconstruction}"
    );
    let verification = result.verify_residual.unwrap();
    assert!(
        verification <= 1e-8,
        "{name}: affine verification residual {verification}"
    );
    let map = result.affine_map.unwrap();
    assert!(map.det().abs() > 1e-6, "{name}: affine map must be invertible");
}

#[test]
fn case1_family_end_to_end() {
    assert_flat_family(&generators::case1(), CaseTag::Case1, "case1");
}

#[test]
fn case1_scaled_family_end_to_end() {
    assert_flat_family(
        &generators::case1_with(2.0, 1.5, 0.3),
        CaseTag::Case1,
        "case1 (scaled)",
    );
}

#[test]
fn case2_family_end_to_end() {
    let result = flatness::classify(&generators::case2(), 1e-8).unwrap();
    assert_eq!(result.verdict, Verdict::Flat);
    assert_eq!(result.case, Some(CaseTag::Case2));
    assert!((result.c1.unwrap() - 1.0).abs() < 1e-7);
    assert!((result.c2.unwrap() - 2.0).abs() < 1e-8);
    assert!((result.c3.unwrap() - 1.0).abs() < 1e-9);
    assert!(result.delta.unwrap().abs() < 1e-7);
    assert!(result.verify_residual.unwrap() <= 1e-8);
    assert!(result.reconstruction_residual.unwrap() <= 1e-8);
}

#[test]
fn case3a_family_end_to_end() {
    let result = flatness::classify(&generators::case3a(), 1e-8).unwrap();
    assert_eq!(result.verdict, Verdict::Flat);
    assert_eq!(result.case, Some(CaseTag::Case3C1Zero));
    assert!((result.delta.unwrap() - 1.0).abs() < 1e-7);
    assert!(result.verify_residual.unwrap() <= 1e-8);
    assert!(result.reconstruction_residual.unwrap() <= 1e-8);
}

#[test]
fn case3b_family_end_to_end() {
    let result = flatness::classify(&generators::case3b(), 1e-8).unwrap();
    assert_eq!(result.verdict, Verdict::Flat);
    assert_eq!(result.case, Some(CaseTag::Case3C1Nonzero));
    assert!((result.delta.unwrap() + 4.0).abs() < 1e-7);
    assert!(result.verify_residual.unwrap() <= 1e-8);
    assert!(result.reconstruction_residual.unwrap() <= 1e-8);
}

#[test]
fn explicit_case3a_closed_form_classifies() {
    // the same surface as the case3a generator, but given explicitly
    let spec =
        SurfaceSpec::explicit_src("t1^2/(2*(1-t2)-t1)", (-0.15, 0.15), (-0.15, 0.15)).unwrap();
    let result = flatness::classify(&spec, 1e-8).unwrap();
    assert_eq!(result.verdict, Verdict::Flat, "verdict: {:?}", result.verdict);
    assert_eq!(result.case, Some(CaseTag::Case3C1Zero));
    assert!((result.c.unwrap() - 1.0).abs() < 1e-8);
    assert!(result.d.unwrap().abs() < 1e-8);
    assert!(result.verify_residual.unwrap() <= 1e-8);
}

#[test]
fn generator_seeds_round_trip() {
    for (spec, seeds) in [
        (generators::case1(), (0.0, 0.0, 1.0)),
        (generators::case2(), (1.0, 2.0, 1.0)),
        (generators::case3a(), (0.0, 1.0, 1.0)),
        (generators::case3b(), (1.0, 0.0, 1.0)),
    ] {
        let samples = flatness::sample_pq(&spec, 9).unwrap();
        let (c, _) = flatness::recover_relation(&samples, 1e-7).unwrap();
        let (c1, c2, c3, _) = flatness::recover_quadratic(&samples, c, 1e-7).unwrap();
        assert!((c1 - seeds.0).abs() <= 1e-8, "c1 {c1} vs seed {}", seeds.0);
        assert!((c2 - seeds.1).abs() <= 1e-8, "c2 {c2} vs seed {}", seeds.1);
        assert!((c3 - seeds.2).abs() <= 1e-8, "c3 {c3} vs seed {}", seeds.2);
    }
}

#[test]
fn flat_verdict_implies_vanishing_curvature() {
    for spec in [
        generators::case1(),
        generators::case2(),
        generators::case3a(),
        generators::case3b(),
    ] {
        let result = flatness::classify(&spec, 1e-8).unwrap();
        assert_eq!(result.verdict, Verdict::Flat);
        for outcome in curvature::sample_grid(&spec, 9, 9, 1e-8).unwrap() {
            match outcome {
                SampleOutcome::Sample(sample) => {
                    assert!(sample.theta2_21.abs() <= 1e-8);
                    assert!(sample.theta2_10.abs() <= 1e-8);
                }
                SampleOutcome::Failed { error, .. } => panic!("{error}"),
            }
        }
    }
}

#[test]
fn r1_rejection_is_witnessed_by_curvature() {
    let spec = SurfaceSpec::parametric_src("v^2/2 + v^3/6", "v", (-0.2, 0.2)).unwrap();
    let result = flatness::classify(&spec, 1e-8).unwrap();
    let Verdict::NotFlat { stage, .. } = result.verdict else {
        panic!("cubic witness misclassified as flat");
    };
    assert_eq!(stage, GateStage::R1);
    // somewhere on the grid the first curvature coefficient must be visibly
    // nonzero
    let mut max_theta: f64 = 0.0;
    for outcome in curvature::sample_grid(&spec, 9, 9, 1e-8).unwrap() {
        if let SampleOutcome::Sample(sample) = outcome {
            max_theta = max_theta.max(sample.theta2_21.abs());
        }
    }
    assert!(max_theta > 1e-3, "max |theta2_21| = {max_theta}");
}

#[test]
fn reconstruction_matches_lemma_for_all_families() {
    // rebuilt defining function against the surface itself, evaluated off
    // the sampling pattern used by classify
    for (name, spec) in [
        ("case2", generators::case2()),
        ("case3b", generators::case3b()),
    ] {
        let samples = flatness::sample_pq(&spec, 9).unwrap();
        let (c, d) = flatness::recover_relation(&samples, 1e-7).unwrap();
        let reconstruction = flatness::chi_reconstruct(&spec, &samples[0], c, d).unwrap();
        let crtube::surface::SurfaceKind::Parametric { p, q } = &spec.kind else {
            unreachable!()
        };
        for &v in &[-0.11, -0.04, 0.06, 0.13] {
            for &w in &[-0.12, 0.02, 0.09] {
                let pq = maparam::pq_from_exprs(p, q, v, 5).unwrap();
                let point = maparam::pq_to_rho(&pq, v, w, 5).unwrap();
                let rebuilt = reconstruction.rho_eval(point.t1, point.t2).unwrap();
                assert!(
                    (rebuilt - point.rho).abs() <= 1e-9,
                    "{name}: {} vs {} at ({}, {})",
                    rebuilt,
                    point.rho,
                    point.t1,
                    point.t2
                );
            }
        }
    }
}
