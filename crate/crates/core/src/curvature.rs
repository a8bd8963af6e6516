//! CR-curvature coefficients of a tube hypersurface.
//!
//! The curvature of the canonical connection has one distinguished
//! component whose expansion coefficients control flatness. Two scalar
//! coefficients evaluated on the unit section of the bundle (fiber
//! coordinates `u = 1, a = 1, b = 0, lambda = 0`) decide everything:
//!
//! - `theta2_21`: built from first derivatives of `S1 / (sqrt(rho11) S)`
//!   and `rho111 / rho11^(3/2)` along the base;
//! - `theta2_10`: a rational expression in `rho11, rho111, rho4, rho5`.
//!
//! Both vanish identically exactly when the surface is CR-flat, i.e.
//! locally affinely equivalent to the tube over the future light cone. The
//! general fiber-level coefficients (arbitrary `u, a, b, lambda`) and the
//! normalization parameters `c, f, g, r` they determine are evaluated in
//! complex arithmetic; on tube input at the unit section they are real,
//! which the tests assert rather than assume.
//!
//! All derivatives are taken by jet arithmetic, never finite differences;
//! the finite-difference oracle lives in the test suite only.

use crate::error::{Error, Result};
use crate::jets::{Axis, Jet2};
use crate::surface::{self, SurfaceSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A point of the structure-bundle fiber over a base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPoint {
    /// Scaling coordinate, positive.
    pub u: f64,
    /// Rotation coordinate, unit modulus.
    pub a: Complex64,
    /// Translation coordinate.
    pub b: Complex64,
    /// Purely imaginary coordinate.
    pub lambda: Complex64,
}

impl FiberPoint {
    pub fn new(u: f64, a: Complex64, b: Complex64, lambda: Complex64) -> Result<FiberPoint> {
        if u <= 0.0 {
            return Err(Error::PreconditionFailed(format!(
                "fiber coordinate u = {u} must be positive"
            )));
        }
        if (a.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::PreconditionFailed(format!(
                "fiber coordinate a must have unit modulus, |a| = {}",
                a.norm()
            )));
        }
        if lambda.re.abs() > 1e-12 {
            return Err(Error::PreconditionFailed(format!(
                "fiber coordinate lambda must be purely imaginary, Re = {}",
                lambda.re
            )));
        }
        Ok(FiberPoint { u, a, b, lambda })
    }

    /// The unit section: u = 1, a = 1, b = 0, lambda = 0.
    pub fn gamma0() -> FiberPoint {
        FiberPoint {
            u: 1.0,
            a: Complex64::new(1.0, 0.0),
            b: Complex64::ZERO,
            lambda: Complex64::ZERO,
        }
    }
}

/// Fiber-level curvature coefficients and the normalization parameters
/// fixed by them.
///
/// The linear relations are `c = theta21_2_1bar / 3`,
/// `f = -theta22_1_1bar / 2`, `g = -phi23_1_1bar / 2`,
/// `r = -(2/3) phi14_1_1bar`. All values are kept complex; imaginary parts
/// are reported, not forced away.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberCoefficients {
    pub theta21_2_1bar: Complex64,
    pub theta22_1_1bar: Complex64,
    pub phi23_1_1bar: Complex64,
    pub phi14_1_1bar: Complex64,
    pub c: Complex64,
    pub f: Complex64,
    pub g: Complex64,
    pub r: Complex64,
}

/// Values of the scalar invariants needed by the fiber formulas.
struct BaseScalars {
    rho11: f64,
    rho111: f64,
    rho4: f64,
    s: f64,
    s1: f64,
}

fn base_scalars(jet: &Jet2) -> Result<BaseScalars> {
    if jet.degree() < 4 {
        return Err(Error::DegreeExhausted {
            needed: 4,
            have: jet.degree(),
        });
    }
    let (s, s1) = surface::s_invariant(jet)?;
    Ok(BaseScalars {
        rho11: jet.partial_value(2, 0)?,
        rho111: jet.partial_value(3, 0)?,
        rho4: jet.partial_value(4, 0)?,
        s,
        s1,
    })
}

/// Evaluate the four fiber-level coefficients and derive c, f, g, r.
///
/// Requires `rho11 > 0` and `S != 0` at the jet's base point.
pub fn fiber_coefficients(jet: &Jet2, fiber: &FiberPoint) -> Result<FiberCoefficients> {
    let base = base_scalars(jet)?;
    if base.rho11 <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "rho11 = {} must be positive",
            base.rho11
        )));
    }
    if base.s == 0.0 {
        return Err(Error::PreconditionFailed("S vanishes at the base point".into()));
    }

    let u = fiber.u;
    let a = fiber.a;
    let b = fiber.b;
    let lambda = fiber.lambda;
    let bb = b.conj();
    let ab = a.conj();

    let sqrt_u_r11 = (u * base.rho11).sqrt();
    let sqrt_u_r11_cubed = (u * base.rho11.powi(3)).sqrt();
    let u_r11_sq = u * base.rho11 * base.rho11;
    let u_r11_cubed = u * base.rho11.powi(3);

    let theta21_2_1bar = -a * base.s1 / (sqrt_u_r11 * base.s)
        + a * base.rho111 / sqrt_u_r11_cubed
        + 3.0 * bb;

    let theta22_1_1bar = a * a * base.rho4 / (3.0 * u_r11_sq)
        + 2.0 * a * bb * base.rho111 / (3.0 * sqrt_u_r11_cubed)
        - 4.0 * a * a * base.rho111 * base.rho111 / (9.0 * u_r11_cubed)
        + bb * bb;

    let phi23_1_1bar = base.rho4 / (3.0 * u_r11_sq)
        + a * b * base.rho111 / (3.0 * sqrt_u_r11_cubed)
        + ab * bb * base.rho111 / (3.0 * sqrt_u_r11_cubed)
        - 4.0 * base.rho111 * base.rho111 / (9.0 * u_r11_cubed)
        + (b * bb).re;

    let phi14_1_1bar = (4.0 * a * a * b - a * b - ab * bb - 2.0 * bb) * base.rho4
        / (6.0 * u_r11_sq)
        - (11.0 * a * a * b - 3.0 * a * b - 3.0 * ab * bb - 5.0 * bb) * base.rho111
            * base.rho111
            / (12.0 * u_r11_cubed)
        + (a * (b * bb).re - ab * bb * bb) * base.rho111 / (4.0 * sqrt_u_r11_cubed)
        - 1.5 * lambda * bb;

    Ok(FiberCoefficients {
        theta21_2_1bar,
        theta22_1_1bar,
        phi23_1_1bar,
        phi14_1_1bar,
        c: theta21_2_1bar / 3.0,
        f: -theta22_1_1bar / 2.0,
        g: -phi23_1_1bar / 2.0,
        r: -(2.0 / 3.0) * phi14_1_1bar,
    })
}

/// Shared intermediate values for the section-level coefficient and its
/// cleared-denominator form.
struct Theta21Parts {
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    s: f64,
    s1: f64,
    rho11: f64,
    rho12: f64,
    rho111: f64,
}

fn theta21_parts(jet: &Jet2) -> Result<Theta21Parts> {
    if jet.degree() < 5 {
        return Err(Error::DegreeExhausted {
            needed: 5,
            have: jet.degree(),
        });
    }
    let r11 = jet.partial(Axis::T1)?.partial(Axis::T1)?;
    let r12 = jet.partial(Axis::T1)?.partial(Axis::T2)?;
    let rho11 = r11.value();
    let rho12 = r12.value();
    if rho11 <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "rho11 = {rho11} must be positive"
        )));
    }
    let r111 = r11.partial(Axis::T1)?;
    let s_jet = r12.div(&r11)?.partial(Axis::T1)?;
    let s1_jet = s_jet.partial(Axis::T1)?;
    let s = s_jet.value();
    let s1 = s1_jet.value();
    if s == 0.0 {
        return Err(Error::PreconditionFailed("S vanishes at the base point".into()));
    }

    // A = S1 / (sqrt(rho11) S), differentiated once in each base direction
    let sqrt_r11 = r11.pow_real(0.5)?;
    let denom = sqrt_r11.truncate(1).mul(&s_jet.truncate(1))?;
    let a_jet = s1_jet.div(&denom)?;
    let a1 = a_jet.partial(Axis::T1)?.value();
    let a2 = a_jet.partial(Axis::T2)?.value();

    // B = rho111 / rho11^(3/2)
    let b_jet = r111.div(&r11.pow_real(1.5)?.truncate(2))?;
    let b1 = b_jet.partial(Axis::T1)?.value();
    let b2 = b_jet.partial(Axis::T2)?.value();

    Ok(Theta21Parts {
        a1,
        a2,
        b1,
        b2,
        s,
        s1,
        rho11,
        rho12,
        rho111: r111.value(),
    })
}

/// The (2,1) curvature coefficient on the unit section.
///
/// Real on tube input; vanishes identically iff `S1` does.
pub fn theta2_21_gamma0(jet: &Jet2) -> Result<f64> {
    let p = theta21_parts(jet)?;
    let ratio = p.rho12 / p.rho11;
    Ok((ratio * p.a1 - p.a2) / (3.0 * p.s) - (ratio * p.b1 - p.b2) / (3.0 * p.s)
        - 11.0 * p.s1 / (6.0 * p.rho11.sqrt() * p.s)
        - p.rho111 / (6.0 * p.rho11.powf(1.5)))
}

/// The (2,1) coefficient with denominators cleared:
/// `6 S rho11^(3/2)` times [`theta2_21_gamma0`], written out directly.
pub fn pde_residual_theta21(jet: &Jet2) -> Result<f64> {
    let p = theta21_parts(jet)?;
    let two_sqrt = 2.0 * p.rho11.sqrt();
    Ok(two_sqrt * (p.rho12 * p.a1 - p.rho11 * p.a2)
        - two_sqrt * (p.rho12 * p.b1 - p.rho11 * p.b2)
        - 11.0 * p.s1 * p.rho11
        - p.s * p.rho111)
}

/// The (1,0) curvature coefficient on the unit section:
/// `rho5 / (6 rho11^(5/2)) - 5 rho4 rho111 / (6 rho11^(7/2))
///  + 20 rho111^3 / (27 rho11^(9/2))`.
pub fn theta2_10_gamma0(jet: &Jet2) -> Result<f64> {
    if jet.degree() < 5 {
        return Err(Error::DegreeExhausted {
            needed: 5,
            have: jet.degree(),
        });
    }
    let rho11 = jet.partial_value(2, 0)?;
    if rho11 <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "rho11 = {rho11} must be positive"
        )));
    }
    let rho111 = jet.partial_value(3, 0)?;
    let rho4 = jet.partial_value(4, 0)?;
    let rho5 = jet.partial_value(5, 0)?;
    Ok(rho5 / (6.0 * rho11.powf(2.5)) - 5.0 * rho4 * rho111 / (6.0 * rho11.powf(3.5))
        + 20.0 * rho111.powi(3) / (27.0 * rho11.powf(4.5)))
}

/// The (1,0) coefficient with denominators cleared:
/// `9 rho5 rho11^2 - 45 rho4 rho111 rho11 + 40 rho111^3`,
/// equal to `54 rho11^(9/2)` times [`theta2_10_gamma0`].
pub fn ode_residual_theta10(jet: &Jet2) -> Result<f64> {
    if jet.degree() < 5 {
        return Err(Error::DegreeExhausted {
            needed: 5,
            have: jet.degree(),
        });
    }
    let rho11 = jet.partial_value(2, 0)?;
    let rho111 = jet.partial_value(3, 0)?;
    let rho4 = jet.partial_value(4, 0)?;
    let rho5 = jet.partial_value(5, 0)?;
    Ok(9.0 * rho5 * rho11 * rho11 - 45.0 * rho4 * rho111 * rho11 + 40.0 * rho111.powi(3))
}

// ---------------------------------------------------------------------------
// Grid sampling
// ---------------------------------------------------------------------------

/// Per-point invariant values over the sample grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub t1: f64,
    pub t2: f64,
    pub ma_residual: f64,
    pub rho11: f64,
    pub s: f64,
    pub s1: f64,
    pub theta2_21: f64,
    pub theta2_10: f64,
    pub flat_here: bool,
}

/// A grid entry: either a sample or an explicit per-point failure
/// (never NaN in reports).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleOutcome {
    Sample(CurvatureSample),
    Failed { t1: f64, t2: f64, error: String },
}

/// Evaluate the curvature invariants at a single base point of a surface.
pub fn sample_at(spec: &SurfaceSpec, t1: f64, t2: f64, tol: f64) -> Result<CurvatureSample> {
    let jet = spec.rho_jet((t1, t2), 5).map_err(|e| e.at_point(t1, t2))?;
    let ma = surface::ma_residual(&jet)?;
    let rho11 = jet.partial_value(2, 0)?;
    let (s, s1) = surface::s_invariant(&jet).map_err(|e| e.at_point(t1, t2))?;
    let theta2_21 = theta2_21_gamma0(&jet).map_err(|e| e.at_point(t1, t2))?;
    let theta2_10 = theta2_10_gamma0(&jet).map_err(|e| e.at_point(t1, t2))?;
    Ok(CurvatureSample {
        t1,
        t2,
        ma_residual: ma,
        rho11,
        s,
        s1,
        theta2_21,
        theta2_10,
        flat_here: theta2_21.abs() <= tol && theta2_10.abs() <= tol,
    })
}

/// Evaluate the curvature invariants over an `n1 x n2` grid. Failed points
/// become explicit error entries instead of aborting the sweep.
pub fn sample_grid(
    spec: &SurfaceSpec,
    n1: usize,
    n2: usize,
    tol: f64,
) -> Result<Vec<SampleOutcome>> {
    let points = spec.grid_points(n1, n2)?;
    Ok(points
        .par_iter()
        .map(|&(t1, t2)| match sample_at(spec, t1, t2, tol) {
            Ok(sample) => SampleOutcome::Sample(sample),
            Err(e) => SampleOutcome::Failed {
                t1,
                t2,
                error: e.to_string(),
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_spec() -> SurfaceSpec {
        SurfaceSpec::explicit_src("t1^2/(2*(1-t2))", (-0.2, 0.2), (-0.2, 0.2)).unwrap()
    }

    fn cubic_spec() -> SurfaceSpec {
        SurfaceSpec::parametric_src("v^2/2 + v^3/6", "v", (-0.2, 0.2)).unwrap()
    }

    #[test]
    fn flat_surface_coefficients_vanish() {
        let spec = flat_spec();
        for &(a, b) in &[(0.0, 0.0), (0.15, -0.1), (-0.2, 0.2), (0.07, 0.19)] {
            let jet = spec.rho_jet((a, b), 5).unwrap();
            assert!(theta2_21_gamma0(&jet).unwrap().abs() <= 1e-11);
            assert!(theta2_10_gamma0(&jet).unwrap().abs() <= 1e-11);
        }
    }

    #[test]
    fn cubic_witness_theta21_is_minus_two() {
        let jet = cubic_spec().rho_jet((0.0, 0.0), 5).unwrap();
        let value = theta2_21_gamma0(&jet).unwrap();
        assert!((value + 2.0).abs() <= 1e-11, "theta2_21 = {value}");
    }

    #[test]
    fn cubic_witness_pde_residual() {
        // 6 S rho11^(3/2) theta2_21 with S = rho11 = 1 gives -12
        let jet = cubic_spec().rho_jet((0.0, 0.0), 5).unwrap();
        let value = pde_residual_theta21(&jet).unwrap();
        assert!((value + 12.0).abs() <= 1e-10, "residual = {value}");
    }

    #[test]
    fn synthetic_theta10_unit() {
        // rho11 = 1, rho111 = 0, rho4 = 0, rho5 = 6
        let jet = Jet2::from_coeffs(5, &[(2, 0, 0.5), (5, 0, 6.0 / 120.0)]);
        assert!((theta2_10_gamma0(&jet).unwrap() - 1.0).abs() < 1e-14);
        assert!((ode_residual_theta10(&jet).unwrap() - 54.0).abs() < 1e-12);
    }

    #[test]
    fn fiber_gamma0_on_flat_surface_is_zero() {
        let jet = flat_spec().rho_jet((0.1, -0.05), 5).unwrap();
        let coeffs = fiber_coefficients(&jet, &FiberPoint::gamma0()).unwrap();
        for value in [
            coeffs.theta21_2_1bar,
            coeffs.theta22_1_1bar,
            coeffs.phi23_1_1bar,
            coeffs.phi14_1_1bar,
            coeffs.c,
            coeffs.f,
            coeffs.g,
            coeffs.r,
        ] {
            assert!(value.norm() <= 1e-9, "coefficient {value} should vanish");
        }
    }

    #[test]
    fn fiber_translation_coordinate_enters_linearly() {
        // on the flat surface with S1 = rho111 = 0 only the 3 conj(b) term
        // of the first coefficient survives
        let jet = flat_spec().rho_jet((0.0, 0.0), 5).unwrap();
        let fiber = FiberPoint::new(
            1.0,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::ZERO,
        )
        .unwrap();
        let coeffs = fiber_coefficients(&jet, &fiber).unwrap();
        let expected = Complex64::new(3.0, -3.0);
        assert!((coeffs.theta21_2_1bar - expected).norm() < 1e-12);
        assert!((coeffs.c - Complex64::new(1.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn fiber_cubic_witness() {
        let jet = cubic_spec().rho_jet((0.0, 0.0), 5).unwrap();
        let coeffs = fiber_coefficients(&jet, &FiberPoint::gamma0()).unwrap();
        assert!((coeffs.theta21_2_1bar - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
        assert!((coeffs.c - Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn fiber_values_real_on_unit_section() {
        for spec in [flat_spec(), cubic_spec()] {
            let jet = spec.rho_jet((0.05, 0.1), 5).unwrap();
            let coeffs = fiber_coefficients(&jet, &FiberPoint::gamma0()).unwrap();
            assert!(coeffs.theta21_2_1bar.im.abs() <= 1e-10);
            assert!(coeffs.theta22_1_1bar.im.abs() <= 1e-10);
            assert!(coeffs.phi23_1_1bar.im.abs() <= 1e-10);
            assert!(coeffs.phi14_1_1bar.im.abs() <= 1e-10);
        }
    }

    #[test]
    fn fiber_point_validation() {
        assert!(FiberPoint::new(0.0, Complex64::new(1.0, 0.0), Complex64::ZERO, Complex64::ZERO)
            .is_err());
        assert!(FiberPoint::new(1.0, Complex64::new(2.0, 0.0), Complex64::ZERO, Complex64::ZERO)
            .is_err());
        assert!(FiberPoint::new(
            1.0,
            Complex64::new(1.0, 0.0),
            Complex64::ZERO,
            Complex64::new(0.5, 0.0)
        )
        .is_err());
    }

    #[test]
    fn grid_sampling_marks_flat_points() {
        let outcomes = sample_grid(&flat_spec(), 5, 5, 1e-9).unwrap();
        assert_eq!(outcomes.len(), 25);
        for outcome in outcomes {
            match outcome {
                SampleOutcome::Sample(sample) => assert!(sample.flat_here),
                SampleOutcome::Failed { error, .. } => panic!("unexpected failure: {error}"),
            }
        }
    }

    #[test]
    fn grid_sampling_flags_degenerate_points() {
        // cylinder: S = 0 everywhere, every point must fail with a message
        let spec = SurfaceSpec::explicit_src("t1^2/2", (-0.1, 0.1), (-0.1, 0.1)).unwrap();
        let outcomes = sample_grid(&spec, 3, 3, 1e-9).unwrap();
        for outcome in outcomes {
            assert!(matches!(outcome, SampleOutcome::Failed { .. }));
        }
    }
}
