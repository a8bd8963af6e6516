//! The ambient matrix model: a realization of so(3,2) and its group.
//!
//! The model geometry lives on the projective quadric `(Z, Z) = 0` in CP^4,
//! where `(x, x) = x1^2 + x2^2 + x3^2 - x4^2 - x5^2`. A linear change of
//! coordinates takes the symmetric and Hermitian extensions of this form
//! into the matrices `S` (antidiagonal ones) and `T` (a symmetric 0/1
//! permutation), and the symmetry group becomes the connected group of
//! complex matrices with `C^t S C = S`, `C^t T conj(C) = T`, `det C = 1`.
//! Its Lie algebra is a 10-real-parameter pattern family; two subgroups
//! `H1` (diagonal) and `H2` (unipotent) generate the isotropy group of the
//! base point `(0:0:0:1:0)`.
//!
//! Everything here is pointwise matrix arithmetic with tolerances; no
//! differential forms are represented. Membership in the connected identity
//! component is not algebraically decidable pointwise, so the group
//! predicate checks the defining equations and the determinant only;
//! elements produced through [`expm`] lie in the identity component by
//! construction.

pub mod checks;

use crate::error::Result;
use nalgebra::{Matrix5, Vector5};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex 5x5 matrix.
pub type Mat5 = Matrix5<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The symmetric form matrix: ones on the antidiagonal.
pub fn form_s() -> Mat5 {
    let mut m = Mat5::zeros();
    for i in 0..5 {
        m[(i, 4 - i)] = c(1.0);
    }
    m
}

/// The Hermitian form matrix: the symmetric permutation (1 4)(2 5).
pub fn form_t() -> Mat5 {
    let mut m = Mat5::zeros();
    for &(i, j) in &[(0, 3), (1, 4), (2, 2), (3, 0), (4, 1)] {
        m[(i, j)] = c(1.0);
    }
    m
}

/// diag(1, 1, 1, -1, -1): the ambient form in the original coordinates.
pub fn form_j() -> Mat5 {
    Mat5::from_diagonal(&Vector5::new(c(1.0), c(1.0), c(1.0), c(-1.0), c(-1.0)))
}

fn frobenius(m: &Mat5) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Lie algebra and group membership
// ---------------------------------------------------------------------------

/// Build the 10-parameter algebra element from its free entries
/// (`alpha, beta, gamma, sigma` complex; `delta, rho` purely imaginary,
/// given by their imaginary parts).
pub fn algebra_element(
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    sigma: Complex64,
    delta_im: f64,
    rho_im: f64,
) -> Mat5 {
    let delta = Complex64::new(0.0, delta_im);
    let rho = Complex64::new(0.0, rho_im);
    let z = Complex64::ZERO;
    Mat5::from_row_slice(&[
        alpha, beta, gamma, delta, z,
        beta.conj(), alpha.conj(), gamma.conj(), z, -delta,
        sigma, sigma.conj(), z, -gamma.conj(), -gamma,
        rho, z, -sigma.conj(), -alpha.conj(), -beta,
        z, -rho, -sigma, -beta.conj(), -alpha,
    ])
}

/// Defining-equation route: `M^t S + S M = 0` and `M^t T + T conj(M) = 0`.
pub fn satisfies_algebra_equations(m: &Mat5, tol: f64) -> bool {
    let s = form_s();
    let t = form_t();
    let eq1 = m.transpose() * s + s * m;
    let eq2 = m.transpose() * t + t * m.map(|z| z.conj());
    frobenius(&eq1) <= tol && frobenius(&eq2) <= tol
}

/// Pattern route: read the six free parameters off the matrix, rebuild, and
/// compare entrywise (also forcing `delta`, `rho` purely imaginary).
pub fn matches_algebra_pattern(m: &Mat5, tol: f64) -> bool {
    let delta = m[(0, 3)];
    let rho = m[(3, 0)];
    if delta.re.abs() > tol || rho.re.abs() > tol {
        return false;
    }
    let rebuilt = algebra_element(m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(2, 0)], delta.im, rho.im);
    frobenius(&(m - rebuilt)) <= tol
}

/// Group equations: `det = 1`, `C^t S C = S`, `C^t T conj(C) = T`.
/// Connectivity is not checked (see module docs).
pub fn satisfies_group_equations(m: &Mat5, tol: f64) -> bool {
    let s = form_s();
    let t = form_t();
    let det = m.determinant();
    (det - c(1.0)).norm() <= tol
        && frobenius(&(m.transpose() * s * m - s)) <= tol
        && frobenius(&(m.transpose() * t * m.map(|z| z.conj()) - t)) <= tol
}

/// The diagonal subgroup element `diag(A, conj A, 1, conj(A)^-1, A^-1)`.
pub fn h1_matrix(a: Complex64) -> Mat5 {
    assert!(a.norm() > 0.0, "H1 parameter must be nonzero");
    Mat5::from_diagonal(&Vector5::new(
        a,
        a.conj(),
        c(1.0),
        a.conj().inv(),
        a.inv(),
    ))
}

/// The unipotent subgroup element with parameters B complex and Lambda
/// purely imaginary (given by its imaginary part).
pub fn h2_matrix(b: Complex64, lambda_im: f64) -> Mat5 {
    let lambda = Complex64::new(0.0, lambda_im);
    let bb = b.conj();
    let half_sq = b.norm_sqr() / 2.0;
    let mut m = Mat5::identity();
    m[(2, 0)] = b;
    m[(2, 1)] = bb;
    m[(3, 0)] = lambda - half_sq;
    m[(3, 1)] = -bb * bb / 2.0;
    m[(3, 2)] = -bb;
    m[(4, 0)] = -b * b / 2.0;
    m[(4, 1)] = -lambda - half_sq;
    m[(4, 2)] = -b;
    m
}

/// Membership booleans for a single matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub in_g: bool,
    pub in_g_algebraic: bool,
    pub in_h1: bool,
    pub in_h2: bool,
    pub in_h1_struct: bool,
}

/// Evaluate every membership predicate on one matrix.
///
/// `in_g` requires both the defining equations and the explicit pattern
/// (the two routes are equivalent; computing both cross-checks them).
/// `in_h1_struct` accepts products `h1(a) h2(B, Lambda)` with `|a| = 1`,
/// the matrix realization of the structure group of the bundle reduction.
pub fn algebra_and_group_predicates(m: &Mat5, tol: f64) -> MembershipReport {
    let in_g = satisfies_algebra_equations(m, tol) && matches_algebra_pattern(m, tol);

    let in_g_algebraic = satisfies_group_equations(m, tol);

    let in_h1 = {
        let a = m[(0, 0)];
        a.norm() > tol && frobenius(&(m - h1_matrix(a))) <= tol
    };

    let in_h2 = {
        let b = m[(2, 0)];
        let lambda = m[(3, 0)] + c(b.norm_sqr() / 2.0);
        lambda.re.abs() <= tol && frobenius(&(m - h2_matrix(b, lambda.im))) <= tol
    };

    let in_h1_struct = {
        let a = m[(0, 0)];
        if (a.norm() - 1.0).abs() > tol {
            false
        } else {
            let b = m[(2, 0)];
            let lambda = m[(3, 0)] * a.conj() + c(b.norm_sqr() / 2.0);
            lambda.re.abs() <= tol
                && frobenius(&(m - h1_matrix(a) * h2_matrix(b, lambda.im))) <= tol
        }
    };

    MembershipReport {
        in_g,
        in_g_algebraic,
        in_h1,
        in_h2,
        in_h1_struct,
    }
}

/// Matrix commutator XY - YX.
pub fn bracket(x: &Mat5, y: &Mat5) -> Mat5 {
    x * y - y * x
}

/// Matrix exponential by scaling and squaring with a truncated series
/// (tail below 1e-12 of the running norm).
pub fn expm(x: &Mat5) -> Mat5 {
    let norm = frobenius(x);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = x.map(|z| z / c(2f64.powi(squarings as i32)));
    let mut term = Mat5::identity();
    let mut sum = Mat5::identity();
    for k in 1..200 {
        term = term * scaled / c(k as f64);
        sum += term;
        if frobenius(&term) <= 1e-16 * frobenius(&sum).max(1.0) {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = result * result;
    }
    result
}

// ---------------------------------------------------------------------------
// Projective geometry of the model quadric
// ---------------------------------------------------------------------------

/// A point of CP^4 in homogeneous coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint(pub [Complex64; 5]);

impl ProjPoint {
    pub fn new(z: [Complex64; 5]) -> ProjPoint {
        ProjPoint(z)
    }

    /// The distinguished base point `q+ = (i : 1 : 0 : 1 : i)`.
    pub fn q_plus() -> ProjPoint {
        ProjPoint([
            Complex64::new(0.0, 1.0),
            c(1.0),
            Complex64::ZERO,
            c(1.0),
            Complex64::new(0.0, 1.0),
        ])
    }

    /// Scale so the largest-modulus coordinate is exactly 1.
    pub fn normalize(&self) -> ProjPoint {
        let (index, _) = self
            .0
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        let pivot = self.0[index];
        assert!(pivot.norm() > 0.0, "projective point must be nonzero");
        ProjPoint(self.0.map(|z| z / pivot))
    }

    /// Projective equality up to a nonzero complex scale.
    pub fn projectively_equal(&self, other: &ProjPoint, tol: f64) -> bool {
        let a = self.normalize();
        let b = other.normalize();
        a.0.iter()
            .zip(b.0.iter())
            .all(|(x, y)| (x - y).norm() <= tol)
    }

    pub fn apply(&self, m: &Mat5) -> ProjPoint {
        let v = Vector5::from_row_slice(&self.0);
        let w = m * v;
        ProjPoint([w[0], w[1], w[2], w[3], w[4]])
    }
}

/// The ambient symmetric form `(z, z) = z1^2 + z2^2 + z3^2 - z4^2 - z5^2`
/// (no conjugation).
pub fn symmetric_form(a: &[Complex64; 5], b: &[Complex64; 5]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3] - a[4] * b[4]
}

/// The Hermitian extension `<z, z> = |z1|^2 + |z2|^2 + |z3|^2 - |z4|^2 - |z5|^2`.
pub fn hermitian_form(z: &[Complex64; 5]) -> f64 {
    z[0].norm_sqr() + z[1].norm_sqr() + z[2].norm_sqr() - z[3].norm_sqr() - z[4].norm_sqr()
}

/// Membership of a projective point in the model's strata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaMembership {
    pub on_quadric: bool,
    pub in_d: bool,
    pub in_d_plus: bool,
    pub on_gamma_plus: bool,
}

/// Evaluate the quadric / domain / orbit membership of a point, after
/// normalizing so the verdicts are scale-invariant.
pub fn gamma_plus_membership(z: &ProjPoint, tol: f64) -> GammaMembership {
    let z = z.normalize().0;
    let re: [Complex64; 5] = z.map(|w| c(w.re));
    let im: [Complex64; 5] = z.map(|w| c(w.im));

    let on_quadric = symmetric_form(&z, &z).norm() <= tol;
    let herm = hermitian_form(&z);
    let positivity = z[3].re * z[4].im - z[4].re * z[3].im;

    let in_d = on_quadric && herm < -tol;
    let in_d_plus = in_d && positivity > tol;
    let on_gamma_plus = symmetric_form(&re, &re).norm() <= tol
        && symmetric_form(&im, &im).norm() <= tol
        && symmetric_form(&re, &im).norm() <= tol
        && positivity > tol;

    GammaMembership {
        on_quadric,
        in_d,
        in_d_plus,
        on_gamma_plus,
    }
}

/// The coordinate change of CP^4 aligning the forms with S and T.
pub fn phi_matrix() -> Mat5 {
    let i = Complex64::new(0.0, 1.0);
    let h = c(0.5);
    Mat5::from_row_slice(&[
        h, h * i, c(0.0), -h * i, -h,
        h, -h * i, c(0.0), h * i, -h,
        c(0.0), c(0.0), c(1.0), c(0.0), c(0.0),
        h, h * i, c(0.0), h * i, h,
        h, -h * i, c(0.0), -h * i, h,
    ])
}

/// Apply the coordinate change to a projective point.
pub fn phi_coord_change(z: &ProjPoint) -> ProjPoint {
    z.apply(&phi_matrix())
}

/// Report of the semidirect-structure check `h1 h2 h1^-1 in H2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemidirectReport {
    pub h1_in_group: bool,
    pub h2_in_group: bool,
    pub conjugate_in_h2: bool,
    pub conjugate_b: (f64, f64),
    pub conjugate_lambda_im: f64,
    pub ok: bool,
}

/// Conjugate an H2 element by an H1 element and verify the result stays in
/// the H2 pattern, returning its parameters.
pub fn semidirect_check(a: Complex64, b: Complex64, lambda_im: f64, tol: f64) -> Result<SemidirectReport> {
    let h1 = h1_matrix(a);
    let h2 = h2_matrix(b, lambda_im);
    let h1_in_group = satisfies_group_equations(&h1, tol);
    let h2_in_group = satisfies_group_equations(&h2, tol);

    let h1_inv = h1_matrix(a.inv());
    let conjugate = h1 * h2 * h1_inv;
    let b_prime = conjugate[(2, 0)];
    let lambda_prime = conjugate[(3, 0)] + c(b_prime.norm_sqr() / 2.0);
    let conjugate_in_h2 = lambda_prime.re.abs() <= tol
        && frobenius(&(conjugate - h2_matrix(b_prime, lambda_prime.im))) <= tol;

    Ok(SemidirectReport {
        h1_in_group,
        h2_in_group,
        conjugate_in_h2,
        conjugate_b: (b_prime.re, b_prime.im),
        conjugate_lambda_im: lambda_prime.im,
        ok: h1_in_group && h2_in_group && conjugate_in_h2,
    })
}
