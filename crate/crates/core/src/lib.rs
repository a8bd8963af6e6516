//! CR-geometric invariants of tube hypersurfaces in C^3.
//!
//! Given a local defining function for the base of a tube hypersurface,
//! this crate decides uniform Levi degeneracy of rank 1 (the homogeneous
//! Monge-Ampère equation), 2-nondegeneracy, evaluates the two curvature
//! coefficients whose vanishing characterizes CR-flatness, classifies flat
//! surfaces into their closed-form families, and constructs and verifies an
//! affine equivalence onto the tube over the future light cone
//! `x1^2 + x2^2 - x3^2 = 0, x3 > 0`.
//!
//! Modules:
//! - [`jets`]: exact truncated Taylor arithmetic in one and two variables.
//! - [`exprlang`]: the expression language for defining functions.
//! - [`surface`]: surface specifications, normalization, admissibility.
//! - [`maparam`]: the (p, q) parametrization of rank-1 Monge-Ampère
//!   solutions and the derivative bridge between charts.
//! - [`curvature`]: fiber curvature coefficients and the two scalar
//!   invariants deciding flatness.
//! - [`flatness`]: the classification pipeline and the affine map onto the
//!   light-cone tube.
//! - [`so32`]: the ambient matrix model (forms, group, subgroups, orbits).
//! - [`analysis`]: the report-producing driver used by the CLI.

pub mod analysis;
pub mod curvature;
pub mod error;
pub mod flatness;
pub mod exprlang;
pub mod jets;
pub mod maparam;
pub mod so32;
pub mod surface;

pub use error::{Error, Result};
