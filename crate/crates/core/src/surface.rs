//! Tube hypersurface specifications and admissibility checks.
//!
//! A surface is the tube over the graph `x3 = rho(t1, t2)` of a defining
//! function. It can be given explicitly through a bivariate expression for
//! rho, or parametrically through a pair `(p(v), q(v))` of univariate
//! expressions that encode a rank-1 solution of the homogeneous
//! Monge-Ampère equation `rho11 rho22 - rho12^2 = 0`.
//!
//! Loading normalizes the defining function so that `rho(0) = rho1(0) =
//! rho2(0) = 0` (an affine change of the x3 coordinate; the applied shift is
//! recorded). Admissibility over a sample grid checks uniform Levi
//! degeneracy of rank 1 (Monge-Ampère residual zero and `rho11 > 0`) and
//! 2-nondegeneracy (the invariant `S = (rho12 / rho11)_1` vanishing
//! nowhere). A finite grid cannot certify an "everywhere" statement, so the
//! report records exactly the region that was sampled.

use crate::error::{Error, Result};
use crate::exprlang::{self, Expr, VarSet};
use crate::jets::{Axis, Jet2};
use crate::maparam;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default admissibility tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Default grid resolution per axis.
pub const DEFAULT_GRID: usize = 21;

// ---------------------------------------------------------------------------
// Specification types
// ---------------------------------------------------------------------------

/// How the surface is described.
#[derive(Debug, Clone)]
pub enum SurfaceKind {
    /// rho(t1, t2) given directly.
    Explicit { rho: Expr },
    /// (p(v), q(v)) pair; rho is reconstructed from the parametrization.
    Parametric { p: Expr, q: Expr },
}

/// Sampling region, matching the kind of the surface.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Domain {
    /// Rectangle in the (t1, t2) base chart.
    Rect { t1: (f64, f64), t2: (f64, f64) },
    /// Interval in the parameter v; the fiber coordinate w ranges over the
    /// same interval when sampling.
    Interval { v: (f64, f64) },
}

impl Domain {
    pub fn contains(&self, t1: f64, t2: f64) -> bool {
        match self {
            Domain::Rect { t1: r1, t2: r2 } => {
                t1 >= r1.0 && t1 <= r1.1 && t2 >= r2.0 && t2 <= r2.1
            }
            // the base image of the parameter rectangle is not itself a
            // rectangle; accept everything and let evaluation decide
            Domain::Interval { .. } => true,
        }
    }
}

/// A loaded and normalized surface specification.
#[derive(Debug, Clone)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub domain: Domain,
    pub tolerance: f64,
    /// (rho(0), rho1(0), rho2(0)) subtracted at load time.
    pub normalization_shift: [f64; 3],
}

/// Raw JSON schema for surface documents.
#[derive(Debug, Deserialize)]
struct RawSpec {
    kind: String,
    rho: Option<String>,
    p: Option<String>,
    q: Option<String>,
    domain: RawDomain,
    tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct RawDomain {
    t1: Option<(f64, f64)>,
    t2: Option<(f64, f64)>,
    v: Option<(f64, f64)>,
}

/// Serializable echo of a normalized spec, embedded in reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecEcho {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    pub domain: Domain,
    pub tolerance: f64,
    pub normalization_shift: [f64; 3],
}

impl SurfaceSpec {
    /// Parse and normalize a JSON surface document.
    pub fn load(document: &str) -> Result<SurfaceSpec> {
        let raw: RawSpec = serde_json::from_str(document)
            .map_err(|e| Error::Schema(format!("invalid JSON: {e}")))?;
        match raw.kind.as_str() {
            "explicit" => {
                let src = raw
                    .rho
                    .ok_or_else(|| Error::Schema("explicit kind requires `rho`".into()))?;
                let rho = Expr::parse(&src, VarSet::Bivariate)?;
                let domain = match (raw.domain.t1, raw.domain.t2) {
                    (Some(t1), Some(t2)) => Domain::Rect { t1, t2 },
                    _ => {
                        return Err(Error::Schema(
                            "explicit kind requires domain.t1 and domain.t2".into(),
                        ))
                    }
                };
                SurfaceSpec::explicit(rho, domain, raw.tolerance.unwrap_or(DEFAULT_TOLERANCE))
            }
            "parametric" => {
                let p_src = raw
                    .p
                    .ok_or_else(|| Error::Schema("parametric kind requires `p`".into()))?;
                let q_src = raw
                    .q
                    .ok_or_else(|| Error::Schema("parametric kind requires `q`".into()))?;
                let p = Expr::parse(&p_src, VarSet::Univariate)?;
                let q = Expr::parse(&q_src, VarSet::Univariate)?;
                let domain = match raw.domain.v {
                    Some(v) => Domain::Interval { v },
                    None => {
                        return Err(Error::Schema(
                            "parametric kind requires domain.v".into(),
                        ))
                    }
                };
                SurfaceSpec::parametric(p, q, domain, raw.tolerance.unwrap_or(DEFAULT_TOLERANCE))
            }
            other => Err(Error::Schema(format!(
                "kind must be \"explicit\" or \"parametric\", found \"{other}\""
            ))),
        }
    }

    /// Build an explicit spec, applying the normalizing shift
    /// `x3 -> x3 - rho(0) - rho1(0) t1 - rho2(0) t2`.
    pub fn explicit(rho: Expr, domain: Domain, tolerance: f64) -> Result<SurfaceSpec> {
        if let Domain::Interval { .. } = domain {
            return Err(Error::Schema(
                "explicit kind requires a (t1, t2) rectangle domain".into(),
            ));
        }
        let jet = exprlang::eval_jet2(&rho, (0.0, 0.0), 1)?;
        let shift = [jet.coeff(0, 0), jet.coeff(1, 0), jet.coeff(0, 1)];
        let rho = if shift == [0.0, 0.0, 0.0] {
            rho
        } else {
            // rho - (c0 + c1 t1 + c2 t2), kept as an expression tree
            use crate::exprlang::{BinOp, Var};
            let linear = Expr::Binary(
                BinOp::Add,
                Box::new(Expr::Number(shift[0])),
                Box::new(Expr::Binary(
                    BinOp::Add,
                    Box::new(Expr::Binary(
                        BinOp::Mul,
                        Box::new(Expr::Number(shift[1])),
                        Box::new(Expr::Variable(Var::T1)),
                    )),
                    Box::new(Expr::Binary(
                        BinOp::Mul,
                        Box::new(Expr::Number(shift[2])),
                        Box::new(Expr::Variable(Var::T2)),
                    )),
                )),
            );
            Expr::Binary(BinOp::Sub, Box::new(rho), Box::new(linear))
        };
        Ok(SurfaceSpec {
            kind: SurfaceKind::Explicit { rho },
            domain,
            tolerance,
            normalization_shift: shift,
        })
    }

    /// Build a parametric spec; requires `p(0) = 0`, `q(0) = 0`, `q'(0) > 0`.
    pub fn parametric(p: Expr, q: Expr, domain: Domain, tolerance: f64) -> Result<SurfaceSpec> {
        if let Domain::Rect { .. } = domain {
            return Err(Error::Schema(
                "parametric kind requires a v interval domain".into(),
            ));
        }
        let p_jet = exprlang::eval_jet1(&p, 0.0, 1)?;
        let q_jet = exprlang::eval_jet1(&q, 0.0, 1)?;
        if p_jet.value().abs() > 1e-12 || q_jet.value().abs() > 1e-12 {
            return Err(Error::Schema(format!(
                "parametric spec must satisfy p(0) = q(0) = 0, found p(0) = {}, q(0) = {}",
                p_jet.value(),
                q_jet.value()
            )));
        }
        if q_jet.coeff(1) <= 0.0 {
            return Err(Error::Schema(format!(
                "parametric spec must satisfy q'(0) > 0, found {}",
                q_jet.coeff(1)
            )));
        }
        Ok(SurfaceSpec {
            kind: SurfaceKind::Parametric { p, q },
            domain,
            tolerance,
            normalization_shift: [0.0, 0.0, 0.0],
        })
    }

    /// Convenience: parse expression sources and build a spec.
    pub fn explicit_src(rho: &str, t1: (f64, f64), t2: (f64, f64)) -> Result<SurfaceSpec> {
        SurfaceSpec::explicit(
            Expr::parse(rho, VarSet::Bivariate)?,
            Domain::Rect { t1, t2 },
            DEFAULT_TOLERANCE,
        )
    }

    pub fn parametric_src(p: &str, q: &str, v: (f64, f64)) -> Result<SurfaceSpec> {
        SurfaceSpec::parametric(
            Expr::parse(p, VarSet::Univariate)?,
            Expr::parse(q, VarSet::Univariate)?,
            Domain::Interval { v },
            DEFAULT_TOLERANCE,
        )
    }

    pub fn echo(&self) -> SpecEcho {
        let (kind, rho, p, q) = match &self.kind {
            SurfaceKind::Explicit { rho } => {
                ("explicit".to_string(), Some(rho.print()), None, None)
            }
            SurfaceKind::Parametric { p, q } => (
                "parametric".to_string(),
                None,
                Some(p.print()),
                Some(q.print()),
            ),
        };
        SpecEcho {
            kind,
            rho,
            p,
            q,
            domain: self.domain.clone(),
            tolerance: self.tolerance,
            normalization_shift: self.normalization_shift,
        }
    }

    /// Full jet of rho at a base point, whichever way the surface is given.
    pub fn rho_jet(&self, point: (f64, f64), degree: usize) -> Result<Jet2> {
        match &self.kind {
            SurfaceKind::Explicit { rho } => exprlang::eval_jet2(rho, point, degree),
            SurfaceKind::Parametric { p, q } => {
                let v = maparam::solve_v_for_point(p, q, point.0, point.1)?;
                let pq = maparam::pq_from_exprs(p, q, v, degree)?;
                Ok(maparam::pq_to_rho(&pq, v, point.1, degree)?.jet)
            }
        }
    }

    /// Value of rho at a base point.
    pub fn rho_value(&self, t1: f64, t2: f64) -> Result<f64> {
        match &self.kind {
            SurfaceKind::Explicit { rho } => exprlang::eval_point2(rho, t1, t2),
            SurfaceKind::Parametric { p, q } => {
                let v = maparam::solve_v_for_point(p, q, t1, t2)?;
                let pq = maparam::pq_from_exprs(p, q, v, 1)?;
                Ok(maparam::pq_to_rho(&pq, v, t2, 1)?.rho)
            }
        }
    }

    /// Sample base points (t1, t2, rho) in the natural chart of the spec:
    /// a (t1, t2) grid for explicit surfaces, a (v, w) grid for parametric
    /// ones. `shrink` scales the region about its center (1.0 = full).
    pub fn base_samples(&self, n1: usize, n2: usize, shrink: f64) -> Result<Vec<[f64; 3]>> {
        let mut out = Vec::with_capacity(n1 * n2);
        match (&self.kind, &self.domain) {
            (SurfaceKind::Explicit { rho }, Domain::Rect { t1, t2 }) => {
                for a in linspace_shrunk(*t1, n1, shrink) {
                    for b in linspace_shrunk(*t2, n2, shrink) {
                        out.push([a, b, exprlang::eval_point2(rho, a, b)?]);
                    }
                }
            }
            (SurfaceKind::Parametric { p, q }, Domain::Interval { v }) => {
                for a in linspace_shrunk(*v, n1, shrink) {
                    let pq = maparam::pq_from_exprs(p, q, a, 1)?;
                    for b in linspace_shrunk(*v, n2, shrink) {
                        let pt = maparam::pq_to_rho(&pq, a, b, 1)?;
                        out.push([pt.t1, pt.t2, pt.rho]);
                    }
                }
            }
            _ => return Err(Error::Schema("domain does not match the surface kind".into())),
        }
        Ok(out)
    }

    /// Grid of base points used by admissibility and curvature sampling.
    pub fn grid_points(&self, n1: usize, n2: usize) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(n1 * n2);
        match &self.domain {
            Domain::Rect { t1, t2 } => {
                for a in linspace(*t1, n1) {
                    for b in linspace(*t2, n2) {
                        out.push((a, b));
                    }
                }
            }
            Domain::Interval { v } => {
                let (p, q) = match &self.kind {
                    SurfaceKind::Parametric { p, q } => (p, q),
                    _ => return Err(Error::Schema("interval domain on explicit kind".into())),
                };
                for a in linspace(*v, n1) {
                    let pq = maparam::pq_from_exprs(p, q, a, 1)?;
                    for b in linspace(*v, n2) {
                        let pt = maparam::pq_to_rho(&pq, a, b, 1)?;
                        out.push((pt.t1, pt.t2));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn linspace_shrunk((lo, hi): (f64, f64), n: usize, shrink: f64) -> Vec<f64> {
    let mid = (lo + hi) / 2.0;
    let half = (hi - lo) / 2.0 * shrink;
    linspace((mid - half, mid + half), n)
}

// ---------------------------------------------------------------------------
// Pointwise invariants
// ---------------------------------------------------------------------------

/// Monge-Ampère residual `rho11 rho22 - rho12^2` at the jet's base point.
pub fn ma_residual(jet: &Jet2) -> Result<f64> {
    let r11 = jet.partial_value(2, 0)?;
    let r22 = jet.partial_value(0, 2)?;
    let r12 = jet.partial_value(1, 1)?;
    Ok(r11 * r22 - r12 * r12)
}

/// The 2-nondegeneracy invariant `S = (rho12 / rho11)_1` and its
/// t1-derivative `S1`, both at the jet's base point.
pub fn s_invariant(jet: &Jet2) -> Result<(f64, f64)> {
    if jet.degree() < 4 {
        return Err(Error::DegreeExhausted {
            needed: 4,
            have: jet.degree(),
        });
    }
    let r11 = jet.partial(Axis::T1)?.partial(Axis::T1)?;
    let r12 = jet.partial(Axis::T1)?.partial(Axis::T2)?;
    let s_jet = r12.div(&r11)?.partial(Axis::T1)?;
    let s1_jet = s_jet.partial(Axis::T1)?;
    Ok((s_jet.value(), s1_jet.value()))
}

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

/// Per-point admissibility values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityPoint {
    pub t1: f64,
    pub t2: f64,
    pub ma_residual: f64,
    pub rho11: f64,
    pub s: f64,
}

/// Result of sampling the admissibility conditions over a grid.
///
/// `levi_rank1` holds exactly when the largest Monge-Ampère residual stays
/// within tolerance and `rho11` is positive over the grid;
/// `two_nondegenerate` when `|S|` stays above tolerance. The verdicts speak
/// only for the sampled region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub levi_rank1: bool,
    pub two_nondegenerate: bool,
    pub max_ma_residual: f64,
    pub min_rho11: f64,
    pub min_abs_s: f64,
    pub tolerance: f64,
    pub grid: (usize, usize),
    pub samples: Vec<AdmissibilityPoint>,
}

/// Evaluate the admissibility conditions at each point of an `n1 x n2` grid
/// over the declared domain.
pub fn admissibility(spec: &SurfaceSpec, n1: usize, n2: usize, tol: f64) -> Result<AdmissibilityReport> {
    let points = spec.grid_points(n1, n2)?;
    let samples: Vec<AdmissibilityPoint> = points
        .par_iter()
        .map(|&(t1, t2)| -> Result<AdmissibilityPoint> {
            let jet = spec.rho_jet((t1, t2), 5).map_err(|e| e.at_point(t1, t2))?;
            let ma = ma_residual(&jet)?;
            let rho11 = jet.partial_value(2, 0)?;
            let (s, _s1) = s_invariant(&jet).map_err(|e| e.at_point(t1, t2))?;
            Ok(AdmissibilityPoint {
                t1,
                t2,
                ma_residual: ma,
                rho11,
                s,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let max_ma_residual = samples
        .iter()
        .map(|s| s.ma_residual.abs())
        .fold(0.0, f64::max);
    let min_rho11 = samples.iter().map(|s| s.rho11).fold(f64::INFINITY, f64::min);
    let min_abs_s = samples
        .iter()
        .map(|s| s.s.abs())
        .fold(f64::INFINITY, f64::min);
    Ok(AdmissibilityReport {
        levi_rank1: max_ma_residual <= tol && min_rho11 > 0.0,
        two_nondegenerate: min_abs_s > tol,
        max_ma_residual,
        min_rho11,
        min_abs_s,
        tolerance: tol,
        grid: (n1, n2),
        samples,
    })
}
