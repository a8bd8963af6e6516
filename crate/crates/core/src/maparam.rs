//! The (p, q) parametrization of rank-1 Monge-Ampère solutions.
//!
//! Every defining function with `rho11 rho22 - rho12^2 = 0`, normalized at
//! the origin and with `rho11 > 0`, is encoded by two functions of one
//! variable through the chart `v = rho1(t1, t2)`, `w = t2`:
//!
//! ```text
//! p(v) = rho2(t1(v, w), w)      (independent of w)
//! q(v) = t1(v, 0)               with q'(v) = 1 / rho11(t1(v,0), 0)
//! ```
//!
//! The chart inverts as `t1 = q(v) - w p'(v)`, `t2 = w`, and the defining
//! function itself is
//!
//! ```text
//! rho = v q(v) - int_0^v q + w (p(v) - v p'(v)).
//! ```
//!
//! This module implements both directions of the correspondence on jets —
//! [`pq_to_rho`] produces the full bivariate jet of rho at a chart point,
//! [`rho_to_pq`] recovers the pair by series reversion — together with
//! [`vw_derivatives`], the closed-form expressions of all rho-derivatives
//! needed by the curvature formulas in the (v, w) chart. The two routes are
//! algebraically independent, which the test suite exploits as a
//! cross-oracle.

use crate::error::{Error, Result};
use crate::exprlang::{self, Expr};
use crate::jets::{self, Axis, Jet1, Jet2};
use crate::surface::{SurfaceKind, SurfaceSpec};

/// Jets of the parametrizing pair at a base parameter value.
///
/// `p` must carry at least one more degree than the target degree of any
/// bivariate jet reconstructed from it (the reconstruction consumes `p'`).
/// `integral_base` caches `int_0^{base_v} q`, which cannot be recovered
/// from local data alone.
#[derive(Debug, Clone)]
pub struct PQData {
    pub p: Jet1,
    pub q: Jet1,
    pub base_v: f64,
    pub integral_base: f64,
}

impl PQData {
    /// Check the origin conditions p(0) = 0, q(0) = 0, q'(0) > 0.
    pub fn validate_origin(&self) -> Result<()> {
        if self.base_v != 0.0 {
            return Err(Error::PreconditionFailed(
                "origin validation requires base_v = 0".into(),
            ));
        }
        if self.p.value().abs() > 1e-9 || self.q.value().abs() > 1e-9 {
            return Err(Error::PreconditionFailed(format!(
                "p(0) = {}, q(0) = {} must both vanish",
                self.p.value(),
                self.q.value()
            )));
        }
        if self.q.coeff(1) <= 0.0 {
            return Err(Error::PreconditionFailed(format!(
                "q'(0) = {} must be positive",
                self.q.coeff(1)
            )));
        }
        Ok(())
    }

    /// Jets re-expanded at parameter value v (exact for polynomial content).
    fn at(&self, v: f64) -> (Jet1, Jet1) {
        let dv = v - self.base_v;
        if dv == 0.0 {
            (self.p.clone(), self.q.clone())
        } else {
            (self.p.recenter(dv), self.q.recenter(dv))
        }
    }
}

/// Closed-form values of the rho-derivatives in the (v, w) chart.
///
/// With `E_k = q^(k) - w p^(k+1)`:
///
/// ```text
/// rho11  = 1 / E1                 rho12 = p' / E1
/// S      = p'' / E1               S1    = (p''' q' - p'' q'') / E1^3
/// rho111 = -E2 / E1^3
/// rho4   = -(E3 E1 - 3 E2^2) / E1^5
/// rho5   = -((E4 E1 + E3 E2 - 6 E2 E3) E1 - 5 (E3 E1 - 3 E2^2) E2) / E1^7
/// ```
///
/// where subscripts 1 denote t1-derivatives and `rho4`, `rho5` are the
/// fourth and fifth pure t1-derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBridge {
    pub s: f64,
    pub s1: f64,
    pub rho11: f64,
    pub rho12: f64,
    pub rho111: f64,
    pub rho4: f64,
    pub rho5: f64,
}

/// A chart point with the reconstructed defining function data.
#[derive(Debug, Clone)]
pub struct ParamPoint {
    pub t1: f64,
    pub t2: f64,
    pub rho: f64,
    pub jet: Jet2,
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// Jets of (p, q) at parameter value v, read off expression definitions.
///
/// `target_degree` is the degree of bivariate jets the result must support;
/// p and q are expanded one degree higher.
pub fn pq_from_exprs(p: &Expr, q: &Expr, v: f64, target_degree: usize) -> Result<PQData> {
    let p_jet = exprlang::eval_jet1(p, v, target_degree + 1)?;
    let q_jet = exprlang::eval_jet1(q, v, target_degree + 1)?;
    let integral_base = integral_of_q(q, v)?;
    Ok(PQData {
        p: p_jet,
        q: q_jet,
        base_v: v,
        integral_base,
    })
}

/// Recover (p, q) jets from an explicit defining function, anchored at the
/// chart point above `t1 = anchor` on the slice `t2 = 0`.
///
/// The parameter value there is `v = rho1(anchor, 0)`; q is the series
/// inverse of `t1 -> rho1(t1, 0)` and p is `rho2(., 0)` composed with it.
/// The running integral of q is recovered exactly from the identity
/// `int_0^v q = v q(v) - rho(q(v), 0)`.
pub fn pq_from_rho(rho: &Expr, anchor: f64, target_degree: usize) -> Result<PQData> {
    let degree = target_degree + 2;
    let jet = exprlang::eval_jet2(rho, (anchor, 0.0), degree)?;
    let v_base = jet.coeff(1, 0);

    let rho11 = jet.partial_value(2, 0)?;
    if rho11 <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "rho11 = {rho11} must be positive for the parametrization"
        )));
    }

    // rho1(anchor + x, 0) - v_base as a univariate jet with zero constant term
    let mut g_coeffs = vec![0.0; degree];
    for (k, g) in g_coeffs.iter_mut().enumerate().skip(1) {
        *g = (k + 1) as f64 * jet.coeff(k + 1, 0);
    }
    g_coeffs[0] = 0.0;
    let mut g = Jet1::from_coeffs(g_coeffs);
    // seed the linear coefficient explicitly: g'(0) = rho11 > 0
    if g.coeff(1) == 0.0 {
        return Err(Error::ReversionFailed(0.0));
    }
    // x(dv): offset in t1 as a series in the offset of v
    let x_of_dv = g.revert()?;
    g = x_of_dv; // reuse the binding for clarity below
    let mut q_coeffs: Vec<f64> = (0..=g.degree()).map(|k| g.coeff(k)).collect();
    q_coeffs[0] = anchor;
    let q = Jet1::from_coeffs(q_coeffs);

    // rho2(anchor + x, 0) composed with x(dv)
    let h_coeffs: Vec<f64> = (0..degree).map(|k| jet.coeff(k, 1)).collect();
    let h = Jet1::from_coeffs(h_coeffs);
    let p = h.compose(&g)?;

    let rho_at_anchor = exprlang::eval_point2(rho, anchor, 0.0)?;
    let integral_base = v_base * anchor - rho_at_anchor;

    Ok(PQData {
        p,
        q,
        base_v: v_base,
        integral_base,
    })
}

/// Recover (p, q) jets from a bivariate jet of rho at the origin of a
/// normalized surface (constant and linear coefficients zero).
pub fn pq_from_origin_jet(jet: &Jet2) -> Result<PQData> {
    let degree = jet.degree();
    if degree < 2 {
        return Err(Error::DegreeExhausted {
            needed: 2,
            have: degree,
        });
    }
    for &(i, j) in &[(0usize, 0usize), (1, 0), (0, 1)] {
        if jet.coeff(i, j).abs() > 1e-9 {
            return Err(Error::PreconditionFailed(format!(
                "jet is not normalized: coefficient ({i},{j}) = {}",
                jet.coeff(i, j)
            )));
        }
    }
    let rho11 = jet.partial_value(2, 0)?;
    if rho11 <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "rho11 = {rho11} must be positive for the parametrization"
        )));
    }
    let mut g_coeffs = vec![0.0; degree];
    for (k, g) in g_coeffs.iter_mut().enumerate().skip(1) {
        *g = (k + 1) as f64 * jet.coeff(k + 1, 0);
    }
    let g = Jet1::from_coeffs(g_coeffs);
    let q = g.revert()?;
    let h_coeffs: Vec<f64> = (0..degree).map(|k| jet.coeff(k, 1)).collect();
    let h = Jet1::from_coeffs(h_coeffs);
    let p = h.compose(&q)?;
    Ok(PQData {
        p,
        q,
        base_v: 0.0,
        integral_base: 0.0,
    })
}

/// Recover the (p, q) pair of a surface, anchored at the origin.
///
/// Explicit surfaces go through series reversion of `rho1(., 0)`;
/// parametric ones are first reconstructed into an origin jet so that the
/// round trip genuinely exercises both directions.
pub fn rho_to_pq(spec: &SurfaceSpec, target_degree: usize) -> Result<PQData> {
    match &spec.kind {
        SurfaceKind::Explicit { rho } => pq_from_rho(rho, 0.0, target_degree),
        SurfaceKind::Parametric { .. } => {
            let jet = spec.rho_jet((0.0, 0.0), target_degree + 2)?;
            pq_from_origin_jet(&jet)
        }
    }
}

// ---------------------------------------------------------------------------
// Forward direction: (p, q) -> rho
// ---------------------------------------------------------------------------

/// Map a chart point (v, w) to the base point and the full jet of rho there.
///
/// `degree` is the truncation degree of the returned bivariate jet; the
/// stored p jet must exceed it by one. The inner chart function v(t1, t2)
/// is found by Newton iteration on jets, and the defining function is
/// assembled from the parametric solution formula, so the Monge-Ampère
/// residual of the output vanishes identically.
pub fn pq_to_rho(pq: &PQData, v: f64, w: f64, degree: usize) -> Result<ParamPoint> {
    let (p_v, q_v) = pq.at(v);
    if p_v.degree() < degree + 1 || q_v.degree() < degree {
        return Err(Error::DegreeExhausted {
            needed: degree + 1,
            have: p_v.degree().min(q_v.degree() + 1),
        });
    }
    let p1 = p_v.derivative()?;
    let p2 = p1.derivative()?;
    let q1 = q_v.derivative()?;

    let e1 = q1.value() - w * p2.value();
    if e1.abs() < 1e-12 {
        return Err(Error::SingularParametrization { value: e1, v, w });
    }

    let t1 = q_v.value() - w * p1.value();
    let t1_jet = Jet2::variable(t1, Axis::T1, degree);
    let t2_jet = Jet2::variable(w, Axis::T2, degree);

    // v(t1, t2) as an offset jet: q(v + dv) - t2 p'(v + dv) - t1 = 0
    let dv = jets::solve_implicit(
        |dv| {
            let qc = Jet2::compose_outer(&q_v, dv)?;
            let pc1 = Jet2::compose_outer(&p1, dv)?;
            let residual = qc.sub(&t2_jet.mul(&pc1)?)?.sub(&t1_jet)?;
            let qd = Jet2::compose_outer(&q1, dv)?;
            let pd2 = Jet2::compose_outer(&p2, dv)?;
            let derivative = qd.sub(&t2_jet.mul(&pd2)?)?;
            Ok((residual, derivative))
        },
        degree,
    )?;

    // rho = V Q - I + W (P - V P1), all as jets in (t1, t2)
    let mut v_jet = dv.clone();
    v_jet.set_coeff(0, 0, v_jet.coeff(0, 0) + v);
    let q_comp = Jet2::compose_outer(&q_v, &dv)?;
    let p_comp = Jet2::compose_outer(&p_v, &dv)?;
    let p1_comp = Jet2::compose_outer(&p1, &dv)?;

    // int_0^{v + dv} q = integral_base + A(v - base_v) + A_v(dv)
    let integral_at_v = pq.integral_base + {
        let a = pq.q.antiderivative();
        a.eval(v - pq.base_v)
    };
    let a_v = q_v.antiderivative();
    let mut integral_jet = Jet2::compose_outer(&a_v, &dv)?;
    integral_jet.set_coeff(0, 0, integral_jet.coeff(0, 0) + integral_at_v);

    let jet = v_jet
        .mul(&q_comp)?
        .sub(&integral_jet)?
        .add(&t2_jet.mul(&p_comp.sub(&v_jet.mul(&p1_comp)?)?)?)?;

    Ok(ParamPoint {
        t1,
        t2: w,
        rho: jet.value(),
        jet,
    })
}

// ---------------------------------------------------------------------------
// Derivative bridge
// ---------------------------------------------------------------------------

/// Evaluate the closed-form rho-derivative expressions at a chart point.
pub fn vw_derivatives(pq: &PQData, v: f64, w: f64) -> Result<DerivativeBridge> {
    let (p_v, q_v) = pq.at(v);
    if p_v.degree() < 5 {
        return Err(Error::DegreeExhausted {
            needed: 5,
            have: p_v.degree(),
        });
    }
    if q_v.degree() < 4 {
        return Err(Error::DegreeExhausted {
            needed: 4,
            have: q_v.degree(),
        });
    }
    let pd: Vec<f64> = (1..=5).map(|k| p_v.derivative_value(k).unwrap()).collect();
    let qd: Vec<f64> = (1..=4).map(|k| q_v.derivative_value(k).unwrap()).collect();
    let (p1, p2, p3, p4, p5) = (pd[0], pd[1], pd[2], pd[3], pd[4]);
    let (q1, q2, q3, q4) = (qd[0], qd[1], qd[2], qd[3]);

    let e1 = q1 - w * p2;
    let e2 = q2 - w * p3;
    let e3 = q3 - w * p4;
    let e4 = q4 - w * p5;
    if e1.abs() < 1e-12 {
        return Err(Error::SingularParametrization { value: e1, v, w });
    }

    let e1_3 = e1 * e1 * e1;
    let e1_5 = e1_3 * e1 * e1;
    let e1_7 = e1_5 * e1 * e1;
    Ok(DerivativeBridge {
        s: p2 / e1,
        s1: (p3 * q1 - p2 * q2) / e1_3,
        rho11: 1.0 / e1,
        rho12: p1 / e1,
        rho111: -e2 / e1_3,
        rho4: -(e3 * e1 - 3.0 * e2 * e2) / e1_5,
        rho5: -((e4 * e1 + e3 * e2 - 6.0 * e2 * e3) * e1 - 5.0 * (e3 * e1 - 3.0 * e2 * e2) * e2)
            / e1_7,
    })
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

/// Find the parameter value v over a base point: solve
/// `q(v) - t2 p'(v) = t1` by Newton iteration from v = 0.
pub fn solve_v_for_point(p: &Expr, q: &Expr, t1: f64, t2: f64) -> Result<f64> {
    let mut v = 0.0;
    for _ in 0..80 {
        let p_jet = exprlang::eval_jet1(p, v, 2)?;
        let q_jet = exprlang::eval_jet1(q, v, 1)?;
        let f = q_jet.value() - t2 * p_jet.coeff(1) - t1;
        let df = q_jet.coeff(1) - t2 * 2.0 * p_jet.coeff(2);
        if df.abs() < 1e-12 {
            return Err(Error::SingularParametrization { value: df, v, w: t2 });
        }
        let step = f / df;
        v -= step;
        if step.abs() <= 1e-15 * (1.0 + v.abs()) {
            return Ok(v);
        }
    }
    // accept if converged to tolerance even without a tiny last step
    let p_jet = exprlang::eval_jet1(p, v, 2)?;
    let q_jet = exprlang::eval_jet1(q, v, 1)?;
    let f = q_jet.value() - t2 * p_jet.coeff(1) - t1;
    if f.abs() <= 1e-11 * (1.0 + t1.abs()) {
        Ok(v)
    } else {
        Err(Error::Domain(format!(
            "chart inversion did not converge at (t1, t2) = ({t1}, {t2}); residual {f}"
        )))
    }
}

/// `int_0^v q` by piecewise jet antiderivatives: the interval is cut into
/// short panels and on each panel the degree-9 jet of q at the midpoint is
/// integrated exactly by coefficient shift.
pub fn integral_of_q(q: &Expr, v: f64) -> Result<f64> {
    if v == 0.0 {
        return Ok(0.0);
    }
    let panels = ((v.abs() / 0.05).ceil() as usize).max(1);
    let h = v / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let mid = (i as f64 + 0.5) * h;
        let jet = exprlang::eval_jet1(q, mid, 9)?;
        let anti = jet.antiderivative();
        total += anti.eval(h / 2.0) - anti.eval(-h / 2.0);
    }
    Ok(total)
}
