use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by the subsystem that raises them; most carry the
/// offending quantity or location so callers can report where a computation
/// broke down.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    // ---- jet arithmetic ----
    /// Division by a jet whose constant term is zero.
    #[error("division by a jet with zero constant term")]
    DivisionByZeroJet,
    /// Real power of a jet whose constant term is not strictly positive.
    #[error("real power of a jet with non-positive constant term ({0})")]
    NonPositiveBase(f64),
    /// A derivative or coefficient of higher order than the jet carries.
    #[error("jet degree exhausted: need degree >= {needed}, have {have}")]
    DegreeExhausted { needed: usize, have: usize },
    /// Jets of mismatched truncation degree in a binary operation.
    #[error("jet degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    /// Implicit solve with vanishing derivative at the base point.
    #[error("implicit solve is singular: dF/dv = {0} at the base point")]
    SingularImplicit(f64),
    /// Series reversion of a jet with vanishing linear coefficient.
    #[error("series reversion failed: linear coefficient = {0}")]
    ReversionFailed(f64),

    // ---- expression language ----
    /// Syntax error with byte offset and what was expected there.
    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },
    /// Identifier outside the declared variable set.
    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },
    /// Evaluation hit a point outside the expression's real domain.
    #[error("domain error: {0}")]
    Domain(String),

    // ---- surface / parametrization ----
    /// Input document does not match the surface spec schema.
    #[error("schema error: {0}")]
    Schema(String),
    /// The (v,w) chart degenerates: q' - w p'' vanishes.
    #[error("singular parametrization: q' - w p'' = {value} at v={v}, w={w}")]
    SingularParametrization { value: f64, v: f64, w: f64 },
    /// A stated precondition of a curvature formula is violated.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    // ---- flatness pipeline ----
    /// q is not a constant multiple of p' - D.
    #[error("q is not linearly related to p': max deviation {max_deviation}")]
    NotLinearlyRelated { max_deviation: f64 },
    /// (C p'')^(-2/3) is not a quadratic polynomial in v.
    #[error("profile is not quadratic: cubic coefficient {0}")]
    NotQuadratic(f64),
    /// Fitted quadric is not a real cone of signature (2,1).
    #[error("fitted quadric is not a cone: {0}")]
    NotACone(String),
    /// The quadric has no center point.
    #[error("quadric has no vertex (center system inconsistent, residual {0})")]
    NoVertex(f64),
    /// An image point landed on the wrong sheet of the light cone.
    #[error("image point ({0}, {1}, {2}) lies on the non-positive sheet")]
    WrongSheet(f64, f64, f64),

    // ---- reporting ----
    /// I/O or serialization failure, stringified.
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attach a grid location to an error raised during per-point evaluation.
    pub fn at_point(self, t1: f64, t2: f64) -> Error {
        match self {
            Error::PreconditionFailed(msg) => {
                Error::PreconditionFailed(format!("{msg} at (t1, t2) = ({t1}, {t2})"))
            }
            other => other,
        }
    }
}
