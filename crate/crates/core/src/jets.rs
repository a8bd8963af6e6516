//! Truncated Taylor-series (jet) arithmetic in one and two variables.
//!
//! A jet stores the coefficients of a Taylor expansion at a base point up to
//! a fixed total degree. All arithmetic is exact on the represented
//! polynomial truncation: add/sub/mul are plain convolution, division and
//! real powers solve for coefficients recursively, and implicit equations
//! are inverted by Newton iteration on jets (the number of correct
//! coefficients doubles per step).
//!
//! The k-th derivative of the represented function at the base point is
//! `k! * coeff[k]` (and `i! * j! * coeff[i][j]` in two variables).

use crate::error::{Error, Result};

/// Binomial-style coefficient for a real exponent: alpha (alpha-1) ... (alpha-k+1) / k!.
fn real_binomial(alpha: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for m in 0..k {
        acc *= (alpha - m as f64) / (m as f64 + 1.0);
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, m| acc * m as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0;
    for m in 0..k {
        acc = acc * (n - m) as f64 / (m + 1) as f64;
    }
    acc
}

// ---------------------------------------------------------------------------
// Jet2: bivariate jets
// ---------------------------------------------------------------------------

/// Bivariate jet: coefficients of a Taylor expansion in (t1, t2) truncated at
/// a total degree, with absent entries reading as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    degree: usize,
    /// Triangular storage: entry (i, j) with i + j <= degree lives at
    /// `(i+j)(i+j+1)/2 + j`.
    coeffs: Vec<f64>,
}

fn tri_len(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

impl Jet2 {
    /// The zero jet of the given degree.
    pub fn zero(degree: usize) -> Self {
        Jet2 {
            degree,
            coeffs: vec![0.0; tri_len(degree)],
        }
    }

    /// A constant jet.
    pub fn constant(value: f64, degree: usize) -> Self {
        let mut jet = Jet2::zero(degree);
        jet.coeffs[0] = value;
        jet
    }

    /// The jet of `base + (t1 - base1)` or `base + (t2 - base2)`:
    /// a variable seeded with unit linear coefficient on the given axis.
    pub fn variable(base: f64, axis: Axis, degree: usize) -> Self {
        let mut jet = Jet2::zero(degree);
        jet.coeffs[0] = base;
        if degree >= 1 {
            match axis {
                Axis::T1 => jet.coeffs[tri_index(1, 0)] = 1.0,
                Axis::T2 => jet.coeffs[tri_index(0, 1)] = 1.0,
            }
        }
        jet
    }

    /// Build from an explicit coefficient list `[(i, j, value)]`.
    pub fn from_coeffs(degree: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut jet = Jet2::zero(degree);
        for &(i, j, value) in entries {
            assert!(i + j <= degree, "coefficient ({i},{j}) beyond degree {degree}");
            jet.coeffs[tri_index(i, j)] = value;
        }
        jet
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of t1^i t2^j (zero when i + j exceeds the degree).
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j <= self.degree {
            self.coeffs[tri_index(i, j)]
        } else {
            0.0
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        assert!(i + j <= self.degree);
        self.coeffs[tri_index(i, j)] = value;
    }

    /// Value of the represented function at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Partial derivative d^{i+j} / dt1^i dt2^j at the base point,
    /// i.e. `i! j! * coeff(i, j)`.
    pub fn partial_value(&self, i: usize, j: usize) -> Result<f64> {
        if i + j > self.degree {
            return Err(Error::DegreeExhausted {
                needed: i + j,
                have: self.degree,
            });
        }
        Ok(factorial(i) * factorial(j) * self.coeff(i, j))
    }

    /// Drop coefficients above `degree` (degree must not exceed the current one).
    pub fn truncate(&self, degree: usize) -> Self {
        assert!(degree <= self.degree, "truncate cannot raise the degree");
        let mut out = Jet2::zero(degree);
        for d in 0..=degree {
            for j in 0..=d {
                out.coeffs[tri_index(d - j, j)] = self.coeffs[tri_index(d - j, j)];
            }
        }
        out
    }

    fn check_same_degree(&self, other: &Jet2) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet2) -> Result<Jet2> {
        self.check_same_degree(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet2 {
            degree: self.degree,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Jet2) -> Result<Jet2> {
        self.check_same_degree(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Jet2 {
            degree: self.degree,
            coeffs,
        })
    }

    pub fn neg(&self) -> Jet2 {
        Jet2 {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Jet2 {
        Jet2 {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Jet2) -> Result<Jet2> {
        self.check_same_degree(other)?;
        let n = self.degree;
        let mut out = Jet2::zero(n);
        for da in 0..=n {
            for ja in 0..=da {
                let ia = da - ja;
                let a = self.coeffs[tri_index(ia, ja)];
                if a == 0.0 {
                    continue;
                }
                for db in 0..=(n - da) {
                    for jb in 0..=db {
                        let ib = db - jb;
                        let b = other.coeffs[tri_index(ib, jb)];
                        if b == 0.0 {
                            continue;
                        }
                        out.coeffs[tri_index(ia + ib, ja + jb)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Truncated quotient, solved coefficient by coefficient in increasing
    /// total degree. The divisor must have a nonzero constant term.
    pub fn div(&self, other: &Jet2) -> Result<Jet2> {
        self.check_same_degree(other)?;
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(Error::DivisionByZeroJet);
        }
        let n = self.degree;
        let mut out = Jet2::zero(n);
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                // a_{ij} = sum_{k<=i, l<=j} b_{i-k, j-l} c_{kl}; isolate c_{ij}.
                let mut acc = self.coeffs[tri_index(i, j)];
                for k in 0..=i {
                    for l in 0..=j {
                        if k == i && l == j {
                            continue;
                        }
                        acc -= other.coeffs[tri_index(i - k, j - l)]
                            * out.coeffs[tri_index(k, l)];
                    }
                }
                out.coeffs[tri_index(i, j)] = acc / b0;
            }
        }
        Ok(out)
    }

    /// Truncated real power. The constant term must be strictly positive.
    ///
    /// Writes the jet as a0 (1 + u) with u of zero constant term and expands
    /// the binomial series; exact to the truncation degree.
    pub fn pow_real(&self, alpha: f64) -> Result<Jet2> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::NonPositiveBase(a0));
        }
        let n = self.degree;
        let mut u = self.scale(1.0 / a0);
        u.coeffs[0] = 0.0;
        let mut out = Jet2::constant(real_binomial(alpha, 0), n);
        let mut u_pow = Jet2::constant(1.0, n);
        for k in 1..=n {
            u_pow = u_pow.mul(&u)?;
            out = out.add(&u_pow.scale(real_binomial(alpha, k)))?;
        }
        Ok(out.scale(a0.powf(alpha)))
    }

    /// Integer power by repeated multiplication (works with zero constant term).
    pub fn powi(&self, exp: i32) -> Result<Jet2> {
        if exp < 0 {
            let inv = Jet2::constant(1.0, self.degree).div(self)?;
            return inv.powi(-exp);
        }
        let mut out = Jet2::constant(1.0, self.degree);
        for _ in 0..exp {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Partial derivative as a jet; the degree drops by one.
    pub fn partial(&self, axis: Axis) -> Result<Jet2> {
        if self.degree == 0 {
            return Err(Error::DegreeExhausted {
                needed: 1,
                have: 0,
            });
        }
        let n = self.degree - 1;
        let mut out = Jet2::zero(n);
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                out.coeffs[tri_index(i, j)] = match axis {
                    Axis::T1 => (i + 1) as f64 * self.coeffs[tri_index(i + 1, j)],
                    Axis::T2 => (j + 1) as f64 * self.coeffs[tri_index(i, j + 1)],
                };
            }
        }
        Ok(out)
    }

    /// Largest coefficient magnitude, used for convergence checks.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Substitute a zero-constant-term bivariate jet into a univariate jet:
    /// the outer series evaluated along the inner one, by Horner's scheme.
    pub fn compose_outer(outer: &Jet1, inner: &Jet2) -> Result<Jet2> {
        if inner.coeffs[0] != 0.0 {
            return Err(Error::Domain(
                "composition requires zero constant term in the inner jet".into(),
            ));
        }
        let n = inner.degree;
        let mut out = Jet2::constant(*outer.coeffs.last().unwrap_or(&0.0), n);
        for k in (0..outer.coeffs.len() - 1).rev() {
            out = out.mul(inner)?;
            out.coeffs[0] += outer.coeffs[k];
        }
        Ok(out)
    }
}

/// Differentiation axis for bivariate jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    T1,
    T2,
}

/// Solve F(v; t1, t2) = 0 for v as a bivariate jet by Newton iteration.
///
/// `f` maps the current guess for v to the pair (F(v), dF/dv (v)), both as
/// jets in (t1, t2). Requires F(0; 0, 0) = 0 and a nonvanishing derivative
/// at the base; each Newton step doubles the number of correct degrees.
pub fn solve_implicit<F>(f: F, degree: usize) -> Result<Jet2>
where
    F: Fn(&Jet2) -> Result<(Jet2, Jet2)>,
{
    let mut v = Jet2::zero(degree);
    let (residual0, deriv0) = f(&v)?;
    let d0 = deriv0.value();
    if d0.abs() < 1e-14 {
        return Err(Error::SingularImplicit(d0));
    }
    if residual0.value().abs() > 1e-10 * (1.0 + residual0.max_abs()) {
        return Err(Error::Domain(format!(
            "implicit solve: residual {} nonzero at the base point",
            residual0.value()
        )));
    }
    let steps = usize::BITS as usize - degree.leading_zeros() as usize + 2;
    for _ in 0..steps {
        let (residual, deriv) = f(&v)?;
        let update = residual.div(&deriv)?;
        v = v.sub(&update)?;
        if update.max_abs() < 1e-15 * (1.0 + v.max_abs()) {
            break;
        }
    }
    let (residual, _) = f(&v)?;
    if residual.max_abs() > 1e-9 * (1.0 + v.max_abs()) {
        return Err(Error::Domain(format!(
            "implicit solve did not converge (residual {})",
            residual.max_abs()
        )));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Jet1: univariate jets
// ---------------------------------------------------------------------------

/// Univariate jet: coefficients 0..=degree of a Taylor expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1 {
    coeffs: Vec<f64>,
}

impl Jet1 {
    pub fn zero(degree: usize) -> Self {
        Jet1 {
            coeffs: vec![0.0; degree + 1],
        }
    }

    pub fn constant(value: f64, degree: usize) -> Self {
        let mut jet = Jet1::zero(degree);
        jet.coeffs[0] = value;
        jet
    }

    /// The jet of the identity shifted to `base`: base + x.
    pub fn variable(base: f64, degree: usize) -> Self {
        let mut jet = Jet1::zero(degree);
        jet.coeffs[0] = base;
        if degree >= 1 {
            jet.coeffs[1] = 1.0;
        }
        jet
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        Jet1 { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// k-th derivative at the base point: `k! * coeff(k)`.
    pub fn derivative_value(&self, k: usize) -> Result<f64> {
        if k > self.degree() {
            return Err(Error::DegreeExhausted {
                needed: k,
                have: self.degree(),
            });
        }
        Ok(factorial(k) * self.coeffs[k])
    }

    pub fn truncate(&self, degree: usize) -> Jet1 {
        assert!(degree <= self.degree());
        Jet1 {
            coeffs: self.coeffs[..=degree].to_vec(),
        }
    }

    fn check_same_degree(&self, other: &Jet1) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet1) -> Result<Jet1> {
        self.check_same_degree(other)?;
        Ok(Jet1 {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Jet1) -> Result<Jet1> {
        self.check_same_degree(other)?;
        Ok(Jet1 {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn neg(&self) -> Jet1 {
        Jet1 {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Jet1 {
        Jet1 {
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn mul(&self, other: &Jet1) -> Result<Jet1> {
        self.check_same_degree(other)?;
        let n = self.degree();
        let mut out = Jet1::zero(n);
        for i in 0..=n {
            if self.coeffs[i] == 0.0 {
                continue;
            }
            for j in 0..=(n - i) {
                out.coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        Ok(out)
    }

    pub fn div(&self, other: &Jet1) -> Result<Jet1> {
        self.check_same_degree(other)?;
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(Error::DivisionByZeroJet);
        }
        let n = self.degree();
        let mut out = Jet1::zero(n);
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for m in 0..k {
                acc -= other.coeffs[k - m] * out.coeffs[m];
            }
            out.coeffs[k] = acc / b0;
        }
        Ok(out)
    }

    pub fn pow_real(&self, alpha: f64) -> Result<Jet1> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::NonPositiveBase(a0));
        }
        let n = self.degree();
        let mut u = self.scale(1.0 / a0);
        u.coeffs[0] = 0.0;
        let mut out = Jet1::constant(1.0, n);
        let mut u_pow = Jet1::constant(1.0, n);
        for k in 1..=n {
            u_pow = u_pow.mul(&u)?;
            out = out.add(&u_pow.scale(real_binomial(alpha, k)))?;
        }
        Ok(out.scale(a0.powf(alpha)))
    }

    pub fn powi(&self, exp: i32) -> Result<Jet1> {
        if exp < 0 {
            let inv = Jet1::constant(1.0, self.degree()).div(self)?;
            return inv.powi(-exp);
        }
        let mut out = Jet1::constant(1.0, self.degree());
        for _ in 0..exp {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Derivative as a jet; the degree drops by one.
    pub fn derivative(&self) -> Result<Jet1> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::DegreeExhausted { needed: 1, have: 0 });
        }
        let mut out = Jet1::zero(n - 1);
        for k in 0..n {
            out.coeffs[k] = (k + 1) as f64 * self.coeffs[k + 1];
        }
        Ok(out)
    }

    /// Antiderivative with zero constant term; the degree rises by one.
    pub fn antiderivative(&self) -> Jet1 {
        let n = self.degree();
        let mut out = Jet1::zero(n + 1);
        for k in 0..=n {
            out.coeffs[k + 1] = self.coeffs[k] / (k + 1) as f64;
        }
        out
    }

    /// Value of the truncated polynomial at offset `x` from the base point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Taylor shift: the same polynomial re-expanded at base + h.
    pub fn recenter(&self, h: f64) -> Jet1 {
        let n = self.degree();
        let mut out = Jet1::zero(n);
        for k in 0..=n {
            // Horner accumulation of sum_{m>=k} binom(m,k) a_m h^{m-k}
            let mut acc = 0.0;
            for m in (k..=n).rev() {
                acc = acc * h + binomial(m, k) * self.coeffs[m];
            }
            out.coeffs[k] = acc;
        }
        out
    }

    /// Composition self(other(x)) for an inner jet with zero constant term.
    pub fn compose(&self, inner: &Jet1) -> Result<Jet1> {
        if inner.coeffs[0] != 0.0 {
            return Err(Error::Domain(
                "composition requires zero constant term in the inner jet".into(),
            ));
        }
        let n = inner.degree();
        let mut out = Jet1::constant(*self.coeffs.last().unwrap(), n);
        for k in (0..self.coeffs.len() - 1).rev() {
            out = out.mul(inner)?;
            out.coeffs[0] += self.coeffs[k];
        }
        Ok(out)
    }

    /// Series reversion: for s with s(0) = 0 and s'(0) != 0, the jet r with
    /// s(r(x)) = x up to the truncation degree. Newton iteration on jets.
    pub fn revert(&self) -> Result<Jet1> {
        let n = self.degree();
        if self.coeffs[0].abs() > 0.0 {
            return Err(Error::Domain(
                "series reversion requires zero constant term".into(),
            ));
        }
        let s1 = self.coeff(1);
        if s1.abs() < 1e-300 {
            return Err(Error::ReversionFailed(s1));
        }
        let ds = self.derivative()?;
        // pad the derivative back to degree n so compositions stay degree-n
        let mut ds_padded = Jet1::zero(n);
        ds_padded.coeffs[..n.max(1)].copy_from_slice(&ds.coeffs);
        let mut r = Jet1::variable(0.0, n).scale(1.0 / s1);
        r.coeffs[0] = 0.0;
        let identity = Jet1::variable(0.0, n);
        let steps = usize::BITS as usize - n.leading_zeros() as usize + 2;
        for _ in 0..steps {
            let s_of_r = self.compose(&r)?;
            let residual = s_of_r.sub(&identity)?;
            let ds_of_r = ds_padded.compose(&r)?;
            r = r.sub(&residual.div(&ds_of_r)?)?;
        }
        Ok(r)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}
