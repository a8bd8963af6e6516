//! A small expression language for defining functions.
//!
//! Grammar (see `docs/grammar.ebnf`):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = factor { ("*" | "/") factor } ;
//! factor  = "-" factor | power ;
//! power   = atom [ "^" exponent ] ;
//! atom    = number | ident | "(" expr ")" | "sqrt" "(" expr ")"
//!         | "pow" "(" expr "," rational ")" ;
//! ```
//!
//! `^` binds tighter than unary minus, binary operators are left
//! associative, exponents are integer literals (optionally negative), and
//! `pow` takes a literal rational second argument such as `-2/3` or `1.5`.
//! Identifiers must come from the declared variable set: `t1`, `t2` for
//! bivariate expressions, `v` for univariate ones.

use crate::error::{Error, Result};
use crate::jets::{Axis, Jet1, Jet2};
use std::fmt;

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

/// Variable set an expression is parsed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSet {
    /// Bivariate: t1, t2.
    Bivariate,
    /// Univariate: v.
    Univariate,
}

impl VarSet {
    fn contains(self, name: &str) -> bool {
        match self {
            VarSet::Bivariate => name == "t1" || name == "t2",
            VarSet::Univariate => name == "v",
        }
    }
}

/// Variables of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T1,
    T2,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Variable(Var),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Integer power.
    IntPow(Box<Expr>, i32),
    Sqrt(Box<Expr>),
    /// Real power with a literal rational exponent (numerator, denominator).
    RatPow(Box<Expr>, i64, i64),
}

impl Expr {
    /// Parse source text over the given variable set.
    pub fn parse(src: &str, vars: VarSet) -> Result<Expr> {
        Parser::new(src, vars).parse_full()
    }

    /// Canonical fully parenthesized form; `parse(print(e))` equals `e`.
    pub fn print(&self) -> String {
        format!("{self}")
    }

    /// True when the expression mentions any variable at all.
    pub fn uses_variables(&self) -> bool {
        match self {
            Expr::Number(_) => false,
            Expr::Variable(_) => true,
            Expr::Binary(_, a, b) => a.uses_variables() || b.uses_variables(),
            Expr::Neg(a) | Expr::IntPow(a, _) | Expr::Sqrt(a) | Expr::RatPow(a, _, _) => {
                a.uses_variables()
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(x) => write!(f, "{x}"),
            Expr::Variable(Var::T1) => write!(f, "t1"),
            Expr::Variable(Var::T2) => write!(f, "t2"),
            Expr::Variable(Var::V) => write!(f, "v"),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::IntPow(a, k) => {
                if *k < 0 {
                    write!(f, "({a})^({k})")
                } else {
                    write!(f, "({a})^{k}")
                }
            }
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::RatPow(a, num, den) => write!(f, "pow({a}, {num}/{den})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer / parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> &'static str {
        match self {
            Tok::Number(_) => "number",
            Tok::Ident(_) => "identifier",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::Caret => "`^`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::End => "end of input",
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: VarSet,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, vars: VarSet) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            vars,
        }
    }

    fn error(&self, offset: usize, expected: &str) -> Error {
        Error::Parse {
            offset,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token plus the byte offset where it starts.
    fn next_tok(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start));
        }
        let c = self.src[self.pos];
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((tok, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
            {
                end += 1;
            }
            // exponent part: e or E, optional sign
            if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                let mut exp_end = end + 1;
                if exp_end < self.src.len()
                    && (self.src[exp_end] == b'+' || self.src[exp_end] == b'-')
                {
                    exp_end += 1;
                }
                if exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                    while exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                        exp_end += 1;
                    }
                    end = exp_end;
                }
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
            let value: f64 = text
                .parse()
                .map_err(|_| self.error(start, "a numeric literal"))?;
            self.pos = end;
            return Ok((Tok::Number(value), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
            {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
            self.pos = end;
            return Ok((Tok::Ident(text.to_string()), start));
        }
        Err(self.error(start, "a token"))
    }

    fn peek_tok(&mut self) -> Result<(Tok, usize)> {
        let saved = self.pos;
        let tok = self.next_tok()?;
        self.pos = saved;
        Ok(tok)
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let (tok, offset) = self.next_tok()?;
        if tok == want {
            Ok(())
        } else {
            Err(self.error(offset, want.describe()))
        }
    }

    fn parse_full(&mut self) -> Result<Expr> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Err(self.error(0, "a nonempty expression"));
        }
        let expr = self.parse_expr()?;
        let (tok, offset) = self.next_tok()?;
        if tok != Tok::End {
            return Err(self.error(offset, "end of input"));
        }
        Ok(expr)
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            let (tok, _) = self.peek_tok()?;
            let op = match tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.next_tok()?;
            let rhs = self.parse_term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_factor()?;
        loop {
            let (tok, _) = self.peek_tok()?;
            let op = match tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.next_tok()?;
            let rhs = self.parse_factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        let (tok, _) = self.peek_tok()?;
        if tok == Tok::Minus {
            self.next_tok()?;
            let inner = self.parse_factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        let (tok, _) = self.peek_tok()?;
        if tok == Tok::Caret {
            self.next_tok()?;
            let exp = self.parse_int_exponent()?;
            return Ok(Expr::IntPow(Box::new(base), exp));
        }
        Ok(base)
    }

    /// Integer exponent: digits, a parenthesized signed integer, or -digits.
    fn parse_int_exponent(&mut self) -> Result<i32> {
        let (tok, offset) = self.next_tok()?;
        match tok {
            Tok::Number(x) => {
                if x.fract() != 0.0 || x.abs() > i32::MAX as f64 {
                    return Err(self.error(offset, "an integer exponent"));
                }
                Ok(x as i32)
            }
            Tok::Minus => {
                let (tok2, offset2) = self.next_tok()?;
                if let Tok::Number(x) = tok2 {
                    if x.fract() != 0.0 || x.abs() > i32::MAX as f64 {
                        return Err(self.error(offset2, "an integer exponent"));
                    }
                    Ok(-(x as i32))
                } else {
                    Err(self.error(offset2, "an integer exponent"))
                }
            }
            Tok::LParen => {
                let exp = self.parse_int_exponent()?;
                self.expect(Tok::RParen)?;
                Ok(exp)
            }
            _ => Err(self.error(offset, "an integer exponent")),
        }
    }

    /// Rational literal for pow(): `3`, `-2/3`, `1.5`, `(1/2)`.
    fn parse_rational(&mut self) -> Result<(i64, i64)> {
        let (tok, offset) = self.next_tok()?;
        match tok {
            Tok::Minus => {
                let (num, den) = self.parse_rational()?;
                Ok((-num, den))
            }
            Tok::LParen => {
                let r = self.parse_rational()?;
                self.expect(Tok::RParen)?;
                Ok(r)
            }
            Tok::Number(x) => {
                let (tok2, _) = self.peek_tok()?;
                if tok2 == Tok::Slash {
                    self.next_tok()?;
                    let (tok3, offset3) = self.next_tok()?;
                    if let Tok::Number(y) = tok3 {
                        if x.fract() != 0.0 || y.fract() != 0.0 || y == 0.0 {
                            return Err(self.error(offset3, "an integer denominator"));
                        }
                        Ok((x as i64, y as i64))
                    } else {
                        Err(self.error(offset3, "an integer denominator"))
                    }
                } else if x.fract() == 0.0 {
                    Ok((x as i64, 1))
                } else {
                    // decimal literal: scale to a fraction over a power of ten
                    let mut num = x;
                    let mut den = 1i64;
                    while num.fract() != 0.0 && den < 1_000_000_000 {
                        num *= 10.0;
                        den *= 10;
                    }
                    if num.fract() != 0.0 {
                        return Err(self.error(offset, "a rational exponent"));
                    }
                    Ok((num as i64, den))
                }
            }
            _ => Err(self.error(offset, "a rational exponent")),
        }
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let (tok, offset) = self.next_tok()?;
        match tok {
            Tok::Number(x) => Ok(Expr::Number(x)),
            Tok::LParen => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "sqrt" => {
                    self.expect(Tok::LParen)?;
                    let inner = self.parse_expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Sqrt(Box::new(inner)))
                }
                "pow" => {
                    self.expect(Tok::LParen)?;
                    let base = self.parse_expr()?;
                    self.expect(Tok::Comma)?;
                    let (num, den) = self.parse_rational()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::RatPow(Box::new(base), num, den))
                }
                _ if self.vars.contains(&name) => {
                    let var = match name.as_str() {
                        "t1" => Var::T1,
                        "t2" => Var::T2,
                        _ => Var::V,
                    };
                    Ok(Expr::Variable(var))
                }
                _ => Err(Error::UnknownVariable { name, offset }),
            },
            other => Err(self.error(offset, &format!("an atom, found {}", other.describe()))),
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation over a differential ring
// ---------------------------------------------------------------------------

/// Values an expression can be evaluated in: plain numbers and jets.
pub trait ExprValue: Clone {
    fn add(&self, other: &Self) -> Result<Self>;
    fn sub(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn div(&self, other: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn powi(&self, exp: i32) -> Result<Self>;
    fn pow_real(&self, alpha: f64) -> Result<Self>;
}

impl ExprValue for f64 {
    fn add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        Ok(self - other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn div(&self, other: &Self) -> Result<Self> {
        if *other == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(self / other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn powi(&self, exp: i32) -> Result<Self> {
        if *self == 0.0 && exp < 0 {
            return Err(Error::Domain("zero raised to a negative power".into()));
        }
        Ok(f64::powi(*self, exp))
    }
    fn pow_real(&self, alpha: f64) -> Result<Self> {
        if *self <= 0.0 {
            return Err(Error::Domain(format!(
                "real power of non-positive value {self}"
            )));
        }
        Ok(f64::powf(*self, alpha))
    }
}

impl ExprValue for Jet2 {
    fn add(&self, other: &Self) -> Result<Self> {
        Jet2::add(self, other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        Jet2::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Jet2::mul(self, other)
    }
    fn div(&self, other: &Self) -> Result<Self> {
        Jet2::div(self, other)
    }
    fn neg(&self) -> Self {
        Jet2::neg(self)
    }
    fn powi(&self, exp: i32) -> Result<Self> {
        Jet2::powi(self, exp)
    }
    fn pow_real(&self, alpha: f64) -> Result<Self> {
        let value = self.value();
        if value <= 0.0 {
            return Err(Error::Domain(format!(
                "real power of a jet with non-positive value {value}"
            )));
        }
        Jet2::pow_real(self, alpha)
    }
}

impl ExprValue for Jet1 {
    fn add(&self, other: &Self) -> Result<Self> {
        Jet1::add(self, other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        Jet1::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Jet1::mul(self, other)
    }
    fn div(&self, other: &Self) -> Result<Self> {
        Jet1::div(self, other)
    }
    fn neg(&self) -> Self {
        Jet1::neg(self)
    }
    fn powi(&self, exp: i32) -> Result<Self> {
        Jet1::powi(self, exp)
    }
    fn pow_real(&self, alpha: f64) -> Result<Self> {
        let value = self.value();
        if value <= 0.0 {
            return Err(Error::Domain(format!(
                "real power of a jet with non-positive value {value}"
            )));
        }
        Jet1::pow_real(self, alpha)
    }
}

fn eval_generic<T: ExprValue>(
    expr: &Expr,
    lookup: &dyn Fn(Var) -> Result<T>,
    constant: &dyn Fn(f64) -> T,
) -> Result<T> {
    match expr {
        Expr::Number(x) => Ok(constant(*x)),
        Expr::Variable(var) => lookup(*var),
        Expr::Binary(op, a, b) => {
            let lhs = eval_generic(a, lookup, constant)?;
            let rhs = eval_generic(b, lookup, constant)?;
            match op {
                BinOp::Add => lhs.add(&rhs),
                BinOp::Sub => lhs.sub(&rhs),
                BinOp::Mul => lhs.mul(&rhs),
                BinOp::Div => lhs.div(&rhs),
            }
        }
        Expr::Neg(a) => Ok(eval_generic(a, lookup, constant)?.neg()),
        Expr::IntPow(a, k) => eval_generic(a, lookup, constant)?.powi(*k),
        Expr::Sqrt(a) => eval_generic(a, lookup, constant)?.pow_real(0.5),
        Expr::RatPow(a, num, den) => {
            eval_generic(a, lookup, constant)?.pow_real(*num as f64 / *den as f64)
        }
    }
}

/// Evaluate a bivariate expression as a jet at a base point.
pub fn eval_jet2(expr: &Expr, base: (f64, f64), degree: usize) -> Result<Jet2> {
    eval_generic(
        expr,
        &|var| match var {
            Var::T1 => Ok(Jet2::variable(base.0, Axis::T1, degree)),
            Var::T2 => Ok(Jet2::variable(base.1, Axis::T2, degree)),
            Var::V => Err(Error::UnknownVariable {
                name: "v".into(),
                offset: 0,
            }),
        },
        &|x| Jet2::constant(x, degree),
    )
}

/// Evaluate a univariate expression as a jet at a base point.
pub fn eval_jet1(expr: &Expr, base: f64, degree: usize) -> Result<Jet1> {
    eval_generic(
        expr,
        &|var| match var {
            Var::V => Ok(Jet1::variable(base, degree)),
            _ => Err(Error::UnknownVariable {
                name: "t".into(),
                offset: 0,
            }),
        },
        &|x| Jet1::constant(x, degree),
    )
}

/// Plain pointwise evaluation of a bivariate expression.
pub fn eval_point2(expr: &Expr, t1: f64, t2: f64) -> Result<f64> {
    eval_generic(
        expr,
        &|var| match var {
            Var::T1 => Ok(t1),
            Var::T2 => Ok(t2),
            Var::V => Err(Error::UnknownVariable {
                name: "v".into(),
                offset: 0,
            }),
        },
        &|x| x,
    )
}

/// Plain pointwise evaluation of a univariate expression.
pub fn eval_point1(expr: &Expr, v: f64) -> Result<f64> {
    eval_generic(
        expr,
        &|var| match var {
            Var::V => Ok(v),
            _ => Err(Error::UnknownVariable {
                name: "t".into(),
                offset: 0,
            }),
        },
        &|x| x,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_exercise() {
        let e = Expr::parse("t1^2/(2*(1-t2))", VarSet::Bivariate).unwrap();
        let expected = Expr::Binary(
            BinOp::Div,
            Box::new(Expr::IntPow(Box::new(Expr::Variable(Var::T1)), 2)),
            Box::new(Expr::Binary(
                BinOp::Mul,
                Box::new(Expr::Number(2.0)),
                Box::new(Expr::Binary(
                    BinOp::Sub,
                    Box::new(Expr::Number(1.0)),
                    Box::new(Expr::Variable(Var::T2)),
                )),
            )),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn malformed_input_offset() {
        let err = Expr::parse("t1 + * t2", VarSet::Bivariate).unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 5),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn univariate_two_terms() {
        let e = Expr::parse("v^2/2 + v^3/6", VarSet::Univariate).unwrap();
        match e {
            Expr::Binary(BinOp::Add, _, _) => {}
            other => panic!("expected a sum, got {other:?}"),
        }
    }

    #[test]
    fn unknown_variable() {
        let err = Expr::parse("v + 1", VarSet::Bivariate).unwrap_err();
        assert!(matches!(err, Error::UnknownVariable { .. }));
    }

    #[test]
    fn variable_set_separation() {
        assert!(Expr::parse("t1", VarSet::Univariate).is_err());
        assert!(Expr::parse("v", VarSet::Bivariate).is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let sources = [
            "t1^2/(2*(1-t2))",
            "-t1 + t2*t2 - 3.5",
            "sqrt(1+t1) * pow(1-t2, -2/3)",
            "t1^(-2) + 2e-3",
            "-(t1 - t2)^3",
        ];
        for src in sources {
            let e = Expr::parse(src, VarSet::Bivariate).unwrap();
            let printed = e.print();
            let reparsed = Expr::parse(&printed, VarSet::Bivariate).unwrap();
            assert_eq!(e, reparsed, "round trip failed for {src}");
        }
    }

    #[test]
    fn eval_jet_flat_example() {
        let e = Expr::parse("t1^2/(2*(1-t2))", VarSet::Bivariate).unwrap();
        let jet = eval_jet2(&e, (0.0, 0.0), 3).unwrap();
        assert!((jet.coeff(2, 0) - 0.5).abs() < 1e-15);
        assert!((jet.coeff(2, 1) - 0.5).abs() < 1e-15);
        for d in 0..=3usize {
            for j in 0..=d {
                let i = d - j;
                if (i, j) != (2, 0) && (i, j) != (2, 1) {
                    assert!(
                        jet.coeff(i, j).abs() < 1e-15,
                        "unexpected coefficient at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn eval_zero_expression() {
        let e = Expr::parse("0", VarSet::Bivariate).unwrap();
        let jet = eval_jet2(&e, (0.4, -0.3), 4).unwrap();
        assert_eq!(jet.max_abs(), 0.0);
        assert_eq!(jet.degree(), 4);
    }

    #[test]
    fn sqrt_at_zero_is_domain_error() {
        let e = Expr::parse("sqrt(t1)", VarSet::Bivariate).unwrap();
        assert!(matches!(
            eval_jet2(&e, (0.0, 0.0), 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pointwise_matches_jet_constant_term() {
        let e = Expr::parse("(1 + t1)^3 - t2/(2 - t1) + sqrt(4 + t2)", VarSet::Bivariate)
            .unwrap();
        for &(t1, t2) in &[(0.0, 0.0), (0.1, -0.2), (-0.3, 0.25)] {
            let direct = eval_point2(&e, t1, t2).unwrap();
            let jet = eval_jet2(&e, (t1, t2), 3).unwrap();
            assert!((direct - jet.value()).abs() < 1e-13);
        }
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        // -t1^2 must parse as -(t1^2): value at t1=2 is -4
        let e = Expr::parse("-t1^2", VarSet::Bivariate).unwrap();
        assert_eq!(eval_point2(&e, 2.0, 0.0).unwrap(), -4.0);
    }

    #[test]
    fn negative_exponent_forms() {
        let a = Expr::parse("(1+t1)^-2", VarSet::Bivariate).unwrap();
        let b = Expr::parse("(1+t1)^(-2)", VarSet::Bivariate).unwrap();
        assert_eq!(
            eval_point2(&a, 0.5, 0.0).unwrap(),
            eval_point2(&b, 0.5, 0.0).unwrap()
        );
    }
}
