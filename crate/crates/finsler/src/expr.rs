//! Small closed expression grammar for metric coefficients and scalar
//! fields.
//!
//! Supported: `+ - * /`, `^` with a numeric exponent, `sqrt`, `exp`, `ln`
//! (alias `log`), `sin`, `cos`, `pow(e, c)`, numeric literals, and the
//! chart variables `x_1..x_n`, `y_1..y_n` (the underscore is optional).
//! Expressions evaluate over any [`Scalar`], so a parsed tree is usable both
//! for plain evaluation and inside the jet pipeline.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Chart coordinate x_{i+1}.
    X(usize),
    /// Tangent coordinate y_{i+1}.
    Y(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, f64),
    Sqrt(Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, at: 0 };
        let e = p.expr()?;
        if p.at != p.tokens.len() {
            return Err(Error::Parse(format!(
                "trailing input after expression: {:?}",
                &p.tokens[p.at..]
            )));
        }
        Ok(e)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// x_{i+1} (0-based argument).
    pub fn x(i: usize) -> Expr {
        Expr::X(i)
    }

    /// y_{i+1} (0-based argument).
    pub fn y(i: usize) -> Expr {
        Expr::Y(i)
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt(Box::new(self))
    }

    pub fn pow(self, e: f64) -> Expr {
        Expr::Pow(Box::new(self), e)
    }

    /// Evaluate over any scalar type; `x` must be non-empty (constants take
    /// their shape from it).
    pub fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        assert!(!x.is_empty(), "expression evaluation needs at least one x");
        let proto = &x[0];
        self.eval_inner(x, y, proto)
    }

    fn eval_inner<S: Scalar>(&self, x: &[S], y: &[S], proto: &S) -> Result<S> {
        Ok(match self {
            Expr::Const(c) => proto.lift(*c),
            Expr::X(i) => x.get(*i).cloned().ok_or_else(|| {
                Error::Domain(format!("x_{} beyond dimension {}", i + 1, x.len()))
            })?,
            Expr::Y(i) => y.get(*i).cloned().ok_or_else(|| {
                Error::Domain(format!("y_{} beyond dimension {}", i + 1, y.len()))
            })?,
            Expr::Add(a, b) => a.eval_inner(x, y, proto)? + b.eval_inner(x, y, proto)?,
            Expr::Sub(a, b) => a.eval_inner(x, y, proto)? - b.eval_inner(x, y, proto)?,
            Expr::Mul(a, b) => a.eval_inner(x, y, proto)? * b.eval_inner(x, y, proto)?,
            Expr::Div(a, b) => a.eval_inner(x, y, proto)? / b.eval_inner(x, y, proto)?,
            Expr::Neg(a) => -a.eval_inner(x, y, proto)?,
            Expr::Pow(a, e) => a.eval_inner(x, y, proto)?.powf(*e),
            Expr::Sqrt(a) => a.eval_inner(x, y, proto)?.sqrt(),
            Expr::Exp(a) => a.eval_inner(x, y, proto)?.exp(),
            Expr::Ln(a) => a.eval_inner(x, y, proto)?.ln(),
            Expr::Sin(a) => a.eval_inner(x, y, proto)?.sin(),
            Expr::Cos(a) => a.eval_inner(x, y, proto)?.cos(),
        })
    }

    pub fn uses_y(&self) -> bool {
        match self {
            Expr::Y(_) => true,
            Expr::Const(_) | Expr::X(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.uses_y() || b.uses_y()
            }
            Expr::Neg(a)
            | Expr::Pow(a, _)
            | Expr::Sqrt(a)
            | Expr::Exp(a)
            | Expr::Ln(a)
            | Expr::Sin(a)
            | Expr::Cos(a) => a.uses_y(),
        }
    }

    /// Largest variable index mentioned, as (max_x, max_y), 1-based counts.
    pub fn var_span(&self) -> (usize, usize) {
        match self {
            Expr::Const(_) => (0, 0),
            Expr::X(i) => (i + 1, 0),
            Expr::Y(i) => (0, i + 1),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (ax, ay) = a.var_span();
                let (bx, by) = b.var_span();
                (ax.max(bx), ay.max(by))
            }
            Expr::Neg(a)
            | Expr::Pow(a, _)
            | Expr::Sqrt(a)
            | Expr::Exp(a)
            | Expr::Ln(a)
            | Expr::Sin(a)
            | Expr::Cos(a) => a.var_span(),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Comma => write!(f, ","),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == '.'
                        || bytes[i] == 'e'
                        || bytes[i] == 'E'
                        || ((bytes[i] == '+' || bytes[i] == '-')
                            && i > start
                            && (bytes[i - 1] == 'e' || bytes[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number literal `{text}`")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(bytes[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(Error::Parse(format!("expected `{want}`, found `{t}`"))),
            None => Err(Error::Parse(format!(
                "expected `{want}`, found end of input"
            ))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc * self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = acc / self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let e = self.exponent()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    /// Exponents are numeric literals (optionally signed); general
    /// expression exponents are outside the grammar.
    fn exponent(&mut self) -> Result<f64> {
        let neg = matches!(self.peek(), Some(Tok::Minus));
        if neg {
            self.bump();
        }
        match self.bump() {
            Some(Tok::Num(v)) => Ok(if neg { -v } else { v }),
            other => Err(Error::Parse(format!(
                "exponent must be a number literal, found `{}`",
                other
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| "end of input".into())
            ))),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.ident(name),
            Some(t) => Err(Error::Parse(format!("unexpected token `{t}`"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }

    fn ident(&mut self, name: String) -> Result<Expr> {
        if let Some(var) = parse_var(&name) {
            return Ok(var);
        }
        let unary = |p: &mut Parser, wrap: fn(Box<Expr>) -> Expr| -> Result<Expr> {
            p.expect(Tok::LParen)?;
            let inner = p.expr()?;
            p.expect(Tok::RParen)?;
            Ok(wrap(Box::new(inner)))
        };
        match name.as_str() {
            "sqrt" => unary(self, Expr::Sqrt),
            "exp" => unary(self, Expr::Exp),
            "ln" | "log" => unary(self, Expr::Ln),
            "sin" => unary(self, Expr::Sin),
            "cos" => unary(self, Expr::Cos),
            "pow" => {
                self.expect(Tok::LParen)?;
                let base = self.expr()?;
                self.expect(Tok::Comma)?;
                let e = self.exponent()?;
                self.expect(Tok::RParen)?;
                Ok(base.pow(e))
            }
            "pi" => Ok(Expr::Const(std::f64::consts::PI)),
            other => Err(Error::Parse(format!(
                "unknown identifier `{other}` (variables are x_1.., y_1..)"
            ))),
        }
    }
}

/// `x_3`, `x3`, `y_1`, `y1` style variable names, 1-based.
fn parse_var(name: &str) -> Option<Expr> {
    let (head, rest) = name.split_at(1);
    let digits = rest.strip_prefix('_').unwrap_or(rest);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let k: usize = digits.parse().ok()?;
    if k == 0 {
        return None;
    }
    match head {
        "x" => Some(Expr::X(k - 1)),
        "y" => Some(Expr::Y(k - 1)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(src: &str, x: &[f64], y: &[f64]) -> f64 {
        Expr::parse(src).unwrap().eval(x, y).unwrap()
    }

    #[test]
    fn precedence_and_functions() {
        assert_eq!(ev("1 + 2 * 3", &[0.0], &[]), 7.0);
        assert_eq!(ev("(1 + 2) * 3", &[0.0], &[]), 9.0);
        assert_eq!(ev("2 ^ 3", &[0.0], &[]), 8.0);
        assert_eq!(ev("-x_1 ^ 2", &[3.0], &[]), -9.0);
        assert_eq!(ev("x1 * y_2", &[2.0, 0.0], &[0.0, 5.0]), 10.0);
        assert!((ev("sqrt(x_1^2 + y_1^2)", &[3.0], &[4.0]) - 5.0).abs() < 1e-15);
        assert!((ev("ln(exp(x_1))", &[0.7], &[]) - 0.7).abs() < 1e-15);
        assert!((ev("pow(x_1, -2)", &[2.0], &[]) - 0.25).abs() < 1e-15);
        assert!((ev("sin(pi)", &[0.0], &[])).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Expr::parse("x_1 +").is_err());
        assert!(Expr::parse("foo(x_1)").is_err());
        assert!(Expr::parse("x_0").is_err());
        assert!(Expr::parse("x_1 ^ y_1").is_err());
        assert!(Expr::parse("(x_1").is_err());
        assert!(Expr::parse("x_1 x_2").is_err());
    }

    #[test]
    fn var_span_and_y_detection() {
        let e = Expr::parse("x_2 * y_3 + 1").unwrap();
        assert!(e.uses_y());
        assert_eq!(e.var_span(), (2, 3));
        let f = Expr::parse("4 / (1 + x_1^2 + x_2^2)^2").unwrap();
        assert!(!f.uses_y());
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

        /// Jet evaluation of a parsed expression agrees with its analytic
        /// x-derivative computed from a second parsed expression.
        #[test]
        fn jet_derivative_matches_symbolic_derivative(
            a in -2.0f64..2.0, b in -2.0f64..2.0, x0 in 0.1f64..1.5,
        ) {
            use crate::diffengine::{partial, MultiIndex};
            // f = a x^3 + b x -> f' = 3a x^2 + b
            let f = Expr::parse("x_1^3").unwrap() * Expr::Const(a)
                + Expr::Const(b) * Expr::parse("x_1").unwrap();
            let d = partial(
                |z| f.eval(z, &[]).unwrap(),
                &[x0],
                &MultiIndex::new(vec![1]),
            ).unwrap();
            prop_assert!((d - (3.0 * a * x0 * x0 + b)).abs() < 1e-11);
        }
    }
}
