//! Expression language for user-supplied complex functions of one variable.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          (right associative)
//! atom   := number | 'i' | 'pi' | VAR | func '(' expr ')' | '(' expr ')'
//! func   := sqrt | log | exp | sin | cos
//! ```
//!
//! `VAR` is `z` unless another name is requested with [`parse_in`]. `sqrt`
//! and `log` are principal branches.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::complex::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Log,
    Exp,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sqrt" => Func::Sqrt,
            "log" => Func::Log,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Parsed literals are non-negative reals; built trees may hold any complex value.
    Num(C64),
    ImagUnit,
    Pi,
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(re: f64) -> Self {
        Expr::Num(C64::new(re, 0.0))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn call(f: Func, arg: Expr) -> Self {
        Expr::Call(f, Box::new(arg))
    }

    /// Replaces the variable by `with`.
    pub fn substitute(&self, with: &Expr) -> Expr {
        match self {
            Expr::Var => with.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(with))),
            Expr::Bin(op, l, r) => Expr::bin(*op, l.substitute(with), r.substitute(with)),
            Expr::Call(f, a) => Expr::call(*f, a.substitute(with)),
            other => other.clone(),
        }
    }

    fn conjugate_literals(&self) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(v.conj()),
            Expr::ImagUnit => Expr::Neg(Box::new(Expr::ImagUnit)),
            Expr::Neg(a) => Expr::Neg(Box::new(a.conjugate_literals())),
            Expr::Bin(op, l, r) => Expr::bin(*op, l.conjugate_literals(), r.conjugate_literals()),
            Expr::Call(f, a) => Expr::call(*f, a.conjugate_literals()),
            other => other.clone(),
        }
    }

    /// The expression for z ↦ conj(e(−1/conj z)), valid away from the
    /// principal cuts of any sqrt or log inside.
    pub fn antipodal_reflection(&self) -> Expr {
        let minus_inverse = Expr::Neg(Box::new(Expr::bin(BinOp::Div, Expr::num(1.0), Expr::Var)));
        self.conjugate_literals().substitute(&minus_inverse)
    }

    /// The expression for z ↦ e(ω z).
    pub fn rotated(&self, omega: C64) -> Expr {
        self.substitute(&Expr::bin(BinOp::Mul, Expr::Num(omega), Expr::Var))
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        eval_generic(self, z)
    }

    pub fn eval_dual(&self, z: DualComplex) -> Result<DualComplex> {
        eval_generic(self, z)
    }

    /// Prints with `var` as the variable name.
    pub fn to_source(&self, var: &str) -> String {
        let mut out = String::new();
        write_expr(self, var, 0, &mut out);
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_source("z"))
    }
}

// Binding strengths used by both parser and printer.
const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn strength(e: &Expr) -> u8 {
    match e {
        Expr::Num(v) if v.im != 0.0 || v.re.is_sign_negative() => ADD,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => ADD,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => MUL,
        Expr::Neg(_) => NEG,
        Expr::Bin(BinOp::Pow, ..) => POW,
        _ => ATOM,
    }
}

fn write_expr(e: &Expr, var: &str, min: u8, out: &mut String) {
    let wrap = strength(e) < min;
    if wrap {
        out.push('(');
    }
    match e {
        Expr::Num(v) => {
            if v.im == 0.0 && !v.re.is_sign_negative() {
                out.push_str(&format!("{:?}", v.re));
            } else {
                out.push_str(&format!("{:?} + {:?}*i", v.re, v.im));
            }
        }
        Expr::ImagUnit => out.push('i'),
        Expr::Pi => out.push_str("pi"),
        Expr::Var => out.push_str(var),
        Expr::Neg(a) => {
            out.push('-');
            write_expr(a, var, NEG, out);
        }
        Expr::Bin(op, l, r) => {
            let (sym, lmin, rmin) = match op {
                BinOp::Add => (" + ", ADD, MUL),
                BinOp::Sub => (" - ", ADD, MUL),
                BinOp::Mul => ("*", MUL, NEG),
                BinOp::Div => ("/", MUL, NEG),
                BinOp::Pow => ("^", ATOM, POW),
            };
            write_expr(l, var, lmin, out);
            out.push_str(sym);
            write_expr(r, var, rmin, out);
        }
        Expr::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(a, var, 0, out);
            out.push(')');
        }
    }
    if wrap {
        out.push(')');
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if start >= bytes.len() {
            return Ok((Tok::End, start));
        }
        let b = bytes[start];
        if b.is_ascii_digit() || b == b'.' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            let text = &self.src[start..end];
            let value: f64 = text.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            self.pos = end;
            return Ok((Tok::Num(value), start));
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((Tok::Ident(self.src[start..end].to_string()), start));
        }
        self.pos += 1;
        match b {
            b'+' | b'-' | b'*' | b'/' | b'^' => Ok((Tok::Op(b as char), start)),
            b'(' => Ok((Tok::LParen, start)),
            b')' => Ok((Tok::RParen, start)),
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                })
            }
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
    var: &'a str,
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<()> {
        let (t, o) = self.lexer.next()?;
        self.tok = t;
        self.offset = o;
        Ok(())
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if self.tok != Tok::RParen {
            return Err(Error::Syntax {
                offset: self.offset,
                message: "expected `)`".into(),
            });
        }
        self.advance()
    }

    fn expr(&mut self, min: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, bp) = match self.tok {
                Tok::Op('+') => (BinOp::Add, ADD),
                Tok::Op('-') => (BinOp::Sub, ADD),
                Tok::Op('*') => (BinOp::Mul, MUL),
                Tok::Op('/') => (BinOp::Div, MUL),
                _ => break,
            };
            if bp < min {
                break;
            }
            self.advance()?;
            let rhs = self.expr(bp + 1)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let offset = self.offset;
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Op('-') => {
                self.advance()?;
                let operand = self.expr(NEG)?;
                Ok(Expr::Neg(Box::new(operand)))
            }
            Tok::Num(v) => {
                self.advance()?;
                self.power_tail(Expr::num(v))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr(0)?;
                self.expect_rparen()?;
                self.power_tail(inner)
            }
            Tok::Ident(name) => {
                self.advance()?;
                let atom = if let Some(f) = Func::from_name(&name) {
                    if self.tok != Tok::LParen {
                        return Err(Error::Syntax {
                            offset: self.offset,
                            message: format!("expected `(` after `{name}`"),
                        });
                    }
                    self.advance()?;
                    let arg = self.expr(0)?;
                    self.expect_rparen()?;
                    Expr::call(f, arg)
                } else if name == self.var {
                    Expr::Var
                } else if name == "i" {
                    Expr::ImagUnit
                } else if name == "pi" {
                    Expr::Pi
                } else {
                    return Err(Error::UnknownIdentifier { name, offset });
                };
                self.power_tail(atom)
            }
            Tok::End => Err(Error::Syntax {
                offset,
                message: "unexpected end of input".into(),
            }),
            other => Err(Error::Syntax {
                offset,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    /// An atom followed by `^` binds tighter than any prefix minus. The
    /// exponent is parsed at unary level, which makes `^` right associative
    /// and admits `z^-2`.
    fn power_tail(&mut self, base: Expr) -> Result<Expr> {
        if self.tok == Tok::Op('^') {
            self.advance()?;
            let exponent = self.expr(NEG)?;
            return Ok(Expr::bin(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }
}

/// Parses an expression in the variable `z`.
pub fn parse(source: &str) -> Result<Expr> {
    parse_in(source, "z")
}

/// Parses an expression in the named variable.
pub fn parse_in(source: &str, var: &str) -> Result<Expr> {
    if source.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        lexer: Lexer { src: source, pos: 0 },
        tok: Tok::End,
        offset: 0,
        var,
    };
    p.advance()?;
    let e = p.expr(0)?;
    if p.tok != Tok::End {
        return Err(Error::Syntax {
            offset: p.offset,
            message: "trailing input".into(),
        });
    }
    Ok(e)
}

/// A value paired with its derivative along one complex direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualComplex {
    pub value: C64,
    pub derivative: C64,
}

impl DualComplex {
    pub fn new(value: C64, derivative: C64) -> Self {
        Self { value, derivative }
    }

    pub fn variable(value: C64) -> Self {
        Self::new(value, C64::new(1.0, 0.0))
    }

    pub fn constant(value: C64) -> Self {
        Self::new(value, C64::new(0.0, 0.0))
    }
}

impl Add for DualComplex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.derivative + o.derivative)
    }
}

impl Sub for DualComplex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.derivative - o.derivative)
    }
}

impl Mul for DualComplex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.value * o.value,
            self.derivative * o.value + self.value * o.derivative,
        )
    }
}

impl Div for DualComplex {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.value / o.value;
        Self::new(q, (self.derivative - q * o.derivative) / o.value)
    }
}

impl Neg for DualComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.derivative)
    }
}

/// Numbers the evaluator can run on.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn lift(v: C64) -> Self;
    fn value(self) -> C64;
    /// Some(n) when the quantity is a constant real integer.
    fn integer_constant(self) -> Option<i32>;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

fn as_small_integer(v: C64) -> Option<i32> {
    if v.im == 0.0 && v.re.fract() == 0.0 && v.re.abs() <= 64.0 {
        Some(v.re as i32)
    } else {
        None
    }
}

impl Scalar for C64 {
    fn lift(v: C64) -> Self {
        v
    }
    fn value(self) -> C64 {
        self
    }
    fn integer_constant(self) -> Option<i32> {
        as_small_integer(self)
    }
    fn sqrt(self) -> Self {
        C64::sqrt(self)
    }
    fn ln(self) -> Self {
        C64::ln(self)
    }
    fn exp(self) -> Self {
        C64::exp(self)
    }
    fn sin(self) -> Self {
        C64::sin(self)
    }
    fn cos(self) -> Self {
        C64::cos(self)
    }
}

impl Scalar for DualComplex {
    fn lift(v: C64) -> Self {
        Self::constant(v)
    }
    fn value(self) -> C64 {
        self.value
    }
    fn integer_constant(self) -> Option<i32> {
        if self.derivative == C64::new(0.0, 0.0) {
            as_small_integer(self.value)
        } else {
            None
        }
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        Self::new(s, self.derivative / (2.0 * s))
    }
    fn ln(self) -> Self {
        Self::new(self.value.ln(), self.derivative / self.value)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, self.derivative * e)
    }
    fn sin(self) -> Self {
        Self::new(self.value.sin(), self.derivative * self.value.cos())
    }
    fn cos(self) -> Self {
        Self::new(self.value.cos(), -self.derivative * self.value.sin())
    }
}

const TINY: f64 = 1e-300;

fn domain<S: Scalar>(x: S, what: &str) -> Result<()> {
    if x.value().norm() < TINY {
        return Err(Error::Domain(format!("{what} at {}", x.value())));
    }
    Ok(())
}

fn powi<S: Scalar>(base: S, n: i32) -> Result<S> {
    let mut acc = S::lift(C64::new(1.0, 0.0));
    for _ in 0..n.unsigned_abs() {
        acc = acc * base;
    }
    if n < 0 {
        domain(base, "negative power of zero")?;
        acc = S::lift(C64::new(1.0, 0.0)) / acc;
    }
    Ok(acc)
}

pub fn eval_generic<S: Scalar>(e: &Expr, z: S) -> Result<S> {
    let out = match e {
        Expr::Num(v) => S::lift(*v),
        Expr::ImagUnit => S::lift(C64::new(0.0, 1.0)),
        Expr::Pi => S::lift(C64::new(std::f64::consts::PI, 0.0)),
        Expr::Var => z,
        Expr::Neg(a) => -eval_generic(a, z)?,
        Expr::Bin(op, l, r) => {
            let a = eval_generic(l, z)?;
            let b = eval_generic(r, z)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    domain(b, "division by zero")?;
                    a / b
                }
                BinOp::Pow => match b.integer_constant() {
                    Some(n) => powi(a, n)?,
                    None => {
                        domain(a, "non-integer power of zero")?;
                        (b * a.ln()).exp()
                    }
                },
            }
        }
        Expr::Call(f, a) => {
            let x = eval_generic(a, z)?;
            match f {
                Func::Sqrt => {
                    domain(x, "sqrt branch point")?;
                    x.sqrt()
                }
                Func::Log => {
                    domain(x, "log of zero")?;
                    x.ln()
                }
                Func::Exp => x.exp(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }
        }
    };
    let v = out.value();
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Domain(format!("non-finite value in `{e}`")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::c;
    use proptest::prelude::*;

    #[test]
    fn parses_reference_ast() {
        let e = parse("z^2 + i*z").unwrap();
        let want = Expr::bin(
            BinOp::Add,
            Expr::bin(BinOp::Pow, Expr::Var, Expr::num(2.0)),
            Expr::bin(BinOp::Mul, Expr::ImagUnit, Expr::Var),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn unterminated_call_reports_end_offset() {
        assert_eq!(
            parse("sqrt(").unwrap_err(),
            Error::Syntax {
                offset: 5,
                message: "unexpected end of input".into()
            }
        );
    }

    #[test]
    fn unknown_identifier() {
        assert!(matches!(parse("z + w"), Err(Error::UnknownIdentifier { ref name, offset: 4 }) if name == "w"));
        assert!(parse_in("w^3", "w").is_ok());
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("-z^2").unwrap(), Expr::Neg(Box::new(parse("z^2").unwrap())));
        assert_eq!(parse("2^3^2").unwrap().eval(c(0.0, 0.0)).unwrap(), c(512.0, 0.0));
        assert_eq!(parse("2*3+4").unwrap().eval(c(0.0, 0.0)).unwrap(), c(10.0, 0.0));
        assert_eq!(parse("2*(3+4)").unwrap().eval(c(0.0, 0.0)).unwrap(), c(14.0, 0.0));
        assert_eq!(parse("8/2/2").unwrap().eval(c(0.0, 0.0)).unwrap(), c(2.0, 0.0));
        assert_eq!(parse("2^-1").unwrap().eval(c(0.0, 0.0)).unwrap(), c(0.5, 0.0));
        assert_eq!(parse("-2*3").unwrap().eval(c(0.0, 0.0)).unwrap(), c(-6.0, 0.0));
        assert_eq!(parse("1e-3*z").unwrap().eval(c(2.0, 0.0)).unwrap(), c(2e-3, 0.0));
    }

    #[test]
    fn exp_log_identity() {
        let z = c(2.0, 1.0);
        let v = parse("exp(log(z))").unwrap().eval(z).unwrap();
        assert!((v - z).norm() < 1e-14);
    }

    #[test]
    fn dual_examples() {
        let d = parse("z^2")
            .unwrap()
            .eval_dual(DualComplex::new(c(3.0, 0.0), c(1.0, 0.0)))
            .unwrap();
        assert_eq!(d, DualComplex::new(c(9.0, 0.0), c(6.0, 0.0)));
        let d = parse("i")
            .unwrap()
            .eval_dual(DualComplex::variable(c(0.7, -2.0)))
            .unwrap();
        assert_eq!(d, DualComplex::new(c(0.0, 1.0), c(0.0, 0.0)));
        let d = parse("sqrt(z)")
            .unwrap()
            .eval_dual(DualComplex::new(c(4.0, 0.0), c(1.0, 0.0)))
            .unwrap();
        assert!((d.value - 2.0).norm() < 1e-15 && (d.derivative - 0.25).norm() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(parse("1/z").unwrap().eval(c(0.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(
            parse("log(z)").unwrap().eval(c(0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            parse("sqrt(z)").unwrap().eval(c(0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(parse("z^2").unwrap().eval(c(0.0, 0.0)).is_ok());
    }

    #[test]
    fn derivative_matches_richardson_differences() {
        let corpus = [
            "z^2 + i*z",
            "sqrt(1 + z^2)",
            "exp(z)*sin(z)/(2 + cos(z))",
            "log(1 + z/3) - log(1 - z)",
            "z^3 - 2*z^(-1)",
            "(z + i)^2.5",
            "-i*(log(1 + z*(0.5 + 0.5*i)) + log(1 - z))",
        ];
        let pts = [c(0.3, 0.2), c(-0.4, 0.1), c(0.1, -0.45)];
        for src in corpus {
            let e = parse(src).unwrap();
            for &z in &pts {
                let d = e.eval_dual(DualComplex::variable(z)).unwrap();
                let fd = |h: f64| (e.eval(z + h).unwrap() - e.eval(z - h).unwrap()) / (2.0 * h);
                let h = 1e-3;
                let rich = (4.0 * fd(h / 2.0) - fd(h)) / 3.0;
                let rel = (d.derivative - rich).norm() / d.derivative.norm().max(1e-12);
                assert!(rel < 1e-7, "{src} at {z}: {rel}");
            }
        }
    }

    #[test]
    fn reflection_of_linear_expression() {
        // z ↦ conj(i·(−1/conj z)) = i/z.
        let e = parse("i*z").unwrap().antipodal_reflection();
        let z = c(0.3, -0.7);
        assert!((e.eval(z).unwrap() - c(0.0, 1.0) / z).norm() < 1e-15);
    }

    #[test]
    fn rotation_substitutes() {
        let w = C64::from_polar(1.0, 0.4);
        let e = parse("z^2").unwrap().rotated(w);
        let z = c(0.2, 0.5);
        assert!((e.eval(z).unwrap() - (w * z).powi(2)).norm() < 1e-15);
    }

    #[test]
    fn leibniz_rule_on_random_triples() {
        let a = DualComplex::new(c(0.3, 1.2), c(-0.7, 0.4));
        let b = DualComplex::new(c(-1.1, 0.5), c(0.2, 2.0));
        let cc = DualComplex::new(c(0.9, -0.3), c(1.5, 0.1));
        let p = a * b * cc;
        let want =
            a.derivative * b.value * cc.value + a.value * b.derivative * cc.value + a.value * b.value * cc.derivative;
        assert!((p.derivative - want).norm() < 1e-14);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|n| Expr::num(n as f64 / 8.0)),
            Just(Expr::ImagUnit),
            Just(Expr::Pi),
            Just(Expr::Var),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), inner.clone(), 0..5u8).prop_map(|(l, r, k)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][k as usize];
                    Expr::bin(op, l, r)
                }),
                (inner, 0..5u8).prop_map(|(a, k)| {
                    let f = [Func::Sqrt, Func::Log, Func::Exp, Func::Sin, Func::Cos][k as usize];
                    Expr::call(f, a)
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let back = parse(&printed).unwrap();
            prop_assert_eq!(back, e, "printed as {}", printed);
        }

        #[test]
        fn parser_never_panics(s in ".{0,40}") {
            let _ = parse(&s);
        }

        #[test]
        fn parser_never_panics_on_operator_soup(s in "[-+*/^()zi0-9. ]{0,30}") {
            let _ = parse(&s);
        }
    }
}
