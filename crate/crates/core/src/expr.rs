//! The expression language used for map components.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          right associative
//! atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Identifiers are declared variables, the constants `pi` and `i`, or one of
//! the functions `sin cos tan exp log sqrt cbrt sinh cosh`. Exponents must not
//! depend on the variables.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Identifier,
    Operator,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub offset: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                TokenKind::Operator
            }
            b'(' => {
                i += 1;
                TokenKind::LParen
            }
            b')' => {
                i += 1;
                TokenKind::RParen
            }
            b',' => {
                i += 1;
                TokenKind::Comma
            }
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i)?;
                TokenKind::Number
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                TokenKind::Identifier
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push(Token {
            kind,
            lexeme: src[start..i].to_string(),
            offset: start,
        });
    }
    Ok(out)
}

fn scan_number(b: &[u8], mut i: usize) -> Result<usize> {
    let start = i;
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - s
    };
    let mut n = digits(&mut i);
    if i < b.len() && b[i] == b'.' {
        i += 1;
        n += digits(&mut i);
    }
    if n == 0 {
        return Err(Error::Syntax {
            offset: start,
            message: "malformed number".into(),
        });
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if digits(&mut j) == 0 {
            return Err(Error::Syntax {
                offset: i,
                message: "malformed exponent".into(),
            });
        }
        i = j;
    }
    Ok(i)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Cbrt,
    Sinh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Cbrt,
        Func::Sinh,
        Func::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Cbrt => "cbrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply_jet<S: Scalar>(self, x: &Jet<S>) -> Result<Jet<S>> {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Cbrt => x.cbrt(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
        }
    }

    fn apply<S: Scalar>(self, x: S) -> Result<S> {
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => {
                if x.cos() == S::zero() {
                    return Err(Error::Domain("tan at a pole".into()));
                }
                x.tan()
            }
            Func::Exp => x.exp(),
            Func::Log => {
                if x == S::zero() || (!S::IS_COMPLEX && x.re() <= 0.0) {
                    return Err(Error::Domain(format!("log of {x}")));
                }
                x.ln()
            }
            Func::Sqrt => {
                if !S::IS_COMPLEX && x.re() < 0.0 {
                    return Err(Error::Domain(format!("sqrt of negative real {}", x.re())));
                }
                x.sqrt()
            }
            Func::Cbrt => x.cbrt(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
        })
    }
}

/// Parsed expression. Numeric literals are non-negative; signs are `Neg` nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Pi,
    /// The imaginary unit; only meaningful over ℂ.
    I,
    Var { index: usize, name: String },
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        if c < 0.0 {
            Expr::Neg(Box::new(Expr::Const(-c)))
        } else {
            Expr::Const(c)
        }
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    /// `true` when no variable occurs.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::I => true,
            Expr::Var { .. } => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Plain scalar evaluation, independent of the jet machinery.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S> {
        Ok(match self {
            Expr::Const(c) => S::lift(*c),
            Expr::Pi => S::lift(std::f64::consts::PI),
            Expr::I => imaginary_unit::<S>()?,
            Expr::Var { index, .. } => *point.get(*index).ok_or(Error::PointArity {
                expected: index + 1,
                got: point.len(),
            })?,
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Call(f, a) => f.apply(a.eval(point)?)?,
            Expr::Binary(op, a, b) => {
                let x = a.eval(point)?;
                match op {
                    BinOp::Add => x + b.eval(point)?,
                    BinOp::Sub => x - b.eval(point)?,
                    BinOp::Mul => x * b.eval(point)?,
                    BinOp::Div => {
                        let y = b.eval(point)?;
                        if y == S::zero() {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        x / y
                    }
                    BinOp::Pow => scalar_pow(x, b.eval::<S>(&[])?)?,
                }
            }
        })
    }

    /// Jet of the expression at `point`.
    pub fn eval_jet<S: Scalar>(&self, point: &[S], order: usize) -> Result<Jet<S>> {
        self.eval_jets(&Jet::variables(point, order))
    }

    /// Evaluates with each variable replaced by the given jet (so the result is
    /// the jet of the composite map).
    pub fn eval_jets<S: Scalar>(&self, inputs: &[Jet<S>]) -> Result<Jet<S>> {
        let first = inputs.first().ok_or(Error::PointArity {
            expected: 1,
            got: 0,
        })?;
        let (nvars, order) = (first.nvars(), first.order());
        self.eval_jets_inner(inputs, nvars, order)
    }

    fn eval_jets_inner<S: Scalar>(&self, inputs: &[Jet<S>], nvars: usize, order: usize) -> Result<Jet<S>> {
        let rec = |e: &Expr| e.eval_jets_inner(inputs, nvars, order);
        Ok(match self {
            Expr::Const(_) | Expr::Pi | Expr::I => Jet::constant(self.eval::<S>(&[])?, nvars, order),
            Expr::Var { index, .. } => inputs
                .get(*index)
                .ok_or(Error::PointArity {
                    expected: index + 1,
                    got: inputs.len(),
                })?
                .clone(),
            Expr::Neg(a) => -&rec(a)?,
            Expr::Call(f, a) => f.apply_jet(&rec(a)?)?,
            Expr::Binary(op, a, b) => {
                let x = rec(a)?;
                match op {
                    BinOp::Add => &x + &rec(b)?,
                    BinOp::Sub => &x - &rec(b)?,
                    BinOp::Mul => &x * &rec(b)?,
                    BinOp::Div => x.try_div(&rec(b)?)?,
                    BinOp::Pow => jet_pow(&x, b.eval::<S>(&[])?)?,
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn imaginary_unit<S: Scalar>() -> Result<S> {
    if !S::IS_COMPLEX {
        return Err(Error::Domain("the imaginary unit `i` needs field: complex".into()));
    }
    // i = sqrt(-1) on the principal branch
    Ok((-S::one()).sqrt())
}

fn as_integer<S: Scalar>(p: S) -> Option<i64> {
    (p.im() == 0.0 && p.re().fract() == 0.0 && p.re().abs() < 1e9).then(|| p.re() as i64)
}

fn scalar_pow<S: Scalar>(x: S, p: S) -> Result<S> {
    if let Some(n) = as_integer(p) {
        if n < 0 && x == S::zero() {
            return Err(Error::Domain("negative power of zero".into()));
        }
        return Ok(x.powi(n as i32));
    }
    if x.is_positive_real() {
        return Ok((x.ln() * p).exp());
    }
    Err(Error::Domain(format!("non-integer power of {x}")))
}

fn jet_pow<S: Scalar>(x: &Jet<S>, p: S) -> Result<Jet<S>> {
    if let Some(n) = as_integer(p) {
        return x.powi(n);
    }
    if p.im() == 0.0 {
        return x.powf(p.re());
    }
    if !x.value().is_positive_real() {
        return Err(Error::Domain(format!("non-integer power of {}", x.value())));
    }
    x.ln()?.scale(p).exp()
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Pi => f.write_str("pi"),
            Expr::I => f.write_str("i"),
            Expr::Var { name, .. } => f.write_str(name),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_child(f, a.precedence() < 3)
            }
            Expr::Binary(BinOp::Pow, a, b) => {
                a.write_child(f, a.precedence() <= 4)?;
                f.write_str("^")?;
                b.write_child(f, b.precedence() < 3)
            }
            Expr::Binary(op, a, b) => {
                let p = self.precedence();
                a.write_child(f, a.precedence() < p)?;
                if p == 1 {
                    write!(f, " {} ", op.symbol())?;
                } else {
                    f.write_str(op.symbol())?;
                }
                // left associative: equal precedence on the right needs parens
                b.write_child(f, b.precedence() <= p)
            }
        }
    }
}

/// Parses `src` with the given variable names (their order fixes the indices).
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        vars,
        end: src.len(),
    };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(Error::Syntax {
            offset: t.offset,
            message: format!("unexpected `{}`", t.lexeme),
        });
    }
    Ok(e)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self.tokens.get(self.pos).cloned().ok_or(Error::Syntax {
            offset: self.end,
            message: "unexpected end of input".into(),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn eat_op(&mut self, ops: &[&str]) -> Option<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Operator && ops.contains(&t.lexeme.as_str()) => {
                let s = t.lexeme.clone();
                self.pos += 1;
                Some(s)
            }
            _ => None,
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token> {
        let t = self.next()?;
        if t.kind != kind {
            return Err(Error::Syntax {
                offset: t.offset,
                message: format!("expected {what}, found `{}`", t.lexeme),
            });
        }
        Ok(t)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&["+", "-"]) {
            let rhs = self.term()?;
            let op = if op == "+" { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&["*", "/"]) {
            let rhs = self.unary()?;
            let op = if op == "*" { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&["-"]).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        let Some(at) = self.peek().map(|t| t.offset) else {
            return Ok(base);
        };
        if self.eat_op(&["^"]).is_none() {
            return Ok(base);
        }
        let exponent = self.unary()?;
        if !exponent.is_constant() {
            return Err(Error::Syntax {
                offset: at,
                message: "exponent must not depend on the variables".into(),
            });
        }
        Ok(Expr::binary(BinOp::Pow, base, exponent))
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.next()?;
        match t.kind {
            TokenKind::Number => t.lexeme.parse::<f64>().map(Expr::Const).map_err(|_| Error::Syntax {
                offset: t.offset,
                message: format!("bad number `{}`", t.lexeme),
            }),
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(e)
            }
            TokenKind::Identifier => self.identifier(t),
            _ => Err(Error::Syntax {
                offset: t.offset,
                message: format!("unexpected `{}`", t.lexeme),
            }),
        }
    }

    fn identifier(&mut self, t: Token) -> Result<Expr> {
        let calls = matches!(self.peek(), Some(n) if n.kind == TokenKind::LParen);
        if let Some(index) = self.vars.iter().position(|v| *v == t.lexeme) {
            if !calls {
                return Ok(Expr::Var {
                    index,
                    name: t.lexeme,
                });
            }
        }
        if calls {
            let Some(func) = Func::from_name(&t.lexeme) else {
                return Err(Error::Syntax {
                    offset: t.offset,
                    message: format!("unknown function `{}`", t.lexeme),
                });
            };
            self.pos += 1;
            let mut args = vec![self.expr()?];
            loop {
                let close = self.next()?;
                match close.kind {
                    TokenKind::RParen => break,
                    TokenKind::Comma => args.push(self.expr()?),
                    _ => {
                        return Err(Error::Syntax {
                            offset: close.offset,
                            message: format!("expected `,` or `)`, found `{}`", close.lexeme),
                        })
                    }
                }
            }
            if args.len() != 1 {
                return Err(Error::Arity {
                    name: t.lexeme,
                    expected: 1,
                    got: args.len(),
                    offset: t.offset,
                });
            }
            return Ok(Expr::Call(func, Box::new(args.pop().expect("one argument"))));
        }
        match t.lexeme.as_str() {
            "pi" => Ok(Expr::Pi),
            "i" => Ok(Expr::I),
            _ if Func::from_name(&t.lexeme).is_some() => Err(Error::Syntax {
                offset: t.offset,
                message: format!("function `{}` needs an argument list", t.lexeme),
            }),
            _ => Err(Error::UndeclaredVariable {
                name: t.lexeme,
                offset: t.offset,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn var(index: usize, name: &str) -> Expr {
        Expr::Var {
            index,
            name: name.into(),
        }
    }

    fn pow(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Pow, a, b)
    }

    #[test]
    fn sum_of_squares() {
        let e = parse("u^2 + v^2", &["u", "v"]).unwrap();
        let want = Expr::binary(
            BinOp::Add,
            pow(var(0, "u"), Expr::Const(2.0)),
            pow(var(1, "v"), Expr::Const(2.0)),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn negation_binds_looser_than_power() {
        let e = parse("-u^2", &["u"]).unwrap();
        assert_eq!(e, Expr::Neg(Box::new(pow(var(0, "u"), Expr::Const(2.0)))));
        let e = parse("2^3^2", &[]).unwrap();
        assert_eq!(e.eval::<f64>(&[]).unwrap(), 512.0);
        let e = parse("2^-1", &[]).unwrap();
        assert_eq!(e.eval::<f64>(&[]).unwrap(), 0.5);
    }

    #[test]
    fn cycloid_component() {
        let e = parse("w - sin(w)", &["w"]).unwrap();
        assert_eq!(
            e,
            Expr::binary(BinOp::Sub, var(0, "w"), Expr::Call(Func::Sin, Box::new(var(0, "w"))))
        );
    }

    #[test]
    fn rejections_carry_offsets() {
        assert!(matches!(
            parse("u + q", &["u"]),
            Err(Error::UndeclaredVariable { offset: 4, .. })
        ));
        assert!(matches!(
            parse("sin(u, u)", &["u"]),
            Err(Error::Arity { expected: 1, got: 2, .. })
        ));
        assert!(matches!(parse("u +", &["u"]), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("u ^ u", &["u"]), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("(u", &["u"]), Err(Error::Syntax { .. })));
        assert!(matches!(parse("u $ 2", &["u"]), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("", &["u"]), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("1e", &[]), Err(Error::Syntax { .. })));
        assert!(matches!(parse("foo(u)", &["u"]), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("sin", &[]), Err(Error::Syntax { .. })));
        assert!(matches!(parse("u v", &["u", "v"]), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("*u", &["u"]), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn accepted_productions() {
        for src in ["1.5e-3*u", ".5+u", "(u)", "-(-u)", "cosh(u)/sinh(u+1)", "u-2*pi", "cbrt(-8)"] {
            parse(src, &["u"]).unwrap();
        }
    }

    #[test]
    fn product_rule() {
        let e = parse("u*v", &["u", "v"]).unwrap();
        let j = e.eval_jet(&[2.0, 3.0], 1).unwrap();
        assert_eq!(j.value(), 6.0);
        assert_eq!(j.gradient(), vec![3.0, 2.0]);
    }

    #[test]
    fn cosine_series() {
        let e = parse("1 - cos(t)", &["t"]).unwrap();
        let j = e.eval_jet(&[0.0], 3).unwrap();
        assert_eq!(j.coeff(&[0]), 0.0);
        assert_eq!(j.coeff(&[1]), 0.0);
        assert!((j.coeff(&[2]) - 0.5).abs() < 1e-16);
        assert!(j.coeff(&[3]).abs() < 1e-16);
    }

    #[test]
    fn imaginary_unit_needs_complex_field() {
        let e = parse("exp(i*pi) + 1", &[]).unwrap();
        assert!(matches!(e.eval::<f64>(&[]), Err(Error::Domain(_))));
        let z: Complex64 = e.eval(&[]).unwrap();
        assert!(z.norm() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let e = parse("log(u)", &["u"]).unwrap();
        assert!(matches!(e.eval_jet(&[-1.0], 2), Err(Error::Domain(_))));
        let e = parse("1/u", &["u"]).unwrap();
        assert!(matches!(e.eval_jet(&[0.0], 2), Err(Error::Domain(_))));
        let e = parse("u^0.5", &["u"]).unwrap();
        assert!(matches!(e.eval_jet(&[-1.0], 2), Err(Error::Domain(_))));
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "-u^2",
            "(-u)^2",
            "u - (v - w)",
            "u/(v*w)",
            "-(u*v)",
            "u^2^3",
            "(u^2)^3",
            "u^-2",
            "sin(u + v)*2",
            "u - -v",
            "0.15*cos(2*u)*sin(v)",
        ] {
            let e = parse(src, &["u", "v", "w"]).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed, &["u", "v", "w"]).unwrap(), e, "{src} -> {printed}");
        }
    }
}
