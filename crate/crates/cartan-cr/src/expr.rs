//! Parsing and evaluation of analytic defining/graphing functions.
//!
//! Grammar (the CLI contract, bit-exact):
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := unary (("*"|"/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" signed_int)?
//! atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//! NUMBER := digits ("." digits)? (("e"|"E") ("+"|"-")? digits)?
//! IDENT  := letter (letter|digit|"_")*
//! ```
//!
//! Identifiers in the declared variable set become [`Expr::Var`]; known
//! function names followed by `(` become [`Expr::Call`]; every other plain
//! identifier is a parameter, bound at evaluation time.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::jet::{ArithOp, Jet, JetError, JetFn, Scalar};

/// Abstract syntax tree of an analytic expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(String),
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowInt(Box<Expr>, i32),
    Call(JetFn, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at position {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound parameter `{0}`")]
    UnboundParam(String),
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("no variable bindings supplied")]
    NoBindings,
    #[error("variable bindings have mismatched jet shapes")]
    MixedShapes,
    #[error("in `{location}`: {source}")]
    Jet {
        location: String,
        source: JetError,
    },
}

fn jet_err(node: &Expr, source: JetError) -> EvalError {
    EvalError::Jet {
        location: node.to_string(),
        source,
    }
}

// ---- lexer -----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, is_int: bool, text: String },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
        }
        let c = self.src[self.pos];
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() {
            let mut is_int = true;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos] == b'.' {
                is_int = false;
                self.pos += 1;
                let frac_start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos == frac_start {
                    return Err(self.error(self.pos, "expected digits after decimal point"));
                }
            }
            if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E')
            {
                // only consume as an exponent if it is one
                let mark = self.pos;
                self.pos += 1;
                if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
                {
                    self.pos += 1;
                }
                if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    is_int = false;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                } else {
                    self.pos = mark;
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii number")
                .to_string();
            let value: f64 = text
                .parse()
                .map_err(|_| self.error(start, format!("invalid number `{text}`")))?;
            return Ok((Tok::Num { value, is_int, text }, start));
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii identifier")
                .to_string();
            return Ok((Tok::Ident(text), start));
        }
        Err(self.error(start, format!("unexpected character `{}`", c as char)))
    }
}

// ---- parser ----------------------------------------------------------------

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_pos: usize,
    variables: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, variables: &[&str]) -> Result<Parser<'a>, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, tok_pos) = lexer.next_token()?;
        Ok(Parser {
            lexer,
            tok,
            tok_pos,
            variables: variables.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, pos) = self.lexer.next_token()?;
        self.tok = tok;
        self.tok_pos = pos;
        Ok(())
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.tok_pos,
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.bump()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exponent = self.signed_int()?;
            return Ok(Expr::PowInt(Box::new(base), exponent));
        }
        Ok(base)
    }

    fn signed_int(&mut self) -> Result<i32, ParseError> {
        let negative = match self.tok {
            Tok::Minus => {
                self.bump()?;
                true
            }
            Tok::Plus => {
                self.bump()?;
                false
            }
            _ => false,
        };
        match std::mem::replace(&mut self.tok, Tok::Eof) {
            Tok::Num { is_int: true, text, .. } => {
                let n: i32 = text
                    .parse()
                    .map_err(|_| self.error(format!("integer exponent `{text}` out of range")))?;
                self.bump()?;
                Ok(if negative { -n } else { n })
            }
            other => {
                self.tok = other;
                Err(self.error("expected integer exponent after `^`"))
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match std::mem::replace(&mut self.tok, Tok::Eof) {
            Tok::Num { value, .. } => {
                self.bump()?;
                Ok(Expr::Number(value))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return Err(self.error("expected `)`"));
                }
                self.bump()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump()?;
                if self.tok == Tok::LParen {
                    let func = JetFn::from_name(&name)
                        .ok_or_else(|| self.error(format!("unknown function `{name}`")))?;
                    self.bump()?;
                    let arg = self.expr()?;
                    if self.tok != Tok::RParen {
                        return Err(self.error("expected `)` after function argument"));
                    }
                    self.bump()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else if self.variables.iter().any(|v| v == &name) {
                    Ok(Expr::Var(name))
                } else if JetFn::from_name(&name).is_some() {
                    Err(self.error(format!("function `{name}` requires an argument list")))
                } else {
                    Ok(Expr::Param(name))
                }
            }
            other => {
                self.tok = other;
                Err(self.error("expected a term"))
            }
        }
    }
}

impl Expr {
    /// Parse `text` over the declared variable names. Plain identifiers
    /// outside the variable set are parameters, bound at evaluation time.
    pub fn parse(text: &str, variables: &[&str]) -> Result<Expr, ParseError> {
        let mut parser = Parser::new(text, variables)?;
        let expr = parser.expr()?;
        if parser.tok != Tok::Eof {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(expr)
    }

    /// Names of all variables appearing in the tree.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Var(name) = e {
                out.insert(name.clone());
            }
        });
        out
    }

    /// Names of all parameters appearing in the tree.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Param(name) = e {
                out.insert(name.clone());
            }
        });
        out
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Number(_) | Expr::Var(_) | Expr::Param(_) => {}
            Expr::Neg(a) | Expr::PowInt(a, _) | Expr::Call(_, a) => a.walk(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    /// Evaluate to a jet, mapping AST nodes onto jet operations. All bindings
    /// must share one jet shape.
    pub fn eval_jet<T: Scalar>(
        &self,
        bindings: &HashMap<String, Jet<T>>,
        params: &HashMap<String, f64>,
    ) -> Result<Jet<T>, EvalError> {
        let mut iter = bindings.values();
        let first = iter.next().ok_or(EvalError::NoBindings)?;
        let (nv, deg) = (first.num_vars(), first.degree());
        if iter.any(|j| j.num_vars() != nv || j.degree() != deg) {
            return Err(EvalError::MixedShapes);
        }
        let out = self.eval_jet_inner(bindings, params, nv, deg)?;
        out.check_finite().map_err(|e| jet_err(self, e))?;
        Ok(out)
    }

    fn eval_jet_inner<T: Scalar>(
        &self,
        bindings: &HashMap<String, Jet<T>>,
        params: &HashMap<String, f64>,
        nv: usize,
        deg: usize,
    ) -> Result<Jet<T>, EvalError> {
        match self {
            Expr::Number(v) => Ok(Jet::constant(T::from_f64(*v), nv, deg)),
            Expr::Param(name) => params
                .get(name)
                .map(|&v| Jet::constant(T::from_f64(v), nv, deg))
                .ok_or_else(|| EvalError::UnboundParam(name.clone())),
            Expr::Var(name) => bindings
                .get(name)
                .cloned()
                .ok_or_else(|| EvalError::UnboundVar(name.clone())),
            Expr::Neg(a) => Ok(-&a.eval_jet_inner(bindings, params, nv, deg)?),
            Expr::Add(a, b) => Jet::arith(
                ArithOp::Add,
                &a.eval_jet_inner(bindings, params, nv, deg)?,
                &b.eval_jet_inner(bindings, params, nv, deg)?,
            )
            .map_err(|e| jet_err(self, e)),
            Expr::Sub(a, b) => Jet::arith(
                ArithOp::Sub,
                &a.eval_jet_inner(bindings, params, nv, deg)?,
                &b.eval_jet_inner(bindings, params, nv, deg)?,
            )
            .map_err(|e| jet_err(self, e)),
            Expr::Mul(a, b) => Jet::arith(
                ArithOp::Mul,
                &a.eval_jet_inner(bindings, params, nv, deg)?,
                &b.eval_jet_inner(bindings, params, nv, deg)?,
            )
            .map_err(|e| jet_err(self, e)),
            Expr::Div(a, b) => Jet::arith(
                ArithOp::Div,
                &a.eval_jet_inner(bindings, params, nv, deg)?,
                &b.eval_jet_inner(bindings, params, nv, deg)?,
            )
            .map_err(|e| jet_err(self, e)),
            Expr::PowInt(base, n) => base
                .eval_jet_inner(bindings, params, nv, deg)?
                .powi(*n)
                .map_err(|e| jet_err(self, e)),
            Expr::Call(func, arg) => arg
                .eval_jet_inner(bindings, params, nv, deg)?
                .apply(*func)
                .map_err(|e| jet_err(self, e)),
        }
    }

    /// Scalar evaluation; an independent degree-0 code path using value-level
    /// arithmetic with the same domain conventions (closed at endpoints).
    pub fn eval_scalar<T: Scalar>(
        &self,
        point: &HashMap<String, T>,
        params: &HashMap<String, f64>,
    ) -> Result<T, EvalError> {
        match self {
            Expr::Number(v) => Ok(T::from_f64(*v)),
            Expr::Param(name) => params
                .get(name)
                .map(|&v| T::from_f64(v))
                .ok_or_else(|| EvalError::UnboundParam(name.clone())),
            Expr::Var(name) => point
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnboundVar(name.clone())),
            Expr::Neg(a) => Ok(-a.eval_scalar(point, params)?),
            Expr::Add(a, b) => Ok(a.eval_scalar(point, params)? + b.eval_scalar(point, params)?),
            Expr::Sub(a, b) => Ok(a.eval_scalar(point, params)? - b.eval_scalar(point, params)?),
            Expr::Mul(a, b) => Ok(a.eval_scalar(point, params)? * b.eval_scalar(point, params)?),
            Expr::Div(a, b) => {
                let denom = b.eval_scalar(point, params)?;
                if denom.modulus() <= crate::jet::DIV_TOL {
                    return Err(jet_err(
                        self,
                        JetError::DivisionByZero {
                            modulus: denom.modulus(),
                        },
                    ));
                }
                Ok(a.eval_scalar(point, params)? / denom)
            }
            Expr::PowInt(base, n) => base
                .eval_scalar(point, params)?
                .powi_scalar(*n)
                .map_err(|e| jet_err(self, e)),
            Expr::Call(func, arg) => {
                let v = arg.eval_scalar(point, params)?;
                T::call(*func, v).map_err(|e| jet_err(self, e))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::PowInt(..) => 4,
            Expr::Number(v) if *v < 0.0 => 3,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, required: u8) -> fmt::Result {
        let needs_parens = self.precedence() < required;
        if needs_parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Number(v) => write!(f, "{v}")?,
            Expr::Var(name) | Expr::Param(name) => write!(f, "{name}")?,
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)?;
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::PowInt(base, n) => {
                base.fmt_prec(f, 5)?;
                write!(f, "^{n}")?;
            }
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if needs_parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Canonical printer; `parse . print` is the identity on parsed trees.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
