//! A small noncommutative expression language for quaternion-valued fields
//! and constraints.
//!
//! Grammar (see the repository README for the full EBNF):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" int)*
//! atom   := number | unit | variable | func "(" args ")" | "(" expr ")"
//! ```
//!
//! Multiplication order is preserved exactly as written: `i*j` and `j*i`
//! parse to distinct trees and evaluate to `k` and `-k`. Division `a/q`
//! means right-multiplication by `inverse(q)`. Exponents are integer
//! literals, expanded by repeated multiplication. The polar unit literals
//! `I`, `J`, `K` resolve through the frame angles `phi` and `xi` bound in
//! the environment, and are rejected when the declared signature cannot
//! supply them.

use crate::polar::{polar_frame, polar_frame_derivatives};
use crate::quat::{inner, Quaternion};
use std::fmt;

/// The fixed variable set of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    U,
    V,
    W,
    X0,
    X1,
    X2,
    X3,
    Rho,
    Theta,
    Phi,
    Xi,
}

impl Var {
    pub const ALL: [Var; 12] = [
        Var::T,
        Var::U,
        Var::V,
        Var::W,
        Var::X0,
        Var::X1,
        Var::X2,
        Var::X3,
        Var::Rho,
        Var::Theta,
        Var::Phi,
        Var::Xi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Var::T => "t",
            Var::U => "u",
            Var::V => "v",
            Var::W => "w",
            Var::X0 => "x0",
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
            Var::Rho => "rho",
            Var::Theta => "theta",
            Var::Phi => "phi",
            Var::Xi => "xi",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.iter().copied().find(|v| v.name() == s)
    }

    fn index(&self) -> usize {
        Var::ALL.iter().position(|v| v == self).unwrap()
    }
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env {
    vals: [Option<f64>; 12],
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: Var, value: f64) -> Self {
        self.vals[var.index()] = Some(value);
        self
    }

    pub fn set(&mut self, var: Var, value: f64) {
        self.vals[var.index()] = Some(value);
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        self.vals[var.index()]
    }
}

/// Unit literals. Lower-case are the natural units; upper-case resolve via
/// the polar frame at the bound `(phi, xi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    I,
    J,
    K,
    PolarI,
    PolarJ,
    PolarK,
}

impl Unit {
    pub fn is_polar(&self) -> bool {
        matches!(self, Unit::PolarI | Unit::PolarJ | Unit::PolarK)
    }

    fn token(&self) -> &'static str {
        match self {
            Unit::I => "i",
            Unit::J => "j",
            Unit::K => "k",
            Unit::PolarI => "I",
            Unit::PolarJ => "J",
            Unit::PolarK => "K",
        }
    }
}

/// Scalar functions of one real argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func1 {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func1 {
    fn name(&self) -> &'static str {
        match self {
            Func1::Sin => "sin",
            Func1::Cos => "cos",
            Func1::Exp => "exp",
            Func1::Sqrt => "sqrt",
        }
    }
}

/// Expression tree. Multiplication is noncommutative and kept in source
/// order.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    Unit(Unit),
    Var(Var),
    Neg(Box<Ast>),
    Conj(Box<Ast>),
    Norm(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
    Call(Func1, Box<Ast>),
    Atan2(Box<Ast>, Box<Ast>),
}

/// Parse failure with byte position and the tokens that would have been
/// accepted there.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at byte {offset}: {message} (expected {})", expected.join(", "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub message: String,
}

/// Evaluation failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(&'static str),
    #[error("`{func}` requires a real-valued argument")]
    ScalarFnOfQuaternion { func: &'static str },
    #[error("sqrt of negative real {0}")]
    SqrtNegative(f64),
    #[error("sqrt derivative undefined at 0")]
    SqrtDerivativeAtZero,
    #[error("atan2 undefined at the origin")]
    Atan2AtOrigin,
    #[error("division by a zero-norm quaternion")]
    DivisionByZero,
    #[error("norm derivative undefined at 0")]
    NormDerivativeAtZero,
    #[error("polar units I, J, K need `phi` and `xi` in scope")]
    PolarUnitsUnavailable,
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
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
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_) => "number".into(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token and its starting byte offset.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
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
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = self.pos;
            while end < self.src.len() && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
            {
                end += 1;
            }
            // optional exponent
            if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                let mut e = end + 1;
                if e < self.src.len() && (self.src[e] == b'+' || self.src[e] == b'-') {
                    e += 1;
                }
                if e < self.src.len() && self.src[e].is_ascii_digit() {
                    while e < self.src.len() && self.src[e].is_ascii_digit() {
                        e += 1;
                    }
                    end = e;
                }
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
            let value: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                expected: vec!["number"],
                message: format!("malformed number `{text}`"),
            })?;
            self.pos = end;
            return Ok((Tok::Num(value), start));
        }
        if c.is_ascii_alphabetic() {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
            {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
            self.pos = end;
            return Ok((Tok::Ident(text), start));
        }
        Err(ParseError {
            offset: start,
            expected: vec!["number", "identifier", "operator", "`(`"],
            message: format!("unexpected byte `{}`", c as char),
        })
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(vec![expected]))
        }
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected,
            message: format!("unexpected {}", self.peek().describe()),
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if matches!(self.peek(), Tok::Minus) {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let mut base = self.atom()?;
        while matches!(self.peek(), Tok::Caret) {
            self.bump();
            base = Ast::Pow(Box::new(base), self.int_exponent()?);
        }
        Ok(base)
    }

    fn int_exponent(&mut self) -> Result<i32, ParseError> {
        let negative = if matches!(self.peek(), Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let off = self.offset();
        match self.bump() {
            Tok::Num(v) => {
                if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                    return Err(ParseError {
                        offset: off,
                        expected: vec!["integer exponent"],
                        message: format!("exponent `{v}` is not an integer"),
                    });
                }
                let n = v as i32;
                Ok(if negative { -n } else { n })
            }
            other => Err(ParseError {
                offset: off,
                expected: vec!["integer exponent"],
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Ast::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                self.ident(name)
            }
            _ => Err(self.unexpected(vec!["number", "identifier", "`(`", "`-`"])),
        }
    }

    fn ident(&mut self, name: String) -> Result<Ast, ParseError> {
        let unit = match name.as_str() {
            "i" => Some(Unit::I),
            "j" => Some(Unit::J),
            "k" => Some(Unit::K),
            "I" => Some(Unit::PolarI),
            "J" => Some(Unit::PolarJ),
            "K" => Some(Unit::PolarK),
            _ => None,
        };
        if let Some(u) = unit {
            return Ok(Ast::Unit(u));
        }
        if let Some(v) = Var::from_name(&name) {
            return Ok(Ast::Var(v));
        }
        let func1 = match name.as_str() {
            "sin" => Some(Func1::Sin),
            "cos" => Some(Func1::Cos),
            "exp" => Some(Func1::Exp),
            "sqrt" => Some(Func1::Sqrt),
            _ => None,
        };
        if let Some(f) = func1 {
            self.expect(&Tok::LParen, "`(`")?;
            let arg = self.expr()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(Ast::Call(f, Box::new(arg)));
        }
        match name.as_str() {
            "conj" | "norm" => {
                self.expect(&Tok::LParen, "`(`")?;
                let arg = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(if name == "conj" {
                    Ast::Conj(Box::new(arg))
                } else {
                    Ast::Norm(Box::new(arg))
                })
            }
            "atan2" => {
                self.expect(&Tok::LParen, "`(`")?;
                let y = self.expr()?;
                self.expect(&Tok::Comma, "`,`")?;
                let x = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Ast::Atan2(Box::new(y), Box::new(x)))
            }
            _ => Err(ParseError {
                offset: self.offset(),
                expected: vec!["variable", "unit", "function"],
                message: format!("unknown identifier `{name}`"),
            }),
        }
    }
}

/// Parse a source string into an expression tree.
pub fn parse(src: &str) -> Result<Ast, ParseError> {
    let mut lx = Lexer::new(src);
    let mut toks = Vec::new();
    loop {
        let (t, off) = lx.next()?;
        let done = t == Tok::Eof;
        toks.push((t, off));
        if done {
            break;
        }
    }
    let mut p = Parser { toks, at: 0 };
    let ast = p.expr()?;
    if !matches!(p.peek(), Tok::Eof) {
        return Err(p.unexpected(vec!["operator", "end of input"]));
    }
    Ok(ast)
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

fn polar_unit_value(u: Unit, env: &Env) -> Result<Quaternion, EvalError> {
    let phi = env.get(Var::Phi).ok_or(EvalError::PolarUnitsUnavailable)?;
    let xi = env.get(Var::Xi).ok_or(EvalError::PolarUnitsUnavailable)?;
    let f = polar_frame(phi, xi);
    Ok(match u {
        Unit::PolarI => f.i,
        Unit::PolarJ => f.j,
        Unit::PolarK => f.k,
        _ => unreachable!(),
    })
}

fn real_arg(q: Quaternion, func: &'static str) -> Result<f64, EvalError> {
    if q.x1 != 0.0 || q.x2 != 0.0 || q.x3 != 0.0 {
        return Err(EvalError::ScalarFnOfQuaternion { func });
    }
    Ok(q.x0)
}

impl Ast {
    /// Evaluate under the given bindings.
    pub fn eval(&self, env: &Env) -> Result<Quaternion, EvalError> {
        Ok(match self {
            Ast::Num(v) => Quaternion::from_real(*v),
            Ast::Unit(Unit::I) => Quaternion::I,
            Ast::Unit(Unit::J) => Quaternion::J,
            Ast::Unit(Unit::K) => Quaternion::K,
            Ast::Unit(u) => polar_unit_value(*u, env)?,
            Ast::Var(v) => Quaternion::from_real(
                env.get(*v).ok_or(EvalError::UnboundVariable(v.name()))?,
            ),
            Ast::Neg(a) => -a.eval(env)?,
            Ast::Conj(a) => a.eval(env)?.conj(),
            Ast::Norm(a) => Quaternion::from_real(a.eval(env)?.norm()),
            Ast::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Ast::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Ast::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Ast::Div(a, b) => {
                let d = b.eval(env)?;
                let inv = d.inverse().map_err(|_| EvalError::DivisionByZero)?;
                a.eval(env)? * inv
            }
            Ast::Pow(a, n) => {
                let base = a.eval(env)?;
                pow_int(base, *n)?
            }
            Ast::Call(f, a) => {
                let x = real_arg(a.eval(env)?, f.name())?;
                let y = match f {
                    Func1::Sin => x.sin(),
                    Func1::Cos => x.cos(),
                    Func1::Exp => x.exp(),
                    Func1::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::SqrtNegative(x));
                        }
                        x.sqrt()
                    }
                };
                Quaternion::from_real(y)
            }
            Ast::Atan2(ya, xa) => {
                let y = real_arg(ya.eval(env)?, "atan2")?;
                let x = real_arg(xa.eval(env)?, "atan2")?;
                Quaternion::from_real(f64::atan2(y, x))
            }
        })
    }

    /// Forward-mode evaluation: `(value, d value / d seed)`.
    ///
    /// The product rule keeps the written order: `(fg)' = f'g + fg'`.
    pub fn eval_dual(&self, env: &Env, seed: Var) -> Result<(Quaternion, Quaternion), EvalError> {
        let d = self.dual(env, seed)?;
        Ok((d.val, d.der))
    }

    fn dual(&self, env: &Env, seed: Var) -> Result<DualQuat, EvalError> {
        Ok(match self {
            Ast::Num(v) => DualQuat::constant(Quaternion::from_real(*v)),
            Ast::Unit(Unit::I) => DualQuat::constant(Quaternion::I),
            Ast::Unit(Unit::J) => DualQuat::constant(Quaternion::J),
            Ast::Unit(Unit::K) => DualQuat::constant(Quaternion::K),
            Ast::Unit(u) => {
                let val = polar_unit_value(*u, env)?;
                // the frame itself moves with phi and xi
                let der = if seed == Var::Phi || seed == Var::Xi {
                    let phi = env.get(Var::Phi).ok_or(EvalError::PolarUnitsUnavailable)?;
                    let xi = env.get(Var::Xi).ok_or(EvalError::PolarUnitsUnavailable)?;
                    let d = polar_frame_derivatives(phi, xi);
                    match (u, seed) {
                        (Unit::PolarI, Var::Phi) => d.i_phi,
                        (Unit::PolarI, Var::Xi) => d.i_xi,
                        (Unit::PolarJ, Var::Phi) => d.j_phi,
                        (Unit::PolarJ, Var::Xi) => d.j_xi,
                        (Unit::PolarK, Var::Phi) => d.k_phi,
                        (Unit::PolarK, Var::Xi) => d.k_xi,
                        _ => unreachable!(),
                    }
                } else {
                    Quaternion::ZERO
                };
                DualQuat { val, der }
            }
            Ast::Var(v) => {
                let x = env.get(*v).ok_or(EvalError::UnboundVariable(v.name()))?;
                DualQuat {
                    val: Quaternion::from_real(x),
                    der: Quaternion::from_real(if *v == seed { 1.0 } else { 0.0 }),
                }
            }
            Ast::Neg(a) => {
                let d = a.dual(env, seed)?;
                DualQuat {
                    val: -d.val,
                    der: -d.der,
                }
            }
            Ast::Conj(a) => {
                let d = a.dual(env, seed)?;
                DualQuat {
                    val: d.val.conj(),
                    der: d.der.conj(),
                }
            }
            Ast::Norm(a) => {
                let d = a.dual(env, seed)?;
                let n = d.val.norm();
                if n == 0.0 {
                    if d.der == Quaternion::ZERO {
                        return Ok(DualQuat::constant(Quaternion::ZERO));
                    }
                    return Err(EvalError::NormDerivativeAtZero);
                }
                DualQuat {
                    val: Quaternion::from_real(n),
                    der: Quaternion::from_real(inner(d.val, d.der) / n),
                }
            }
            Ast::Add(a, b) => {
                let (da, db) = (a.dual(env, seed)?, b.dual(env, seed)?);
                DualQuat {
                    val: da.val + db.val,
                    der: da.der + db.der,
                }
            }
            Ast::Sub(a, b) => {
                let (da, db) = (a.dual(env, seed)?, b.dual(env, seed)?);
                DualQuat {
                    val: da.val - db.val,
                    der: da.der - db.der,
                }
            }
            Ast::Mul(a, b) => a.dual(env, seed)?.mul(&b.dual(env, seed)?),
            Ast::Div(a, b) => {
                let da = a.dual(env, seed)?;
                let db = b.dual(env, seed)?;
                da.mul(&db.inverse()?)
            }
            Ast::Pow(a, n) => {
                let d = a.dual(env, seed)?;
                let (base, mut k) = if *n >= 0 {
                    (d, *n as u32)
                } else {
                    (d.inverse()?, n.unsigned_abs())
                };
                let mut acc = DualQuat::constant(Quaternion::ONE);
                while k > 0 {
                    acc = acc.mul(&base);
                    k -= 1;
                }
                acc
            }
            Ast::Call(f, a) => {
                let d = a.dual(env, seed)?;
                let x = real_arg(d.val, f.name())?;
                let dx = real_arg(d.der, f.name())?;
                let (y, dy) = match f {
                    Func1::Sin => (x.sin(), x.cos() * dx),
                    Func1::Cos => (x.cos(), -x.sin() * dx),
                    Func1::Exp => (x.exp(), x.exp() * dx),
                    Func1::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::SqrtNegative(x));
                        }
                        if x == 0.0 {
                            if dx == 0.0 {
                                (0.0, 0.0)
                            } else {
                                return Err(EvalError::SqrtDerivativeAtZero);
                            }
                        } else {
                            let s = x.sqrt();
                            (s, dx / (2.0 * s))
                        }
                    }
                };
                DualQuat {
                    val: Quaternion::from_real(y),
                    der: Quaternion::from_real(dy),
                }
            }
            Ast::Atan2(ya, xa) => {
                let dy = ya.dual(env, seed)?;
                let dx = xa.dual(env, seed)?;
                let y = real_arg(dy.val, "atan2")?;
                let x = real_arg(dx.val, "atan2")?;
                let yp = real_arg(dy.der, "atan2")?;
                let xp = real_arg(dx.der, "atan2")?;
                let denom = x * x + y * y;
                if denom == 0.0 {
                    return Err(EvalError::Atan2AtOrigin);
                }
                DualQuat {
                    val: Quaternion::from_real(f64::atan2(y, x)),
                    der: Quaternion::from_real((yp * x - xp * y) / denom),
                }
            }
        })
    }

    /// Free variables, sorted and deduplicated.
    pub fn free_vars(&self) -> Vec<Var> {
        fn walk(ast: &Ast, out: &mut Vec<Var>) {
            match ast {
                Ast::Var(v) => {
                    if !out.contains(v) {
                        out.push(*v);
                    }
                }
                Ast::Num(_) | Ast::Unit(_) => {}
                Ast::Neg(a) | Ast::Conj(a) | Ast::Norm(a) | Ast::Pow(a, _) | Ast::Call(_, a) => {
                    walk(a, out)
                }
                Ast::Add(a, b)
                | Ast::Sub(a, b)
                | Ast::Mul(a, b)
                | Ast::Div(a, b)
                | Ast::Atan2(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out
    }

    pub fn uses_polar_units(&self) -> bool {
        match self {
            Ast::Unit(u) => u.is_polar(),
            Ast::Num(_) | Ast::Var(_) => false,
            Ast::Neg(a) | Ast::Conj(a) | Ast::Norm(a) | Ast::Pow(a, _) | Ast::Call(_, a) => {
                a.uses_polar_units()
            }
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) | Ast::Atan2(a, b) => {
                a.uses_polar_units() || b.uses_polar_units()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Ast::Add(..) | Ast::Sub(..) => 1,
            Ast::Mul(..) | Ast::Div(..) => 2,
            Ast::Neg(..) => 3,
            Ast::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn pow_int(base: Quaternion, n: i32) -> Result<Quaternion, EvalError> {
    let b = if n >= 0 {
        base
    } else {
        base.inverse().map_err(|_| EvalError::DivisionByZero)?
    };
    let mut acc = Quaternion::ONE;
    for _ in 0..n.unsigned_abs() {
        acc = acc * b;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy)]
struct DualQuat {
    val: Quaternion,
    der: Quaternion,
}

impl DualQuat {
    fn constant(q: Quaternion) -> Self {
        Self {
            val: q,
            der: Quaternion::ZERO,
        }
    }

    fn mul(&self, r: &Self) -> Self {
        Self {
            val: self.val * r.val,
            der: self.der * r.val + self.val * r.der,
        }
    }

    fn inverse(&self) -> Result<Self, EvalError> {
        let inv = self.val.inverse().map_err(|_| EvalError::DivisionByZero)?;
        Ok(Self {
            val: inv,
            der: -(inv * self.der * inv),
        })
    }
}

// ---------------------------------------------------------------------------
// Canonical printer
// ---------------------------------------------------------------------------

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, c: &Ast, min_prec: u8) -> fmt::Result {
            if c.precedence() < min_prec {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        match self {
            Ast::Num(v) => write!(f, "{v}"),
            Ast::Unit(u) => write!(f, "{}", u.token()),
            Ast::Var(v) => write!(f, "{}", v.name()),
            Ast::Neg(a) => {
                write!(f, "-")?;
                child(f, a, 3)
            }
            Ast::Conj(a) => write!(f, "conj({a})"),
            Ast::Norm(a) => write!(f, "norm({a})"),
            Ast::Add(a, b) => {
                child(f, a, 1)?;
                write!(f, " + ")?;
                child(f, b, 2)
            }
            Ast::Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, " - ")?;
                child(f, b, 2)
            }
            Ast::Mul(a, b) => {
                child(f, a, 2)?;
                write!(f, "*")?;
                child(f, b, 3)
            }
            Ast::Div(a, b) => {
                child(f, a, 2)?;
                write!(f, "/")?;
                child(f, b, 3)
            }
            Ast::Pow(a, n) => {
                child(f, a, 5)?;
                write!(f, "^{n}")
            }
            Ast::Call(func, a) => write!(f, "{}({a})", func.name()),
            Ast::Atan2(y, x) => write!(f, "atan2({y}, {x})"),
        }
    }
}
