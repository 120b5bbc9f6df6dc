//! Expression language for coefficient functions, right-hand sides and exact
//! solutions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-' unary | atom
//! atom   := number | 'x' | 'pi' | 'gamma' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::fracpoly::{FracSeries, FracTerm};
use crate::gamma::{gamma, GammaError};

/// Total degree cap when expanding integer powers of sums.
pub const EXPANSION_DEGREE_CAP: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Gamma(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("gamma: {source} (at x = {x})")]
    Gamma { x: f64, source: GammaError },
    #[error("{base}^{exponent} is undefined (at x = {x})")]
    BadPower { base: f64, exponent: f64, x: f64 },
}

/// Outcome of lowering an expression that is not a finite power sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotPowerSum;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Ident(Ident),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ident {
    X,
    Pi,
    Gamma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(Ident::X) => write!(f, "'x'"),
            Tok::Ident(Ident::Pi) => write!(f, "'pi'"),
            Tok::Ident(Ident::Gamma) => write!(f, "'gamma'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Returns the next token and its starting offset.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number(start).map(|v| (Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() {
            let len = rest.find(|ch: char| !ch.is_ascii_alphanumeric() && ch != '_').unwrap_or(rest.len());
            let word = &rest[..len];
            let id = match word {
                "x" => Ident::X,
                "pi" => Ident::Pi,
                "gamma" => Ident::Gamma,
                _ => {
                    return Err(ParseError {
                        offset: start,
                        expected: vec!["'x'", "'pi'", "'gamma'"],
                        found: format!("identifier '{word}'"),
                    })
                }
            };
            self.pos += len;
            return Ok((Tok::Ident(id), start));
        }
        Err(ParseError { offset: start, expected: vec!["expression"], found: format!("'{c}'") })
    }

    fn number(&mut self, start: usize) -> Result<f64, ParseError> {
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let int_len = digits(&mut i);
        let mut frac_len = 0;
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            frac_len = digits(&mut i);
        }
        if int_len + frac_len == 0 {
            return Err(ParseError { offset: start, expected: vec!["digit"], found: "'.'".into() });
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            let mut k = j;
            if digits(&mut k) == 0 {
                return Err(ParseError {
                    offset: j,
                    expected: vec!["exponent digits"],
                    found: found_at(self.src, j),
                });
            }
            i = k;
        }
        self.pos = i;
        self.src[start..i]
            .parse::<f64>()
            .map_err(|_| ParseError { offset: start, expected: vec!["number"], found: self.src[start..i].into() })
    }
}

fn found_at(src: &str, offset: usize) -> String {
    src[offset..].chars().next().map_or_else(|| "end of input".to_string(), |c| format!("'{c}'"))
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lex = Lexer { src, pos: 0 };
        let (tok, at) = lex.next()?;
        Ok(Self { lex, tok, at })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lex.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn fail<T>(&self, expected: Vec<&'static str>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.at, expected, found: self.tok.to_string() })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exp = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            // '-' binds looser than '^': -x^2 = -(x^2)
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let e = match self.tok {
            Tok::Num(v) => Expr::Num(v),
            Tok::Ident(Ident::X) => Expr::X,
            Tok::Ident(Ident::Pi) => Expr::Pi,
            Tok::Ident(Ident::Gamma) => {
                self.bump()?;
                if self.tok != Tok::LParen {
                    return self.fail(vec!["'('"]);
                }
                self.bump()?;
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return self.fail(vec!["')'"]);
                }
                Expr::Gamma(Box::new(inner))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return self.fail(vec!["')'", "operator"]);
                }
                inner
            }
            _ => return self.fail(vec!["number", "'x'", "'pi'", "'gamma'", "'('", "'-'"]),
        };
        self.bump()?;
        Ok(e)
    }
}

/// Parses `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return p.fail(vec!["operator", "end of input"]);
    }
    Ok(e)
}

fn power(base: f64, exponent: f64, x: f64) -> Result<f64, EvalError> {
    if exponent == exponent.trunc() && exponent.abs() <= i32::MAX as f64 {
        if base == 0.0 && exponent < 0.0 {
            return Err(EvalError::BadPower { base, exponent, x });
        }
        return Ok(base.powi(exponent as i32));
    }
    if base < 0.0 || (base == 0.0 && exponent < 0.0) {
        return Err(EvalError::BadPower { base, exponent, x });
    }
    Ok(base.powf(exponent))
}

impl Expr {
    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Pi => PI,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Gamma(e) => gamma(e.eval(x)?).map_err(|source| EvalError::Gamma { x, source })?,
            Expr::Bin(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero { x });
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b, x)?,
                }
            }
        })
    }

    /// True when the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => true,
            Expr::X => false,
            Expr::Neg(e) | Expr::Gamma(e) => e.is_constant(),
            Expr::Bin(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    /// Lowers the expression to a finite power sum when it is one.
    pub fn to_frac_series(&self) -> Result<FracSeries, NotPowerSum> {
        let s = lower(self)?;
        if s.terms().iter().any(|t| !t.coeff.is_finite() || t.exponent < 0.0) {
            return Err(NotPowerSum);
        }
        Ok(s)
    }
}

fn constant_value(e: &Expr) -> Result<f64, NotPowerSum> {
    if !e.is_constant() {
        return Err(NotPowerSum);
    }
    e.eval(0.0).map_err(|_| NotPowerSum).and_then(|v| if v.is_finite() { Ok(v) } else { Err(NotPowerSum) })
}

fn single_term(s: &FracSeries) -> Option<FracTerm> {
    match s.terms() {
        [] => Some(FracTerm { coeff: 0.0, exponent: 0.0 }),
        [t] => Some(*t),
        _ => None,
    }
}

// Intermediate series may carry negative exponents (e.g. 1/x^1.5); the
// public entry rejects them at the end.
fn lower(e: &Expr) -> Result<FracSeries, NotPowerSum> {
    if e.is_constant() {
        return Ok(FracSeries::constant(constant_value(e)?));
    }
    match e {
        Expr::X => Ok(mono(1.0, 1.0)),
        Expr::Neg(inner) => Ok(lower(inner)?.scale(-1.0)),
        Expr::Gamma(_) => Err(NotPowerSum),
        Expr::Bin(op, l, r) => match op {
            BinOp::Add => Ok(lower(l)?.add(&lower(r)?)),
            BinOp::Sub => Ok(lower(l)?.sub(&lower(r)?)),
            BinOp::Mul => Ok(lower(l)?.mul(&lower(r)?)),
            BinOp::Div => {
                let num = lower(l)?;
                let den = single_term(&lower(r)?).ok_or(NotPowerSum)?;
                if den.coeff == 0.0 {
                    return Err(NotPowerSum);
                }
                Ok(num.mul(&mono(1.0 / den.coeff, -den.exponent)))
            }
            BinOp::Pow => {
                let k = constant_value(r)?;
                let base = lower(l)?;
                if let Some(t) = single_term(&base) {
                    if t.coeff == 0.0 {
                        return if k > 0.0 { Ok(FracSeries::zero()) } else { Err(NotPowerSum) };
                    }
                    let c = if t.coeff > 0.0 || k == k.trunc() {
                        t.coeff.powf(k)
                    } else {
                        return Err(NotPowerSum);
                    };
                    return Ok(mono(c, t.exponent * k));
                }
                if k < 0.0 || k != k.trunc() || k * base.max_exponent() > EXPANSION_DEGREE_CAP {
                    return Err(NotPowerSum);
                }
                let mut acc = FracSeries::constant(1.0);
                for _ in 0..k as u32 {
                    acc = acc.mul(&base);
                }
                Ok(acc)
            }
        },
        Expr::Num(_) | Expr::Pi => unreachable!("constants handled above"),
    }
}

fn mono(c: f64, p: f64) -> FracSeries {
    FracSeries::from_raw_terms(vec![FracTerm { coeff: c, exponent: p }])
}

/// Canonical printer: every binary node is parenthesized and literals use
/// the shortest round-trip representation.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{:?})", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => write!(f, "x"),
            Expr::Pi => write!(f, "pi"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Gamma(e) => write!(f, "gamma({e})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}
