//! Payoff expressions over path coordinates.
//!
//! Grammar (no division; `p/q` is only valid as a literal):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | primary
//! primary := NUMBER ('/' NUMBER)? | 'S' '[' INT ']' | '(' expr ')'
//!          | 'abs' '(' expr ')' | ('max' | 'min') '(' expr (',' expr)+ ')'
//!          | 'ind' '(' expr CMP expr ')'
//! CMP     := '<' | '<=' | '>' | '>=' | '==' | '!='
//! ```

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{parse_rational, Rational};

use super::{Instance, Trajectory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PayoffError {
    #[error("payoff parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("coordinate S[{index}] is beyond the instance horizon {horizon}")]
    IndexBeyondHorizon { index: usize, horizon: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    fn holds(self, a: &Rational, b: &Rational) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Rational),
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Max(Vec<Expr>),
    Min(Vec<Expr>),
    Ind(Box<Expr>, CmpOp, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, path: &Trajectory) -> Rational {
        match self {
            Expr::Lit(v) => v.clone(),
            Expr::Coord(i) => path.value_at(*i).clone(),
            Expr::Neg(e) => -e.eval(path),
            Expr::Add(a, b) => a.eval(path) + b.eval(path),
            Expr::Sub(a, b) => a.eval(path) - b.eval(path),
            Expr::Mul(a, b) => a.eval(path) * b.eval(path),
            Expr::Abs(e) => e.eval(path).abs(),
            Expr::Max(args) => args.iter().map(|e| e.eval(path)).max().expect("nonempty"),
            Expr::Min(args) => args.iter().map(|e| e.eval(path)).min().expect("nonempty"),
            Expr::Ind(a, op, b) => {
                if op.holds(&a.eval(path), &b.eval(path)) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
        }
    }

    /// Largest coordinate index used, if any.
    pub fn maturity(&self) -> Option<usize> {
        match self {
            Expr::Lit(_) => None,
            Expr::Coord(i) => Some(*i),
            Expr::Neg(e) | Expr::Abs(e) => e.maturity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Ind(a, _, b) => {
                a.maturity().max(b.maturity())
            }
            Expr::Max(args) | Expr::Min(args) => args.iter().filter_map(Expr::maturity).max(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, args: &[Expr]| {
            let parts: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            write!(f, "{name}({})", parts.join(", "))
        };
        match self {
            Expr::Lit(v) => write!(f, "{v}"),
            Expr::Coord(i) => write!(f, "S[{i}]"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Abs(e) => write!(f, "abs({e})"),
            Expr::Max(args) => list(f, "max", args),
            Expr::Min(args) => list(f, "min", args),
            Expr::Ind(a, op, b) => write!(f, "ind({a} {} {b})", op.symbol()),
        }
    }
}

/// A parsed payoff expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Payoff {
    source: String,
    expr: Expr,
}

impl Payoff {
    pub fn parse(source: &str) -> Result<Self, PayoffError> {
        let tokens = tokenize(source)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.expr()?;
        if let Some((tok, at)) = parser.tokens.get(parser.pos) {
            return Err(PayoffError::Parse {
                pos: *at,
                message: format!("unexpected trailing token {tok:?}"),
            });
        }
        Ok(Self {
            source: source.to_string(),
            expr,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Largest coordinate index referenced (0 for constant payoffs).
    pub fn maturity(&self) -> usize {
        self.expr.maturity().unwrap_or(0)
    }

    pub fn eval(&self, path: &Trajectory) -> Rational {
        self.expr.eval(path)
    }
}

/// Per-class values of `payoff` on `instance`.
pub fn evaluate_payoff(payoff: &Payoff, instance: &Instance) -> Result<Vec<Rational>, PayoffError> {
    let horizon = instance.horizon();
    if payoff.maturity() > horizon {
        return Err(PayoffError::IndexBeyondHorizon {
            index: payoff.maturity(),
            horizon,
        });
    }
    Ok(instance.classes().iter().map(|t| payoff.eval(t)).collect())
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Sym(&'static str),
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, PayoffError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            out.push((Token::Num(src[start..i].to_string()), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Ident(src[start..i].to_string()), start));
        } else {
            const SYMS: [&str; 16] = [
                "<=", ">=", "==", "!=", "<", ">", "+", "-", "*", "/", "(", ")", "[", "]", ",", "=",
            ];
            let rest = &src[i..];
            match SYMS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push((Token::Sym(s), i));
                    i += s.len();
                }
                None => {
                    return Err(PayoffError::Parse {
                        pos: i,
                        message: format!("unexpected character {:?}", rest.chars().next()),
                    })
                }
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn at(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, p)| *p)
            .or_else(|| self.tokens.last().map(|(_, p)| p + 1))
            .unwrap_or(0)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, PayoffError> {
        Err(PayoffError::Parse {
            pos: self.at(),
            message: message.into(),
        })
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Token::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), PayoffError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.error(format!("expected `{sym}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, PayoffError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, PayoffError> {
        let mut lhs = self.unary()?;
        while self.eat("*") {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        if matches!(self.peek(), Some(Token::Sym("/"))) {
            return self.error("division is only allowed inside a rational literal such as 1/2");
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, PayoffError> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn number(&mut self) -> Result<Rational, PayoffError> {
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                let at = self.at();
                self.pos += 1;
                parse_rational(&n).map_err(|e| PayoffError::Parse {
                    pos: at,
                    message: e.to_string(),
                })
            }
            _ => self.error("expected a number"),
        }
    }

    fn primary(&mut self) -> Result<Expr, PayoffError> {
        match self.peek().cloned() {
            Some(Token::Num(_)) => {
                let num = self.number()?;
                if self.eat("/") {
                    let den = self.number()?;
                    if den.is_zero() {
                        return self.error("zero denominator");
                    }
                    return Ok(Expr::Lit(num / den));
                }
                Ok(Expr::Lit(num))
            }
            Some(Token::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "S" => {
                        self.expect("[")?;
                        let idx = match self.peek().cloned() {
                            Some(Token::Num(n)) => match n.parse::<usize>() {
                                Ok(i) => i,
                                Err(_) => return self.error("coordinate index must be an integer"),
                            },
                            _ => return self.error("expected a coordinate index"),
                        };
                        self.pos += 1;
                        self.expect("]")?;
                        Ok(Expr::Coord(idx))
                    }
                    "abs" => {
                        self.expect("(")?;
                        let e = self.expr()?;
                        self.expect(")")?;
                        Ok(Expr::Abs(Box::new(e)))
                    }
                    "max" | "min" => {
                        self.expect("(")?;
                        let mut args = vec![self.expr()?];
                        while self.eat(",") {
                            args.push(self.expr()?);
                        }
                        self.expect(")")?;
                        if args.len() < 2 {
                            return self.error(format!("{name} needs at least two arguments"));
                        }
                        Ok(if name == "max" {
                            Expr::Max(args)
                        } else {
                            Expr::Min(args)
                        })
                    }
                    "ind" => {
                        self.expect("(")?;
                        let lhs = self.expr()?;
                        let op = match self.peek() {
                            Some(Token::Sym("<")) => CmpOp::Lt,
                            Some(Token::Sym("<=")) => CmpOp::Le,
                            Some(Token::Sym(">")) => CmpOp::Gt,
                            Some(Token::Sym(">=")) => CmpOp::Ge,
                            Some(Token::Sym("==")) | Some(Token::Sym("=")) => CmpOp::Eq,
                            Some(Token::Sym("!=")) => CmpOp::Ne,
                            _ => return self.error("expected a comparison operator"),
                        };
                        self.pos += 1;
                        let rhs = self.expr()?;
                        self.expect(")")?;
                        Ok(Expr::Ind(Box::new(lhs), op, Box::new(rhs)))
                    }
                    other => self.error(format!("unknown identifier `{other}`")),
                }
            }
            Some(tok) => self.error(format!("unexpected token {tok:?}")),
            None => self.error("unexpected end of expression"),
        }
    }
}
