//! Recursive-descent parser for polynomial and star expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' INT)?
//! primary := INT ('/' INT)? | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Variables are `x1..xn`. Star expressions add `lambda` and the functions
//! `star`, `comm`, `assoc`, `bracket` and `jacobiator`; `*` is always the
//! pointwise product. Positions are zero-based character offsets.

use naq_core::expr::Expr;
use naq_core::identities::associator;
use naq_core::{EvalContext, LambdaSeries, Polynomial, Rational, StarProduct};
use num_bigint::BigInt;
use num_traits::Zero;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownVariable(String),
    UnknownFunction(String),
    NegativeExponent,
    ZeroDenominator,
    Arity { function: String, expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error at position {}: {msg}", self.position),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable '{v}' at position {}", self.position),
            ParseErrorKind::UnknownFunction(v) => write!(f, "unknown function '{v}' at position {}", self.position),
            ParseErrorKind::NegativeExponent => write!(f, "negative exponent at position {}", self.position),
            ParseErrorKind::ZeroDenominator => write!(f, "zero denominator at position {}", self.position),
            ParseErrorKind::Arity { function, expected, got } => {
                write!(f, "{function} takes {expected} arguments, got {got} at position {}", self.position)
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Star,
    Comm,
    Assoc,
    Bracket,
    Jacobiator,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "star" => Func::Star,
            "comm" => Func::Comm,
            "assoc" => Func::Assoc,
            "bracket" => Func::Bracket,
            "jacobiator" => Func::Jacobiator,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Star | Func::Comm | Func::Bracket => 2,
            Func::Assoc | Func::Jacobiator => 3,
        }
    }
}

#[derive(Clone, Debug)]
enum Ast {
    Num(Rational),
    Var(usize),
    Lambda,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
    Call(Func, Vec<Ast>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
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

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push((start, Tok::Int(digits.parse().expect("ascii digits"))));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            other => {
                return Err(ParseError { position: start, kind: ParseErrorKind::Syntax(format!("unexpected character '{other}'")) })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    dim: usize,
    star_mode: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos(), kind: ParseErrorKind::Syntax(msg.into()) })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::End => "end of input".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
        }
    }

    fn parse_all(&mut self) -> Result<Ast, ParseError> {
        let e = self.expr()?;
        match self.peek() {
            Tok::End => Ok(e),
            t => self.syntax(format!("expected an operator, found {}", Self::describe(t))),
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
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => match u32::try_from(n) {
                Ok(k) => Ok(Ast::Pow(Box::new(base), k)),
                Err(_) => Err(ParseError { position: pos, kind: ParseErrorKind::Syntax("exponent too large".into()) }),
            },
            Tok::Minus => Err(ParseError { position: pos, kind: ParseErrorKind::NegativeExponent }),
            t => Err(ParseError {
                position: pos,
                kind: ParseErrorKind::Syntax(format!("expected a non-negative integer exponent, found {}", Self::describe(&t))),
            }),
        }
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => {
                if *self.peek() != Tok::Slash {
                    return Ok(Ast::Num(Rational::from_integer(n)));
                }
                self.bump();
                let dpos = self.pos();
                match self.bump() {
                    Tok::Int(d) if d.is_zero() => Err(ParseError { position: dpos, kind: ParseErrorKind::ZeroDenominator }),
                    Tok::Int(d) => Ok(Ast::Num(Rational::new(n, d))),
                    t => Err(ParseError {
                        position: dpos,
                        kind: ParseErrorKind::Syntax(format!("expected a denominator, found {}", Self::describe(&t))),
                    }),
                }
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    return self.call(name, pos);
                }
                self.variable(name, pos)
            }
            Tok::LParen => {
                let e = self.expr()?;
                let close = self.pos();
                match self.bump() {
                    Tok::RParen => Ok(e),
                    t => Err(ParseError {
                        position: close,
                        kind: ParseErrorKind::Syntax(format!("expected ')', found {}", Self::describe(&t))),
                    }),
                }
            }
            t => Err(ParseError { position: pos, kind: ParseErrorKind::Syntax(format!("unexpected {}", Self::describe(&t))) }),
        }
    }

    fn variable(&self, name: String, pos: usize) -> Result<Ast, ParseError> {
        if self.star_mode && name == "lambda" {
            return Ok(Ast::Lambda);
        }
        let axis = name
            .strip_prefix('x')
            .filter(|d| !d.is_empty() && !d.starts_with('0') && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&k| k >= 1 && k <= self.dim);
        match axis {
            Some(k) => Ok(Ast::Var(k - 1)),
            None => Err(ParseError { position: pos, kind: ParseErrorKind::UnknownVariable(name) }),
        }
    }

    fn call(&mut self, name: String, pos: usize) -> Result<Ast, ParseError> {
        let func = match Func::lookup(&name) {
            Some(f) if self.star_mode => f,
            _ => return Err(ParseError { position: pos, kind: ParseErrorKind::UnknownFunction(name) }),
        };
        self.bump();
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        if *self.peek() != Tok::RParen {
            let t = self.peek().clone();
            return self.syntax(format!("expected ',' or ')', found {}", Self::describe(&t)));
        }
        self.bump();
        if args.len() != func.arity() {
            return Err(ParseError {
                position: pos,
                kind: ParseErrorKind::Arity { function: name, expected: func.arity(), got: args.len() },
            });
        }
        Ok(Ast::Call(func, args))
    }
}

fn parse(text: &str, dim: usize, star_mode: bool) -> Result<Ast, ParseError> {
    let toks = lex(text)?;
    Parser { toks, at: 0, dim, star_mode }.parse_all()
}

/// Parses a polynomial in `x1..x{dim}` with exact rational coefficients.
pub fn parse_poly_expr(text: &str, dim: usize) -> Result<Polynomial, ParseError> {
    Ok(poly_value(&parse(text, dim, false)?, dim))
}

fn poly_value(ast: &Ast, dim: usize) -> Polynomial {
    match ast {
        Ast::Num(c) => Polynomial::constant(dim, c.clone()),
        Ast::Var(i) => Polynomial::var(dim, *i),
        Ast::Neg(a) => -poly_value(a, dim),
        Ast::Add(a, b) => &poly_value(a, dim) + &poly_value(b, dim),
        Ast::Sub(a, b) => &poly_value(a, dim) - &poly_value(b, dim),
        Ast::Mul(a, b) => &poly_value(a, dim) * &poly_value(b, dim),
        Ast::Pow(a, k) => poly_value(a, dim).pow(*k),
        Ast::Lambda | Ast::Call(..) => unreachable!("rejected by the parser outside star mode"),
    }
}

/// A parsed star expression, evaluated against a product.
#[derive(Clone, Debug)]
pub struct StarExpr {
    ast: Ast,
    dim: usize,
}

impl StarExpr {
    pub fn parse(text: &str, dim: usize) -> Result<Self, ParseError> {
        Ok(StarExpr { ast: parse(text, dim, true)?, dim })
    }

    /// The value truncated at the product's order.
    pub fn eval(&self, s: &StarProduct) -> naq_core::Result<LambdaSeries> {
        if s.dim() != self.dim {
            return Err(naq_core::Error::DimensionMismatch { left: s.dim(), right: self.dim });
        }
        series_value(&self.ast, s)
    }
}

fn series_value(ast: &Ast, s: &StarProduct) -> naq_core::Result<LambdaSeries> {
    let (n, k) = (s.dim(), s.truncation_order());
    let lift = |p: Polynomial| LambdaSeries::from_poly(p, k);
    Ok(match ast {
        Ast::Num(c) => lift(Polynomial::constant(n, c.clone())),
        Ast::Var(i) => lift(Polynomial::var(n, *i)),
        Ast::Lambda => LambdaSeries::lambda_pow(Polynomial::one(n), 1, k),
        Ast::Neg(a) => -&series_value(a, s)?,
        Ast::Add(a, b) => &series_value(a, s)? + &series_value(b, s)?,
        Ast::Sub(a, b) => &series_value(a, s)? - &series_value(b, s)?,
        Ast::Mul(a, b) => &series_value(a, s)? * &series_value(b, s)?,
        Ast::Pow(a, e) => {
            let base = series_value(a, s)?;
            (0..*e).fold(lift(Polynomial::one(n)), |acc, _| &acc * &base)
        }
        Ast::Call(func, args) => {
            let vals = args.iter().map(|a| series_value(a, s)).collect::<naq_core::Result<Vec<_>>>()?;
            let (x, y) = (Expr::arg(0), Expr::arg(1));
            let expr = match func {
                Func::Star => Expr::star(x, y),
                Func::Comm => Expr::commutator(x, y),
                Func::Bracket => Expr::bracket(x, y),
                Func::Jacobiator => Expr::jacobiator(x, y, Expr::arg(2)),
                Func::Assoc => return associator(s, &vals[0], &vals[1], &vals[2]),
            };
            expr.eval(&EvalContext::for_product(s), &vals)?
        }
    })
}
