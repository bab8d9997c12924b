//! A small arithmetic expression language for user-specified functions.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          right-associative
//! atom    := number | 'x' | 'y' | func '(' sum ')' | '(' sum ')'
//! func    := sin | cos | sqrt | abs | exp
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Sin,
    Cos,
    Sqrt,
    Abs,
    Exp,
}

impl Builtin {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Builtin::Sin => v.sin(),
            Builtin::Cos => v.cos(),
            Builtin::Sqrt => v.sqrt(),
            Builtin::Abs => v.abs(),
            Builtin::Exp => v.exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Sqrt => "sqrt",
            Builtin::Abs => "abs",
            Builtin::Exp => "exp",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Builtin::Sin,
            "cos" => Builtin::Cos,
            "sqrt" => Builtin::Sqrt,
            "abs" => Builtin::Abs,
            "exp" => Builtin::Exp,
            _ => return None,
        })
    }
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

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Coordinate index: `x` is 0, `y` is 1.
    Var(usize),
    Neg(Box<Expr>),
    Call(Builtin, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        Parser::new(src).parse()
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(k) => point.get(*k).copied().unwrap_or(f64::NAN),
            Expr::Neg(e) => -e.eval(point),
            Expr::Call(b, e) => b.apply(e.eval(point)),
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(point), r.eval(point));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
        }
    }

    /// Number of coordinates the expression reads (1 for `x`, 2 once `y` appears).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(k) => k + 1,
            Expr::Neg(e) | Expr::Call(_, e) => e.arity(),
            Expr::Binary(_, l, r) => l.arity().max(r.arity()),
        }
    }

    /// Evaluates at every probe point and reports the first non-finite result.
    pub fn check_on<'a, I>(&self, points: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        for p in points {
            let v = self.eval(p);
            if !v.is_finite() {
                return Err(Error::Evaluation {
                    point: p.to_vec(),
                    message: format!("`{self}` evaluates to {v}"),
                });
            }
        }
        Ok(())
    }
}

// Integer exponents go through powi so that (-2)^3 is -8 rather than NaN.
fn pow(base: f64, exp: f64) -> f64 {
    if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
        base.powi(exp as i32)
    } else {
        base.powf(exp)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => write!(f, "(-{})", -v),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(0) => f.write_str("x"),
            Expr::Var(1) => f.write_str("y"),
            Expr::Var(k) => write!(f, "x{k}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Call(b, e) => write!(f, "{}({e})", b.name()),
            Expr::Binary(op, l, r) => write!(f, "({l}{}{r})", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Token,
    tok_start: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            tok: Token::End,
            tok_start: 0,
        }
    }

    fn parse(mut self) -> Result<Expr> {
        if self.src.trim().is_empty() {
            return Err(self.error_at(0, "empty expression"));
        }
        self.advance()?;
        let e = self.sum()?;
        if self.tok != Token::End {
            return Err(self.error_at(self.tok_start, "unexpected trailing input"));
        }
        Ok(e)
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    fn advance(&mut self) -> Result<()> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos >= bytes.len() {
            self.tok = Token::End;
            return Ok(());
        }
        let c = bytes[self.pos];
        self.tok = match c {
            b'0'..=b'9' | b'.' => {
                let start = self.pos;
                while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
                    self.pos += 1;
                }
                if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
                    let mut look = self.pos + 1;
                    if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                        look += 1;
                    }
                    if look < bytes.len() && bytes[look].is_ascii_digit() {
                        self.pos = look;
                        while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                            self.pos += 1;
                        }
                    }
                }
                let text = &self.src[start..self.pos];
                let v: f64 = text
                    .parse()
                    .map_err(|_| self.error_at(start, format!("invalid number `{text}`")))?;
                Token::Num(v)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = self.pos;
                while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                    self.pos += 1;
                }
                Token::Ident(self.src[start..self.pos].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Token::Op(c as char)
            }
            b'(' => {
                self.pos += 1;
                Token::LParen
            }
            b')' => {
                self.pos += 1;
                Token::RParen
            }
            _ => {
                let ch = self.src[self.pos..].chars().next().unwrap_or('?');
                return Err(self.error_at(self.pos, format!("unexpected character `{ch}`")));
            }
        };
        Ok(())
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Token::Op(c @ ('+' | '-')) = self.tok {
            self.advance()?;
            let rhs = self.product()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Token::Op(c @ ('*' | '/')) = self.tok {
            self.advance()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.tok == Token::Op('-') {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.tok == Token::Op('^') {
            self.advance()?;
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self, open: usize) -> Result<()> {
        match self.tok {
            Token::RParen => self.advance(),
            Token::End => Err(self.error_at(self.tok_start, format!("missing `)` for `(` at offset {open}"))),
            _ => Err(self.error_at(self.tok_start, "expected `)`")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.tok_start;
        match std::mem::replace(&mut self.tok, Token::End) {
            Token::Num(v) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Token::Ident(name) => {
                self.advance()?;
                match name.as_str() {
                    "x" => Ok(Expr::Var(0)),
                    "y" => Ok(Expr::Var(1)),
                    _ => {
                        let Some(func) = Builtin::from_name(&name) else {
                            return Err(self.error_at(start, format!("unknown identifier `{name}`")));
                        };
                        if self.tok != Token::LParen {
                            return Err(self.error_at(self.tok_start, format!("expected `(` after `{name}`")));
                        }
                        let open = self.tok_start;
                        self.advance()?;
                        let arg = self.sum()?;
                        self.expect_rparen(open)?;
                        Ok(Expr::Call(func, Box::new(arg)))
                    }
                }
            }
            Token::LParen => {
                self.advance()?;
                let e = self.sum()?;
                self.expect_rparen(start)?;
                Ok(e)
            }
            Token::End => Err(self.error_at(start, "unexpected end of input")),
            tok => {
                self.tok = tok;
                Err(self.error_at(start, "expected a number, variable, function or `(`"))
            }
        }
    }
}
