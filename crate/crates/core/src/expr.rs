//! Univariate real function expressions.
//!
//! Functions are supplied as infix text in the single variable `x`:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x' | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-x^2`
//! is `-(x^2)` and `2^3^2` is `2^(3^2)`. Implicit multiplication is not
//! accepted.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Anything that can be evaluated as a real function of one variable.
///
/// Implemented by [`FunctionExpr`], by the envelope functions in
/// [`crate::convexity`], and by any `Fn(f64) -> Result<f64, EvalError>`.
pub trait RealFn {
    fn eval(&self, x: f64) -> Result<f64, EvalError>;
}

impl<F> RealFn for F
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of non-positive value {0}")]
    LogDomain(f64),
    #[error("square root of negative value {0}")]
    SqrtDomain(f64),
    #[error("fractional power {exponent} of negative base {base}")]
    NegativeBase { base: f64, exponent: f64 },
    #[error("non-finite intermediate value")]
    NonFinite,
    #[error("{0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
    /// `pow(base, exponent)`; evaluates exactly like `base ^ exponent`.
    Pow(Box<Node>, Box<Node>),
}

impl Node {
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Node::Const(c) => *c,
            Node::Var => x,
            Node::Neg(inner) => -inner.eval(x)?,
            Node::Binary(op, lhs, rhs) => {
                let l = lhs.eval(x)?;
                let r = rhs.eval(x)?;
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        l / r
                    }
                    BinaryOp::Pow => power(l, r)?,
                }
            }
            Node::Pow(base, exponent) => power(base.eval(x)?, exponent.eval(x)?)?,
            Node::Call(func, arg) => {
                let a = arg.eval(x)?;
                match func {
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::SqrtDomain(a));
                        }
                        a.sqrt()
                    }
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(EvalError::LogDomain(a));
                        }
                        a.ln()
                    }
                    Func::Abs => a.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn write_canonical(&self, out: &mut String) {
        match self {
            Node::Const(c) => out.push_str(&format_constant(*c)),
            Node::Var => out.push('x'),
            Node::Neg(inner) => {
                out.push_str("(-");
                inner.write_canonical(out);
                out.push(')');
            }
            Node::Binary(op, lhs, rhs) => {
                out.push('(');
                lhs.write_canonical(out);
                out.push(' ');
                out.push(op.symbol());
                out.push(' ');
                rhs.write_canonical(out);
                out.push(')');
            }
            Node::Call(func, arg) => {
                out.push_str(func.name());
                out.push('(');
                arg.write_canonical(out);
                out.push(')');
            }
            Node::Pow(base, exponent) => {
                out.push_str("pow(");
                base.write_canonical(out);
                out.push_str(", ");
                exponent.write_canonical(out);
                out.push(')');
            }
        }
    }
}

/// Real power; negative bases only admit integral exponents.
pub fn power(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(EvalError::NegativeBase { base, exponent });
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(EvalError::DivisionByZero);
    }
    Ok(base.powf(exponent))
}

// Shortest representation that parses back to the same bits.
fn format_constant(c: f64) -> String {
    let s = format!("{c:?}");
    if c < 0.0 {
        format!("({s})")
    } else {
        s
    }
}

/// A parsed function of `x`. Cloning is cheap; the tree is shared.
#[derive(Debug, Clone)]
pub struct FunctionExpr {
    root: Arc<Node>,
    source: Arc<str>,
}

impl FunctionExpr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let root = Parser::new(text).parse_all()?;
        Ok(FunctionExpr {
            root: Arc::new(root),
            source: Arc::from(text),
        })
    }

    /// Builds an expression from an already constructed tree.
    pub fn from_node(root: Node) -> Self {
        let mut canonical = String::new();
        root.write_canonical(&mut canonical);
        FunctionExpr {
            root: Arc::new(root),
            source: Arc::from(canonical.as_str()),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub fn evaluate(&self, x: f64) -> Result<f64, EvalError> {
        self.root.eval(x)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn source_text(&self) -> &str {
        &self.source
    }

    /// Canonical, fully parenthesized infix form. Parses back to an
    /// equivalent tree.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.root.write_canonical(&mut out);
        out
    }

    /// Pointwise product `self * other`.
    pub fn product(&self, other: &FunctionExpr) -> FunctionExpr {
        Self::from_node(Node::Binary(
            BinaryOp::Mul,
            Box::new((*self.root).clone()),
            Box::new((*other.root).clone()),
        ))
    }
}

impl RealFn for FunctionExpr {
    fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self.evaluate(x)
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for FunctionExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FunctionExpr::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
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

    fn err<T>(&self, position: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: position.min(self.src.len()),
            message: message.into(),
        })
    }

    fn parse_all(mut self) -> Result<Node, ParseError> {
        self.advance()?;
        if self.tok == Token::End {
            return self.err(0, "empty expression");
        }
        let node = self.expr()?;
        match self.tok {
            Token::End => Ok(node),
            Token::RParen => self.err(self.tok_start, "unbalanced ')'"),
            _ => self.err(self.tok_start, "unexpected token after expression"),
        }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
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
        let single = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            b',' => Some(Token::Comma),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            self.tok = t;
            return Ok(());
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            self.tok = Token::Ident(self.src[start..self.pos].to_string());
            return Ok(());
        }
        let ch = self.src[self.pos..].chars().next().unwrap_or('?');
        self.err(self.pos, format!("unexpected character '{ch}'"))
    }

    fn number(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let mut look = self.pos + 1;
            if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                look += 1;
            }
            if look < bytes.len() && bytes[look].is_ascii_digit() {
                while look < bytes.len() && bytes[look].is_ascii_digit() {
                    look += 1;
                }
                self.pos = look;
            }
        }
        let text = &self.src[start..self.pos];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.tok = Token::Num(v);
                Ok(())
            }
            _ => self.err(start, format!("invalid number '{text}'")),
        }
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        if self.tok == want {
            self.advance()
        } else {
            self.err(self.tok_start, format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.tok == Token::Minus {
            self.advance()?;
            let inner = self.unary()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if self.tok == Token::Caret {
            self.advance()?;
            let exponent = self.unary()?;
            return Ok(Node::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let start = self.tok_start;
        match self.tok.clone() {
            Token::Num(v) => {
                self.advance()?;
                if matches!(self.tok, Token::Ident(_) | Token::LParen) {
                    return self.err(self.tok_start, "implicit multiplication is not supported");
                }
                Ok(Node::Const(v))
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                if self.tok != Token::RParen {
                    return self.err(self.tok_start, "unbalanced '(': expected ')'");
                }
                self.advance()?;
                Ok(inner)
            }
            Token::Ident(name) => {
                self.advance()?;
                if name == "x" {
                    if matches!(self.tok, Token::LParen | Token::Num(_) | Token::Ident(_)) {
                        return self
                            .err(self.tok_start, "implicit multiplication is not supported");
                    }
                    return Ok(Node::Var);
                }
                let func = match name.as_str() {
                    "sqrt" => Some(Func::Sqrt),
                    "exp" => Some(Func::Exp),
                    "ln" => Some(Func::Ln),
                    "abs" => Some(Func::Abs),
                    "pow" => None,
                    _ if self.tok == Token::LParen => {
                        return self.err(start, format!("unknown function '{name}'"));
                    }
                    _ => {
                        return self.err(
                            start,
                            format!("unknown identifier '{name}' (the only variable is x)"),
                        );
                    }
                };
                self.expect(Token::LParen, &format!("'(' after '{name}'"))?;
                let first = self.expr()?;
                let node = match func {
                    Some(func) => Node::Call(func, Box::new(first)),
                    None => {
                        self.expect(Token::Comma, "',' in pow(base, exponent)")?;
                        let exponent = self.expr()?;
                        Node::Pow(Box::new(first), Box::new(exponent))
                    }
                };
                if self.tok != Token::RParen {
                    return self.err(self.tok_start, "unbalanced '(': expected ')'");
                }
                self.advance()?;
                Ok(node)
            }
            Token::RParen => self.err(start, "unbalanced ')'"),
            Token::End => self.err(start, "unexpected end of expression"),
            _ => self.err(start, "expected a number, x, a function call or '('"),
        }
    }
}
