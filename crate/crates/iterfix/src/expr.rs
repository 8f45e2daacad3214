//! A small piecewise arithmetic expression language, used to define
//! mappings in config files and on the command line.
//!
//! Grammar, precedence low to high (one output per `;`-separated piece):
//!
//! ```text
//! outputs := expr (';' expr)*
//! expr    := cmp ('?' expr ':' expr)?            conditional, right-assoc
//! cmp     := add (('=='|'!='|'<'|'<='|'>'|'>=') add)?   non-associative
//! add     := mul (('+'|'-') mul)*
//! mul     := pow (('*'|'/') pow)*
//! pow     := unary ('^' pow)?                    right-assoc
//! unary   := '-' unary | atom
//! atom    := number | var | call | '(' expr ')'
//! var     := NAME | NAME '[' integer ']'
//! call    := ('abs'|'min'|'max') '(' expr (',' expr)* ')'
//! ```
//!
//! Numbers use decimal or scientific notation. `5/8` is ordinary division.
//! The variable is `x` (so `x[1]` is the second coordinate; bare `x` is
//! allowed only in dimension one), except where a caller names it otherwise
//! (iteration schedules use `n`, rate functions use `r`). Comparisons are
//! exact binary64 comparisons yielding 1 or 0; a conditional evaluates only
//! the selected branch. Unary minus binds tighter than `^`, so `-x^2` is
//! `(-x)^2`.

use crate::error::Result;
use crate::space::Point;
use std::fmt;

/// Syntax error, located by byte offset into the source text.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("malformed number")]
    BadNumber,
    #[error("expected {expected}, found {found}")]
    UnexpectedToken {
        expected: &'static str,
        found: String,
    },
    #[error("expected {expected}, found end of input")]
    UnexpectedEnd { expected: &'static str },
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("variable index must be a nonnegative integer")]
    BadIndex,
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("comparisons do not chain; parenthesize one side")]
    ChainedComparison,
    #[error("{name} takes {expected} argument(s), found {found}")]
    WrongArity {
        name: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("empty expression")]
    Empty,
}

/// Runtime failure while evaluating an AST, located by the byte offset of
/// the responsible node in the original source.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero at byte {offset}")]
    DivisionByZero { offset: usize },
    #[error("non-finite intermediate value at byte {offset}")]
    NonFinite { offset: usize },
    #[error("negative base raised to a fractional power at byte {offset}")]
    FractionalPower { offset: usize },
    #[error("variable index {index} out of range for a point of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Abs,
    Min,
    Max,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Abs => 1,
            Func::Min | Func::Max => 2,
        }
    }
}

/// One expression node. `offset` is the byte position of the token that
/// anchors the node (the operator for compound nodes), used in messages.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub offset: usize,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Literal(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Parses semicolon-separated output expressions over variable `x` with
/// `dim` coordinates. Returns one AST per output.
pub fn parse(src: &str, dim: usize) -> std::result::Result<Vec<Expr>, ParseError> {
    parse_with(src, dim, "x")
}

/// Like [`parse`] but requires exactly one output expression.
pub fn parse_single(src: &str, dim: usize) -> std::result::Result<Expr, ParseError> {
    let mut exprs = parse(src, dim)?;
    if exprs.len() != 1 {
        return Err(ParseError {
            kind: ParseErrorKind::UnexpectedToken {
                expected: "end of input",
                found: ";".to_string(),
            },
            offset: src.find(';').unwrap_or(src.len()),
        });
    }
    Ok(exprs.pop().expect("checked length"))
}

/// Parses a single scalar expression over a custom variable name, e.g.
/// schedules in `n` or rate functions in `r`.
pub fn parse_scalar(src: &str, var: &str) -> std::result::Result<Expr, ParseError> {
    let mut exprs = parse_with(src, 1, var)?;
    if exprs.len() != 1 {
        return Err(ParseError {
            kind: ParseErrorKind::UnexpectedToken {
                expected: "end of input",
                found: ";".to_string(),
            },
            offset: src.find(';').unwrap_or(src.len()),
        });
    }
    Ok(exprs.pop().expect("checked length"))
}

fn parse_with(src: &str, dim: usize, var: &str) -> std::result::Result<Vec<Expr>, ParseError> {
    let tokens = lex(src)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        dim,
        var,
        end: src.len(),
    };
    let mut outputs = vec![parser.expr()?];
    while parser.eat(&Tok::Semi) {
        outputs.push(parser.expr()?);
    }
    if let Some((tok, offset)) = parser.peek() {
        return Err(ParseError {
            kind: ParseErrorKind::UnexpectedToken {
                expected: "end of input",
                found: tok.describe(),
            },
            offset,
        });
    }
    Ok(outputs)
}

/// Evaluates one AST per output coordinate at `at`.
pub fn evaluate_ast(asts: &[Expr], at: &Point) -> Result<Point> {
    let mut out = Vec::with_capacity(asts.len());
    for ast in asts {
        out.push(ast.eval(at.coords())?);
    }
    Ok(Point::new(out)?)
}

impl Expr {
    /// Evaluates at a coordinate slice. Every node value is checked finite,
    /// so the only non-finite outcomes are reported as errors.
    pub fn eval(&self, at: &[f64]) -> std::result::Result<f64, EvalError> {
        let v = match &self.kind {
            ExprKind::Literal(v) => *v,
            ExprKind::Var(i) => *at.get(*i).ok_or(EvalError::IndexOutOfRange {
                index: *i,
                dim: at.len(),
            })?,
            ExprKind::Neg(e) => -e.eval(at)?,
            ExprKind::Bin(op, l, r) => {
                let a = l.eval(at)?;
                let b = r.eval(at)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero {
                                offset: self.offset,
                            });
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
                            a.powi(b as i32)
                        } else if a < 0.0 {
                            return Err(EvalError::FractionalPower {
                                offset: self.offset,
                            });
                        } else {
                            a.powf(b)
                        }
                    }
                }
            }
            ExprKind::Cmp(op, l, r) => {
                let a = l.eval(at)?;
                let b = r.eval(at)?;
                let holds = match op {
                    CmpOp::Eq => a == b,
                    CmpOp::Ne => a != b,
                    CmpOp::Lt => a < b,
                    CmpOp::Le => a <= b,
                    CmpOp::Gt => a > b,
                    CmpOp::Ge => a >= b,
                };
                if holds {
                    1.0
                } else {
                    0.0
                }
            }
            ExprKind::If(c, t, e) => {
                if c.eval(at)? != 0.0 {
                    t.eval(at)?
                } else {
                    e.eval(at)?
                }
            }
            ExprKind::Call(f, args) => {
                let a = args[0].eval(at)?;
                match f {
                    Func::Abs => a.abs(),
                    Func::Min => a.min(args[1].eval(at)?),
                    Func::Max => a.max(args[1].eval(at)?),
                }
            }
        };
        if !v.is_finite() {
            return Err(EvalError::NonFinite {
                offset: self.offset,
            });
        }
        Ok(v)
    }

    /// Structural equality, ignoring byte offsets. Literals compare by bit
    /// pattern, so values survive a print/parse round trip exactly.
    pub fn structurally_eq(&self, other: &Expr) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Literal(a), ExprKind::Literal(b)) => a.to_bits() == b.to_bits(),
            (ExprKind::Var(a), ExprKind::Var(b)) => a == b,
            (ExprKind::Neg(a), ExprKind::Neg(b)) => a.structurally_eq(b),
            (ExprKind::Bin(o1, a1, b1), ExprKind::Bin(o2, a2, b2)) => {
                o1 == o2 && a1.structurally_eq(a2) && b1.structurally_eq(b2)
            }
            (ExprKind::Cmp(o1, a1, b1), ExprKind::Cmp(o2, a2, b2)) => {
                o1 == o2 && a1.structurally_eq(a2) && b1.structurally_eq(b2)
            }
            (ExprKind::If(c1, t1, e1), ExprKind::If(c2, t2, e2)) => {
                c1.structurally_eq(c2) && t1.structurally_eq(t2) && e1.structurally_eq(e2)
            }
            (ExprKind::Call(f1, a1), ExprKind::Call(f2, a2)) => {
                f1 == f2
                    && a1.len() == a2.len()
                    && a1.iter().zip(a2).all(|(x, y)| x.structurally_eq(y))
            }
            _ => false,
        }
    }

    /// Renders with minimal parentheses; reparsing yields a structurally
    /// identical AST. Variables print in indexed form (`x[0]`), which is
    /// valid in every dimension.
    pub fn pretty(&self, var: &str) -> String {
        self.render(var, 1)
    }

    // Precedence levels: 1 conditional, 2 comparison, 3 additive,
    // 4 multiplicative, 5 power, 6 unary, 7 atom. `min_level` is the lowest
    // level printable without parentheses in this position.
    fn render(&self, var: &str, min_level: u8) -> String {
        let (s, level) = match &self.kind {
            ExprKind::Literal(v) => {
                if v.is_sign_negative() {
                    (format!("-{}", -v), 6)
                } else {
                    (format!("{v}"), 7)
                }
            }
            ExprKind::Var(i) => (format!("{var}[{i}]"), 7),
            ExprKind::Neg(e) => (format!("-{}", e.render(var, 6)), 6),
            ExprKind::Bin(op, l, r) => {
                let (sym, level) = match op {
                    BinOp::Add => ("+", 3),
                    BinOp::Sub => ("-", 3),
                    BinOp::Mul => ("*", 4),
                    BinOp::Div => ("/", 4),
                    BinOp::Pow => ("^", 5),
                };
                let (lmin, rmin) = if *op == BinOp::Pow {
                    (6, 5) // right-assoc
                } else {
                    (level, level + 1) // left-assoc
                };
                (
                    format!(
                        "{} {sym} {}",
                        l.render(var, lmin),
                        r.render(var, rmin)
                    ),
                    level,
                )
            }
            ExprKind::Cmp(op, l, r) => {
                let sym = match op {
                    CmpOp::Eq => "==",
                    CmpOp::Ne => "!=",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                (
                    format!("{} {sym} {}", l.render(var, 3), r.render(var, 3)),
                    2,
                )
            }
            ExprKind::If(c, t, e) => (
                format!(
                    "{} ? {} : {}",
                    c.render(var, 2),
                    t.render(var, 1),
                    e.render(var, 1)
                ),
                1,
            ),
            ExprKind::Call(f, args) => {
                let rendered: Vec<String> =
                    args.iter().map(|a| a.render(var, 1)).collect();
                (format!("{}({})", f.name(), rendered.join(", ")), 7)
            }
        };
        if level < min_level {
            format!("({s})")
        } else {
            s
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty("x"))
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
    Question,
    Colon,
    Comma,
    Semi,
    LParen,
    RParen,
    LBracket,
    RBracket,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Question => "'?'".into(),
            Tok::Colon => "':'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::EqEq => "'=='".into(),
            Tok::Ne => "'!='".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Ge => "'>='".into(),
        }
    }

    fn is_cmp(&self) -> bool {
        matches!(
            self,
            Tok::EqEq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge
        )
    }
}

fn lex(src: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let b = bytes[i];
        let tok = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => {
                i += 1;
                Tok::Plus
            }
            b'-' => {
                i += 1;
                Tok::Minus
            }
            b'*' => {
                i += 1;
                Tok::Star
            }
            b'/' => {
                i += 1;
                Tok::Slash
            }
            b'^' => {
                i += 1;
                Tok::Caret
            }
            b'?' => {
                i += 1;
                Tok::Question
            }
            b':' => {
                i += 1;
                Tok::Colon
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b';' => {
                i += 1;
                Tok::Semi
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'[' => {
                i += 1;
                Tok::LBracket
            }
            b']' => {
                i += 1;
                Tok::RBracket
            }
            b'=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::EqEq
                } else {
                    return Err(unexpected_char(src, i));
                }
            }
            b'!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Ne
                } else {
                    return Err(unexpected_char(src, i));
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Le
                } else {
                    i += 1;
                    Tok::Lt
                }
            }
            b'>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Ge
                } else {
                    i += 1;
                    Tok::Gt
                }
            }
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i);
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::BadNumber,
                    offset: start,
                })?;
                if !value.is_finite() {
                    return Err(ParseError {
                        kind: ParseErrorKind::BadNumber,
                        offset: start,
                    });
                }
                Tok::Num(value)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(src[start..i].to_string())
            }
            _ => return Err(unexpected_char(src, i)),
        };
        toks.push((tok, start));
    }
    Ok(toks)
}

fn unexpected_char(src: &str, offset: usize) -> ParseError {
    let ch = src[offset..].chars().next().unwrap_or('\u{fffd}');
    ParseError {
        kind: ParseErrorKind::UnexpectedChar(ch),
        offset,
    }
}

// Scans digits, an optional fraction, and an optional exponent. The
// exponent marker is consumed only when actual exponent digits follow, so
// "2e" lexes as a number and a stray identifier rather than failing here.
fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            i = j;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    i
}

struct Parser<'a> {
    tokens: &'a [(Tok, usize)],
    pos: usize,
    dim: usize,
    var: &'a str,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<(&'a Tok, usize)> {
        self.tokens.get(self.pos).map(|(t, o)| (t, *o))
    }

    fn advance(&mut self) -> Option<(&'a Tok, usize)> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if let Some((t, _)) = self.peek() {
            if t == tok {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn expect(&mut self, tok: &Tok, expected: &'static str) -> std::result::Result<usize, ParseError> {
        match self.advance() {
            Some((t, o)) if t == tok => Ok(o),
            Some((t, o)) => Err(ParseError {
                kind: ParseErrorKind::UnexpectedToken {
                    expected,
                    found: t.describe(),
                },
                offset: o,
            }),
            None => Err(ParseError {
                kind: ParseErrorKind::UnexpectedEnd { expected },
                offset: self.end,
            }),
        }
    }

    fn expr(&mut self) -> std::result::Result<Expr, ParseError> {
        let cond = self.comparison()?;
        if let Some((Tok::Question, offset)) = self.peek() {
            self.pos += 1;
            let then = self.expr()?;
            self.expect(&Tok::Colon, "':'")?;
            let otherwise = self.expr()?;
            return Ok(Expr {
                kind: ExprKind::If(Box::new(cond), Box::new(then), Box::new(otherwise)),
                offset,
            });
        }
        Ok(cond)
    }

    fn comparison(&mut self) -> std::result::Result<Expr, ParseError> {
        let left = self.additive()?;
        let (op, offset) = match self.peek() {
            Some((t, o)) if t.is_cmp() => {
                let op = match t {
                    Tok::EqEq => CmpOp::Eq,
                    Tok::Ne => CmpOp::Ne,
                    Tok::Lt => CmpOp::Lt,
                    Tok::Le => CmpOp::Le,
                    Tok::Gt => CmpOp::Gt,
                    Tok::Ge => CmpOp::Ge,
                    _ => unreachable!(),
                };
                self.pos += 1;
                (op, o)
            }
            _ => return Ok(left),
        };
        let right = self.additive()?;
        if let Some((t, o)) = self.peek() {
            if t.is_cmp() {
                return Err(ParseError {
                    kind: ParseErrorKind::ChainedComparison,
                    offset: o,
                });
            }
        }
        Ok(Expr {
            kind: ExprKind::Cmp(op, Box::new(left), Box::new(right)),
            offset,
        })
    }

    fn additive(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut left = self.multiplicative()?;
        loop {
            let (op, offset) = match self.peek() {
                Some((Tok::Plus, o)) => (BinOp::Add, o),
                Some((Tok::Minus, o)) => (BinOp::Sub, o),
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.multiplicative()?;
            left = Expr {
                kind: ExprKind::Bin(op, Box::new(left), Box::new(right)),
                offset,
            };
        }
    }

    fn multiplicative(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut left = self.power()?;
        loop {
            let (op, offset) = match self.peek() {
                Some((Tok::Star, o)) => (BinOp::Mul, o),
                Some((Tok::Slash, o)) => (BinOp::Div, o),
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.power()?;
            left = Expr {
                kind: ExprKind::Bin(op, Box::new(left), Box::new(right)),
                offset,
            };
        }
    }

    fn power(&mut self) -> std::result::Result<Expr, ParseError> {
        let base = self.unary()?;
        if let Some((Tok::Caret, offset)) = self.peek() {
            self.pos += 1;
            let exponent = self.power()?;
            return Ok(Expr {
                kind: ExprKind::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)),
                offset,
            });
        }
        Ok(base)
    }

    fn unary(&mut self) -> std::result::Result<Expr, ParseError> {
        if let Some((Tok::Minus, offset)) = self.peek() {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                offset,
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> std::result::Result<Expr, ParseError> {
        match self.advance() {
            Some((Tok::Num(v), offset)) => Ok(Expr {
                kind: ExprKind::Literal(*v),
                offset,
            }),
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some((Tok::Ident(name), offset)) => self.ident(name, offset),
            Some((t, o)) => Err(ParseError {
                kind: ParseErrorKind::UnexpectedToken {
                    expected: "a number, variable, call, or '('",
                    found: t.describe(),
                },
                offset: o,
            }),
            None => Err(ParseError {
                kind: ParseErrorKind::UnexpectedEnd {
                    expected: "a number, variable, call, or '('",
                },
                offset: self.end,
            }),
        }
    }

    fn ident(&mut self, name: &str, offset: usize) -> std::result::Result<Expr, ParseError> {
        let func = match name {
            "abs" => Some(Func::Abs),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            _ => None,
        };
        if let Some(func) = func {
            self.expect(&Tok::LParen, "'('")?;
            let mut args = vec![self.expr()?];
            while self.eat(&Tok::Comma) {
                args.push(self.expr()?);
            }
            self.expect(&Tok::RParen, "')'")?;
            if args.len() != func.arity() {
                return Err(ParseError {
                    kind: ParseErrorKind::WrongArity {
                        name: func.name(),
                        expected: func.arity(),
                        found: args.len(),
                    },
                    offset,
                });
            }
            return Ok(Expr {
                kind: ExprKind::Call(func, args),
                offset,
            });
        }
        if name != self.var {
            return Err(ParseError {
                kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
                offset,
            });
        }
        if self.eat(&Tok::LBracket) {
            let index = match self.advance() {
                Some((Tok::Num(v), o)) => {
                    if v.fract() != 0.0 || *v < 0.0 || *v > u32::MAX as f64 {
                        return Err(ParseError {
                            kind: ParseErrorKind::BadIndex,
                            offset: o,
                        });
                    }
                    *v as usize
                }
                Some((t, o)) => {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnexpectedToken {
                            expected: "an integer index",
                            found: t.describe(),
                        },
                        offset: o,
                    })
                }
                None => {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnexpectedEnd {
                            expected: "an integer index",
                        },
                        offset: self.end,
                    })
                }
            };
            self.expect(&Tok::RBracket, "']'")?;
            if index >= self.dim {
                return Err(ParseError {
                    kind: ParseErrorKind::IndexOutOfRange {
                        index,
                        dim: self.dim,
                    },
                    offset,
                });
            }
            return Ok(Expr {
                kind: ExprKind::Var(index),
                offset,
            });
        }
        if self.dim != 1 {
            return Err(ParseError {
                kind: ParseErrorKind::UnexpectedToken {
                    expected: "an indexed variable (bare name needs dimension 1)",
                    found: format!("identifier {name:?}"),
                },
                offset,
            });
        }
        Ok(Expr {
            kind: ExprKind::Var(0),
            offset,
        })
    }
}
