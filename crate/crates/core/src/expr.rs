//! Arithmetic expressions over state variables `x1..xd`.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = unary { ("*" | "/") unary } ;
//! unary  = "-" unary | power ;
//! power  = atom [ "^" uint ] ;
//! atom   = number | var | "(" expr ")" ;
//! var    = "x" uint ;            (* 1-based, at most the system dimension *)
//! number = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! `^` takes a non-negative integer literal only and is evaluated by repeated
//! multiplication, so `-x1^2` parses as `-(x1^2)`.

use std::fmt;

use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree. Variables are stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluates the expression at `state`. Division by zero and overflow
    /// produce non-finite values rather than errors.
    pub fn eval(&self, state: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => state[*i],
            Expr::Neg(e) => -e.eval(state),
            Expr::Pow(e, n) => {
                let base = e.eval(state);
                let mut acc = 1.0;
                for _ in 0..*n {
                    acc *= base;
                }
                acc
            }
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(state), r.eval(state));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
        }
    }

    /// Largest variable index referenced (0-based), if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) | Expr::Pow(e, _) => e.max_var(),
            Expr::Bin(_, l, r) => match (l.max_var(), r.max_var()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

/// Fully parenthesized output that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Pow(e, n) => write!(f, "({e}^{n})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Var(usize),
    Int(u32),
    Op(char),
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some(tok) = lx.next_token()? {
            out.push(tok);
        }
        Ok(out)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => {
                self.pos += 1;
                Tok::Op(c)
            }
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            'x' | 'X' => {
                self.pos += 1;
                let digits = self.digits();
                if digits.is_empty() {
                    return Err(ParseError::new(start, "expected variable index after 'x'"));
                }
                let idx: usize = digits
                    .parse()
                    .map_err(|_| ParseError::new(start, "variable index out of range"))?;
                if idx == 0 {
                    return Err(ParseError::new(start, "variables are numbered from x1"));
                }
                Tok::Var(idx - 1)
            }
            c if c.is_ascii_digit() || c == '.' => self.number(start)?,
            other => {
                return Err(ParseError::new(start, format!("unexpected character '{other}'")));
            }
        };
        Ok(Some((start, tok)))
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let int_part = self.digits();
        let mut is_int = true;
        if self.peek() == Some('.') {
            is_int = false;
            self.pos += 1;
            self.digits();
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            is_int = false;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.digits().is_empty() {
                return Err(ParseError::new(self.pos, "malformed exponent"));
            }
        }
        let text = &self.src[start..self.pos];
        if is_int {
            if let Ok(n) = int_part.parse::<u32>() {
                return Ok(Tok::Int(n));
            }
        }
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| ParseError::new(start, format!("malformed number '{text}'")))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.bump();
            let at = self.pos();
            return match self.bump() {
                Some(Tok::Int(n)) => Ok(Expr::Pow(Box::new(base), n)),
                None => Err(ParseError::new(at, "unexpected end of input after '^'")),
                Some(_) => Err(ParseError::new(
                    at,
                    "exponent must be a non-negative integer literal",
                )),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.pos();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Int(n)) => Ok(Expr::Num(f64::from(n))),
            Some(Tok::Var(i)) => Ok(Expr::Var(i)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let close = self.pos();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    None => Err(ParseError::new(close, "unexpected end of input, expected ')'")),
                    Some(_) => Err(ParseError::new(close, "expected ')'")),
                }
            }
            None => Err(ParseError::new(at, "unexpected end of input")),
            Some(t) => Err(ParseError::new(at, format!("unexpected token {t:?}"))),
        }
    }
}

/// Parses a single expression. Positions in errors are byte offsets into `src`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.idx < p.toks.len() {
        return Err(ParseError::new(p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}
