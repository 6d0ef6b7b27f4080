use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;

use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    InvalidNumber(String),
    UnknownIdentifier(String),
    Arity { func: &'static str, expected: usize, found: usize },
}

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = self.offset;
        match &self.kind {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}' at byte {at}"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "syntax error: unexpected '{t}' at byte {at}"),
            ParseErrorKind::UnexpectedEnd => write!(f, "syntax error: unexpected end of input at byte {at}"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number '{s}' at byte {at}"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier '{s}' at byte {at}"),
            ParseErrorKind::Arity { func, expected, found } => {
                write!(f, "{func} takes {expected} argument(s), found {found} at byte {at}")
            }
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Num(&'a str),
    Ident(&'a str),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok<'_> {
    fn text(&self) -> String {
        match self {
            Tok::Num(s) | Tok::Ident(s) => s.to_string(),
            Tok::Op(c) => c.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok<'a>, usize), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if start >= bytes.len() {
            return Ok((Tok::End, start));
        }
        let c = bytes[start] as char;
        if c.is_ascii_digit() || c == '.' {
            let mut i = start;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                    while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            self.pos = i;
            return Ok((Tok::Num(&self.src[start..i]), start));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut i = start;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            self.pos = i;
            return Ok((Tok::Ident(&self.src[start..i]), start));
        }
        self.pos = start + c.len_utf8();
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or(c);
                return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(ch), offset: start });
            }
        };
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok<'a>,
    at: usize,
}

/// Parses an expression source string.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    if source.trim().is_empty() {
        return Err(ParseError { kind: ParseErrorKind::Empty, offset: 0 });
    }
    let mut lex = Lexer { src: source, pos: 0 };
    let (tok, at) = lex.next()?;
    let mut p = Parser { lex, tok, at };
    let e = p.sum()?;
    if p.tok != Tok::End {
        return Err(p.unexpected());
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lex.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn unexpected(&self) -> ParseError {
        let kind = match self.tok {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            _ => ParseErrorKind::UnexpectedToken(self.tok.text()),
        };
        ParseError { kind, offset: self.at }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        while let Tok::Op(c @ ('+' | '-')) = self.tok {
            self.bump()?;
            let rhs = self.product()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.tok {
            self.bump()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.tok == Tok::Op('+') {
            self.bump()?;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok == Tok::Op('^') {
            self.bump()?;
            // right-associative; the exponent may carry its own sign
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(s) => {
                let v: f64 = s.parse().map_err(|_| ParseError { kind: ParseErrorKind::InvalidNumber(s.to_string()), offset: self.at })?;
                self.bump()?;
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                let at = self.at;
                if let Some(func) = Func::lookup(name) {
                    self.bump()?;
                    return self.call(func, at);
                }
                let e = ident(name).ok_or(ParseError { kind: ParseErrorKind::UnknownIdentifier(name.to_string()), offset: at })?;
                self.bump()?;
                Ok(e)
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.sum()?;
                if self.tok != Tok::RParen {
                    return Err(self.unexpected());
                }
                self.bump()?;
                Ok(e)
            }
            _ => Err(self.unexpected()),
        }
    }

    fn call(&mut self, func: Func, at: usize) -> Result<Expr, ParseError> {
        if self.tok != Tok::LParen {
            return Err(self.unexpected());
        }
        self.bump()?;
        let mut args = alloc::vec::Vec::new();
        if self.tok != Tok::RParen {
            loop {
                args.push(self.sum()?);
                if self.tok == Tok::Comma {
                    self.bump()?;
                    continue;
                }
                break;
            }
        }
        if self.tok != Tok::RParen {
            return Err(self.unexpected());
        }
        self.bump()?;
        if args.len() != 1 {
            return Err(ParseError { kind: ParseErrorKind::Arity { func: func.name(), expected: 1, found: args.len() }, offset: at });
        }
        Ok(Expr::Call(func, Box::new(args.pop().unwrap())))
    }
}

fn ident(name: &str) -> Option<Expr> {
    match name {
        "pi" => return Some(Expr::Num(core::f64::consts::PI)),
        "e" => return Some(Expr::Num(core::f64::consts::E)),
        "t" => return Some(Expr::Var(Var::T)),
        "u" => return Some(Expr::Var(Var::Param(0))),
        "v" => return Some(Expr::Var(Var::Param(1))),
        "w" => return Some(Expr::Var(Var::Param(2))),
        _ => {}
    }
    let (head, idx) = name.split_at(1);
    let k: u8 = idx.parse().ok()?;
    if idx.starts_with('0') {
        return None;
    }
    match head {
        "x" if (1..=6).contains(&k) => Some(Expr::Var(Var::X(k))),
        "q" if (1..=3).contains(&k) => Some(Expr::Var(Var::Q(k))),
        "p" if (1..=3).contains(&k) => Some(Expr::Var(Var::P(k))),
        _ => None,
    }
}
