//! Recursive-descent parser.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative.

use super::{BinOp, Constants, Func, Node};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

pub(super) struct Parser<'a> {
    src: &'a str,
    pos: usize,
    constants: &'a Constants,
    tok: Tok,
    tok_start: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

impl<'a> Parser<'a> {
    pub(super) fn new(src: &'a str, constants: &'a Constants) -> Self {
        Parser { src, pos: 0, constants, tok: Tok::End, tok_start: 0 }
    }

    pub(super) fn parse(mut self) -> Result<Node> {
        self.advance()?;
        let node = self.expr()?;
        if self.tok != Tok::End {
            return Err(syntax(self.tok_start, format!("unexpected {}", self.describe())));
        }
        Ok(node)
    }

    fn describe(&self) -> String {
        match &self.tok {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }

    fn advance(&mut self) -> Result<()> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        self.tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => self.number()?,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            _ => {
                let ch = self.src[self.pos..].chars().next().unwrap_or('?');
                return Err(syntax(self.pos, format!("unexpected character `{ch}`")));
            }
        };
        Ok(())
    }

    fn number(&mut self) -> Result<Tok> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let digits = |pos: &mut usize| {
            let s = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - s
        };
        let mut n = digits(&mut self.pos);
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            self.pos += 1;
            n += digits(&mut self.pos);
        }
        if n == 0 {
            return Err(syntax(start, "malformed number"));
        }
        if self.pos < bytes.len() && matches!(bytes[self.pos], b'e' | b'E') {
            let mut look = self.pos + 1;
            if look < bytes.len() && matches!(bytes[look], b'+' | b'-') {
                look += 1;
            }
            if digits(&mut look) == 0 {
                return Err(syntax(look, "malformed exponent"));
            }
            self.pos = look;
        }
        let text = &self.src[start..self.pos];
        let v: f64 = text.parse().map_err(|_| syntax(start, format!("malformed number `{text}`")))?;
        if !v.is_finite() {
            return Err(syntax(start, format!("number `{text}` overflows")));
        }
        Ok(Tok::Num(v))
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.tok {
            self.advance()?;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.tok {
            self.advance()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.tok == Tok::Op('-') {
            self.advance()?;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.tok == Tok::Op('^') {
            self.advance()?;
            let exp = self.unary()?;
            return Ok(Node::Binary { op: BinOp::Pow, lhs: Box::new(base), rhs: Box::new(exp) });
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if self.tok != Tok::RParen {
            return Err(syntax(self.tok_start, format!("expected `)`, found {}", self.describe())));
        }
        self.advance()
    }

    fn atom(&mut self) -> Result<Node> {
        let start = self.tok_start;
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Node::Num(v))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.advance()?;
                if self.tok == Tok::LParen {
                    let func = Func::from_name(&name)
                        .ok_or(Error::UnknownSymbol { name, offset: start })?;
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call { func, arg: Box::new(arg) });
                }
                self.symbol(name, start)
            }
            other => {
                self.tok = other;
                Err(syntax(start, format!("expected a value, found {}", self.describe())))
            }
        }
    }

    fn symbol(&self, name: String, offset: usize) -> Result<Node> {
        match name.as_str() {
            "x0" => return Ok(Node::Coord(0)),
            "x1" => return Ok(Node::Coord(1)),
            "x2" => return Ok(Node::Coord(2)),
            "x3" => return Ok(Node::Coord(3)),
            _ => {}
        }
        if let Some(&value) = self.constants.get(&name) {
            return Ok(Node::Const { name, value });
        }
        if name == "pi" {
            return Ok(Node::Const { name, value: std::f64::consts::PI });
        }
        Err(Error::UnknownSymbol { name, offset })
    }
}
