//! Pratt parser for piece expressions.
//!
//! Grammar: numbers, `x`, `pi`, binary `+ - * /`, unary `-`, parentheses and
//! the functions `sin`, `cos`, `sqrt`, `min`, `max`. `*` and `/` bind tighter
//! than `+` and `-`; unary minus binds tighter than both.

use super::expr::{Expr, Func, PieceExpr};
use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (pos, tok) = lx.next()?;
            let end = tok == Tok::End;
            out.push((pos, tok));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Result<(usize, Tok)> {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((start, Tok::End));
        };
        let tok = match c {
            '0'..='9' | '.' => {
                self.take_while(|c| c.is_ascii_digit() || c == '.');
                // optional exponent
                let rest = &self.src[self.pos..];
                if rest.starts_with(['e', 'E']) {
                    let after = &rest[1..];
                    let skip = usize::from(after.starts_with(['+', '-']));
                    if after[skip..].starts_with(|c: char| c.is_ascii_digit()) {
                        self.pos += 1 + skip;
                        self.take_while(|c| c.is_ascii_digit());
                    }
                }
                Tok::Num(self.src[start..self.pos].to_string())
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            '+' | '-' | '*' | '/' => {
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
            ',' => {
                self.pos += 1;
                Tok::Comma
            }
            other => {
                return Err(Error::Parse { pos: start, msg: format!("unexpected character `{other}`") })
            }
        };
        Ok((start, tok))
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    mode: Mode,
}

const PREFIX_BP: u8 = 5;

fn infix_bp(op: char) -> (u8, u8) {
    match op {
        '+' | '-' => (1, 2),
        _ => (3, 4),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].1
    }

    fn pos(&self) -> usize {
        self.toks[self.i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].1.clone();
        if t != Tok::End {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                Tok::Op(op) => *op,
                _ => break,
            };
            let (lbp, rbp) = infix_bp(op);
            if lbp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(rbp)?;
            lhs = match op {
                '+' => Expr::Add(Box::new(lhs), Box::new(rhs)),
                '-' => Expr::Sub(Box::new(lhs), Box::new(rhs)),
                '*' => Expr::Mul(Box::new(lhs), Box::new(rhs)),
                _ => Expr::divide(lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(text) => match Scalar::parse(&text, self.mode) {
                Some(c) => Ok(Expr::Const(c)),
                None => Err(Error::Parse { pos, msg: format!("bad number `{text}`") }),
            },
            Tok::Op('-') => Ok(self.expr(PREFIX_BP)?.negate()),
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(&name, pos),
            Tok::End => Err(Error::Parse { pos, msg: "unexpected end of input".into() }),
            other => Err(Error::Parse { pos, msg: format!("unexpected token {other:?}") }),
        }
    }

    fn ident(&mut self, name: &str, pos: usize) -> Result<Expr> {
        match name {
            "x" => return Ok(Expr::X),
            "pi" => return Ok(Expr::Pi),
            _ => {}
        }
        let func = match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            "min" | "max" => None,
            _ => return Err(Error::Parse { pos, msg: format!("unknown name `{name}`") }),
        };
        self.expect(Tok::LParen, "`(` after function name")?;
        let a = self.expr(0)?;
        let e = match func {
            Some(f) => Expr::Call(f, Box::new(a)),
            None => {
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr(0)?;
                if name == "min" {
                    Expr::Min(Box::new(a), Box::new(b))
                } else {
                    Expr::Max(Box::new(a), Box::new(b))
                }
            }
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(e)
    }
}

/// Parses a piece expression. Decimal literals are exact in rational mode.
pub fn parse_piece(text: &str, mode: Mode) -> Result<PieceExpr> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0, mode };
    let e = p.expr(0)?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(PieceExpr::new(e))
}

/// Parses and evaluates an expression with no free variable, such as
/// `-sqrt(2)` or `1/3`.
pub fn parse_constant(text: &str, mode: Mode) -> Result<Scalar> {
    let e = parse_piece(text, mode)?;
    let p = e.as_poly().and_then(|p| p.as_constant());
    match p {
        Some(c) => Ok(c),
        None => Err(Error::Parse { pos: 0, msg: format!("`{text}` is not a constant") }),
    }
}
