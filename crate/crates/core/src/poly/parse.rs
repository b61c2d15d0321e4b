//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' unary) | ('/' NUMBER))*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' INTEGER)?
//! atom   := NUMBER | IDENT | '(' expr ')'
//! ```
//!
//! `i` is the imaginary unit unless declared as a variable. Products are
//! expanded eagerly into sparse normal form.

use num_complex::Complex64;

use super::{Polynomial, VariableTable, MAX_EXPONENT};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src: text.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(b) = self.peek() else {
            return Ok((Tok::End, start));
        };
        let tok = match b {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(b as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => Tok::Number(self.number()),
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                Tok::Ident(self.slice(start))
            }
            _ => {
                let ch = std::str::from_utf8(&self.src[start..])
                    .ok()
                    .and_then(|s| s.chars().next())
                    .unwrap_or('?');
                return Err(Error::Syntax {
                    position: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        Ok((tok, start))
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> String {
        let start = self.pos;
        self.digits();
        if self.peek() == Some(b'.')
            && matches!(self.src.get(self.pos + 1), Some(c) if c.is_ascii_digit())
        {
            self.pos += 1;
            self.digits();
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                self.pos = save;
            }
        }
        self.slice(start)
    }

    fn slice(&self, start: usize) -> String {
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'a VariableTable,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn n(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let at = self.pos();
                    let divisor = match self.bump() {
                        (Tok::Number(text), _) => parse_real(&text, at)?,
                        _ => {
                            return Err(Error::Syntax {
                                position: at,
                                message: "division is only allowed by a numeric literal".into(),
                            })
                        }
                    };
                    if divisor == 0.0 {
                        return Err(Error::Syntax {
                            position: at,
                            message: "division by zero".into(),
                        });
                    }
                    acc = acc.scale(Complex64::new(1.0 / divisor, 0.0));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.pos();
        let exponent = match self.bump() {
            (Tok::Number(text), _) if text.bytes().all(|b| b.is_ascii_digit()) => {
                match text.parse::<u32>() {
                    Ok(e) if e < MAX_EXPONENT => e,
                    _ => {
                        return Err(Error::Syntax {
                            position: at,
                            message: format!("exponent `{text}` exceeds {}", MAX_EXPONENT - 1),
                        })
                    }
                }
            }
            _ => {
                return Err(Error::Syntax {
                    position: at,
                    message: "`^` must be followed by a nonnegative integer literal".into(),
                })
            }
        };
        if *self.peek() == Tok::Op('^') {
            return self.syntax("chained `^` needs parentheses");
        }
        Ok(base.pow(exponent))
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let at = self.pos();
        match self.bump() {
            (Tok::Number(text), _) => {
                Ok(Polynomial::constant(self.n(), Complex64::new(parse_real(&text, at)?, 0.0)))
            }
            (Tok::Ident(name), _) => match self.vars.index_of(&name) {
                Some(v) => Ok(Polynomial::var(self.n(), v)),
                None if name == "i" => Ok(Polynomial::constant(self.n(), Complex64::new(0.0, 1.0))),
                None => Err(Error::UndeclaredIdentifier { name, position: at }),
            },
            (Tok::LParen, _) => {
                let inner = self.expr()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(inner),
                    (_, p) => Err(Error::Syntax {
                        position: p,
                        message: "expected `)`".into(),
                    }),
                }
            }
            (Tok::End, p) => Err(Error::Syntax {
                position: p,
                message: "unexpected end of input".into(),
            }),
            (tok, p) => Err(Error::Syntax {
                position: p,
                message: format!("unexpected {}", describe(&tok)),
            }),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Number(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("operator `{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn parse_real(text: &str, at: usize) -> Result<f64> {
    text.parse::<f64>().map_err(|_| Error::Syntax {
        position: at,
        message: format!("malformed number `{text}`"),
    })
}

/// Parses `text` into sparse normal form over `vars`.
pub fn parse_polynomial(text: &str, vars: &VariableTable) -> Result<Polynomial> {
    let toks = Lexer::tokens(text)?;
    let mut parser = Parser { toks, at: 0, vars };
    let poly = parser.expr()?;
    match parser.peek() {
        Tok::End => Ok(poly),
        tok => {
            let message = match tok {
                Tok::Ident(_) | Tok::Number(_) | Tok::LParen => {
                    format!("expected operator before {} (implicit multiplication is not supported)", describe(tok))
                }
                other => format!("unexpected {}", describe(other)),
            };
            parser.syntax(message)
        }
    }
}
