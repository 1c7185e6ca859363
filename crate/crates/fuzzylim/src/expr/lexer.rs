//! Tokenizer for the expression language.

use thiserror::Error;

/// A lexical token with no position; positions travel alongside in
/// [`Spanned`] pairs.
#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Num(f64),
    Ident(String),
    /// A 3-tuple literal `(a, b, c)`, the triangular-constant syntax.
    Triple(f64, f64, f64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Lt,
    Gt,
    EqEq,
}

pub type Spanned = (Token, usize);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LexError {
    #[error("unexpected character '{ch}' at offset {offset}")]
    UnexpectedChar { ch: char, offset: usize },
    #[error("malformed number at offset {offset}")]
    BadNumber { offset: usize },
}

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.pos += 1;
        }
    }

    fn scan_number(&mut self) -> Result<f64, LexError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map_err(|_| LexError::BadNumber { offset: start })
    }

    /// Attempts to scan a whole tuple literal starting just after '('.
    /// Components are signed decimal or rational `p/q` literals. Returns
    /// the components and the position past the closing ')'.
    fn try_tuple(&mut self) -> Option<(f64, f64, f64)> {
        let saved = self.pos;
        let mut parts = Vec::with_capacity(3);
        for i in 0..3 {
            self.skip_ws();
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            if !matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos = saved;
                return None;
            }
            let mut v = match self.scan_number() {
                Ok(v) => v,
                Err(_) => {
                    self.pos = saved;
                    return None;
                }
            };
            self.skip_ws();
            // rational literal p/q, exact integers divided in binary
            if self.peek() == Some(b'/') {
                self.pos += 1;
                self.skip_ws();
                if !matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.pos = saved;
                    return None;
                }
                let q = match self.scan_number() {
                    Ok(q) => q,
                    Err(_) => {
                        self.pos = saved;
                        return None;
                    }
                };
                v /= q;
                self.skip_ws();
            }
            if neg {
                v = -v;
            }
            parts.push(v);
            let expected = if i < 2 { b',' } else { b')' };
            if self.peek() != Some(expected) {
                self.pos = saved;
                return None;
            }
            self.pos += 1;
        }
        Some((parts[0], parts[1], parts[2]))
    }
}

/// Tokenizes an expression source string, reporting byte offsets on error.
pub fn tokenize(src: &str) -> Result<Vec<Spanned>, LexError> {
    let mut s = Scanner {
        src: src.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    loop {
        s.skip_ws();
        let start = s.pos;
        let Some(c) = s.peek() else { break };
        let tok = match c {
            b'0'..=b'9' => Token::Num(s.scan_number()?),
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while matches!(s.peek(), Some(b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'_')) {
                    s.pos += 1;
                }
                Token::Ident(std::str::from_utf8(&s.src[start..s.pos]).unwrap().to_string())
            }
            b'(' => {
                s.pos += 1;
                match s.try_tuple() {
                    Some((a, b, c)) => Token::Triple(a, b, c),
                    None => Token::LParen,
                }
            }
            b')' => {
                s.bump();
                Token::RParen
            }
            b'{' => {
                s.bump();
                Token::LBrace
            }
            b'}' => {
                s.bump();
                Token::RBrace
            }
            b';' => {
                s.bump();
                Token::Semi
            }
            b'+' => {
                s.bump();
                Token::Plus
            }
            b'-' => {
                s.bump();
                Token::Minus
            }
            b'*' => {
                s.bump();
                Token::Star
            }
            b'/' => {
                s.bump();
                Token::Slash
            }
            b'^' => {
                s.bump();
                Token::Caret
            }
            b'<' => {
                s.bump();
                Token::Lt
            }
            b'>' => {
                s.bump();
                Token::Gt
            }
            b'=' => {
                s.bump();
                if s.peek() == Some(b'=') {
                    s.bump();
                    Token::EqEq
                } else {
                    return Err(LexError::UnexpectedChar { ch: '=', offset: start });
                }
            }
            _ => {
                return Err(LexError::UnexpectedChar {
                    ch: src[start..].chars().next().unwrap(),
                    offset: start,
                })
            }
        };
        out.push((tok, start));
    }
    Ok(out)
}
