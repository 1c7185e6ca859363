//! Recursive-descent parser.
//!
//! Grammar, loosest to tightest:
//!
//! ```text
//! expr      := term (('+' | '-') term)*
//! term      := unary (('*' | '/') unary)*
//! unary     := '-' unary | power
//! power     := atom ('^' exponent)?          // right-associative
//! exponent  := uint ('^' exponent)?
//! atom      := number | triple | 'x' | func '(' expr ')'
//!            | '(' expr ')' | piecewise
//! piecewise := '{' expr 'if' cond (';' expr 'if' cond)* '}'
//! cond      := 'x' cmp bound | bound cmp 'x'
//! cmp       := '<' | '>' | '=='
//! bound     := ['-'] number | triple
//! ```
//!
//! A bare number is a singleton constant; a 3-tuple is a triangular
//! constant. Unary minus applied directly to a number literal folds into
//! a negative singleton.

use super::lexer::{tokenize, LexError, Spanned, Token};
use super::{const_grid, Expr, Guard, GuardOp, UnaryFn};
use crate::fuzzy::FuzzyNumber;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("syntax error at offset {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("invalid constant at offset {offset}: {what}")]
    BadConstant { offset: usize, what: String },
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, o)| o).unwrap_or(self.end)
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => format!("{t:?}"),
            None => "end of input".to_string(),
        }
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.found(),
        }
    }

    fn expect(&mut self, tok: &Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = lhs.add(self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = lhs.sub(self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = lhs.mul(self.unary()?);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = lhs.div(self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            // fold -<number> into a negative singleton so printing round-trips
            if let Some(Token::Num(n)) = self.peek().cloned() {
                if !matches!(self.toks.get(self.pos + 1).map(|(t, _)| t), Some(Token::Caret)) {
                    self.pos += 1;
                    return self.singleton(-n);
                }
            }
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let n = self.exponent()?;
            Ok(base.pow(n))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let off = self.offset();
        let n = match self.bump() {
            Some(Token::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => v as u32,
            _ => {
                return Err(ParseError::Syntax {
                    offset: off,
                    expected: "nonnegative integer exponent".to_string(),
                    found: "other".to_string(),
                })
            }
        };
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let e = self.exponent()?;
            n.checked_pow(e).ok_or(ParseError::Syntax {
                offset: off,
                expected: "exponent within range".to_string(),
                found: "overflowing power tower".to_string(),
            })
        } else {
            Ok(n)
        }
    }

    fn singleton(&mut self, v: f64) -> Result<Expr, ParseError> {
        FuzzyNumber::singleton(v, &const_grid())
            .map(Expr::Const)
            .map_err(|e| ParseError::BadConstant {
                offset: self.offset(),
                what: e.to_string(),
            })
    }

    fn triangular(&mut self, a: f64, b: f64, c: f64) -> Result<Expr, ParseError> {
        FuzzyNumber::triangular(a, b, c, &const_grid())
            .map(Expr::Const)
            .map_err(|e| ParseError::BadConstant {
                offset: self.offset(),
                what: e.to_string(),
            })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                self.singleton(v)
            }
            Some(Token::Triple(a, b, c)) => {
                self.pos += 1;
                self.triangular(a, b, c)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(Expr::Var),
                    "exp" | "sin" | "abs" | "sqrt" => {
                        let f = match name.as_str() {
                            "exp" => UnaryFn::Exp,
                            "sin" => UnaryFn::Sin,
                            "abs" => UnaryFn::Abs,
                            _ => UnaryFn::Sqrt,
                        };
                        self.expect(&Token::LParen, "'(' after function name")?;
                        let arg = self.expr()?;
                        self.expect(&Token::RParen, "')'")?;
                        Ok(Expr::Unary(f, Box::new(arg)))
                    }
                    _ => {
                        self.pos -= 1;
                        Err(self.err("operand ('x', a number, or a function)"))
                    }
                }
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(&Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(Token::LBrace) => self.piecewise(),
            _ => Err(self.err("operand")),
        }
    }

    fn piecewise(&mut self) -> Result<Expr, ParseError> {
        self.expect(&Token::LBrace, "'{'")?;
        let mut branches = Vec::new();
        loop {
            let body = self.expr()?;
            let save = self.pos;
            match self.bump() {
                Some(Token::Ident(kw)) if kw == "if" => {}
                _ => {
                    self.pos = save;
                    return Err(self.err("'if' after piecewise branch expression"));
                }
            }
            branches.push((self.guard()?, body));
            match self.peek() {
                Some(Token::Semi) => {
                    self.pos += 1;
                }
                Some(Token::RBrace) => {
                    self.pos += 1;
                    return Ok(Expr::Piecewise(branches));
                }
                _ => return Err(self.err("';' or '}'")),
            }
        }
    }

    /// Condition `x OP bound` or `bound OP x` (the latter flips the operator).
    fn guard(&mut self) -> Result<Guard, ParseError> {
        let var_first = matches!(self.peek(), Some(Token::Ident(n)) if n == "x");
        if var_first {
            self.pos += 1;
            let op = self.guard_op()?;
            let bound = self.guard_bound()?;
            Ok(Guard { op, bound })
        } else {
            let bound = self.guard_bound()?;
            let op = match self.guard_op()? {
                GuardOp::Lt => GuardOp::Gt,
                GuardOp::Gt => GuardOp::Lt,
                GuardOp::Eq => GuardOp::Eq,
            };
            let save = self.pos;
            match self.bump() {
                Some(Token::Ident(n)) if n == "x" => Ok(Guard { op, bound }),
                _ => {
                    self.pos = save;
                    Err(self.err("'x' in piecewise condition"))
                }
            }
        }
    }

    fn guard_op(&mut self) -> Result<GuardOp, ParseError> {
        let save = self.pos;
        match self.bump() {
            Some(Token::Lt) => Ok(GuardOp::Lt),
            Some(Token::Gt) => Ok(GuardOp::Gt),
            Some(Token::EqEq) => Ok(GuardOp::Eq),
            _ => {
                self.pos = save;
                Err(self.err("comparison operator '<', '>' or '=='"))
            }
        }
    }

    fn guard_bound(&mut self) -> Result<FuzzyNumber, ParseError> {
        let neg = if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let off = self.offset();
        match self.bump() {
            Some(Token::Num(v)) => {
                let v = if neg { -v } else { v };
                FuzzyNumber::singleton(v, &const_grid()).map_err(|e| ParseError::BadConstant {
                    offset: off,
                    what: e.to_string(),
                })
            }
            Some(Token::Triple(a, b, c)) if !neg => FuzzyNumber::triangular(a, b, c, &const_grid())
                .map_err(|e| ParseError::BadConstant {
                    offset: off,
                    what: e.to_string(),
                }),
            other => {
                if other.is_some() {
                    self.pos -= 1;
                }
                Err(self.err("constant bound in piecewise condition"))
            }
        }
    }
}

/// Parses an expression source string into an [`Expr`].
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("end of input"));
    }
    Ok(e)
}
