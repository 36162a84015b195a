//! Recursive-descent parser with byte-offset error reporting.

use super::{const_fold, Expr, ExprAst, MAX_DEPTH};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        while let Some((tok, at)) = lx.next_token()? {
            out.push((tok, at));
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let at = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => return Ok(Some((self.lex_number()?, at))),
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos])
                    .expect("ascii ident")
                    .to_string();
                return Ok(Some((Tok::Ident(name), at)));
            }
            other => {
                return Err(Error::Syntax {
                    offset: at,
                    message: format!("unexpected character `{}`", other as char),
                })
            }
        };
        self.pos += 1;
        Ok(Some((tok, at)))
    }

    fn lex_number(&mut self) -> Result<Tok> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // `e` belonged to an identifier or was stray; back off
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        text.parse::<f64>().map(Tok::Num).map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
    var: Option<String>,
    fixed_var: bool,
}

const FUNCTIONS: &[&str] = &["abs", "sign", "exp", "sin", "cos", "heaviside"];

pub fn parse(src: &str, var: Option<&str>) -> Result<ExprAst> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: src.len(),
        var: var.map(str::to_string),
        fixed_var: var.is_some(),
    };
    let root = p.expr(0)?;
    if let Some((_, at)) = p.toks.get(p.idx) {
        return Err(Error::Syntax {
            offset: *at,
            message: "trailing input after expression".into(),
        });
    }
    let var = p.var.unwrap_or_else(|| "t".to_string());
    Ok(ExprAst::from_parts(root, &var))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(_, at)| *at)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Syntax { offset: at, message: format!("expected {what}") }),
        }
    }

    fn guard(&self, depth: usize) -> Result<()> {
        if depth > MAX_DEPTH {
            Err(Error::Syntax {
                offset: self.offset(),
                message: format!("expression deeper than {MAX_DEPTH} levels"),
            })
        } else {
            Ok(())
        }
    }

    // additive level
    fn expr(&mut self, depth: usize) -> Result<Expr> {
        self.guard(depth)?;
        let mut lhs = self.term(depth + 1)?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term(depth + 1)?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term(depth + 1)?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // multiplicative level
    fn term(&mut self, depth: usize) -> Result<Expr> {
        self.guard(depth)?;
        let mut lhs = self.unary(depth + 1)?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary(depth + 1)?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary(depth + 1)?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self, depth: usize) -> Result<Expr> {
        self.guard(depth)?;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.unary(depth + 1)?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power(depth + 1)
    }

    // `^` binds tighter than unary minus and is right-associative; the
    // exponent must constant-fold to a real literal
    fn power(&mut self, depth: usize) -> Result<Expr> {
        self.guard(depth)?;
        let base = self.atom(depth + 1)?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            let at = self.offset();
            self.bump();
            let exponent = self.unary(depth + 1)?;
            let value = const_fold(&exponent).ok_or_else(|| Error::Syntax {
                offset: at,
                message: "power exponent must be a real literal".into(),
            })?;
            return Ok(Expr::Pow(Box::new(base), value));
        }
        Ok(base)
    }

    fn atom(&mut self, depth: usize) -> Result<Expr> {
        self.guard(depth)?;
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let inner = self.expr(depth + 1)?;
                self.expect(Tok::RParen, "closing `)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => self.ident(name, at, depth),
            _ => Err(Error::Syntax {
                offset: at,
                message: "expected a number, variable, function or `(`".into(),
            }),
        }
    }

    fn ident(&mut self, name: String, at: usize, depth: usize) -> Result<Expr> {
        if FUNCTIONS.contains(&name.as_str()) {
            self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
            let arg = self.expr(depth + 1)?;
            self.expect(Tok::RParen, "closing `)`")?;
            let arg = Box::new(arg);
            return Ok(match name.as_str() {
                "abs" => Expr::Abs(arg),
                "sign" => Expr::Sign(arg),
                "exp" => Expr::Exp(arg),
                "sin" => Expr::Sin(arg),
                "cos" => Expr::Cos(arg),
                "heaviside" => Expr::Heaviside(arg),
                _ => unreachable!(),
            });
        }
        match &self.var {
            Some(v) if *v == name => Ok(Expr::Var),
            Some(_) => Err(Error::UnknownIdentifier { name, offset: at }),
            None if name == "t" || name == "s" => {
                if self.fixed_var {
                    return Err(Error::UnknownIdentifier { name, offset: at });
                }
                self.var = Some(name);
                Ok(Expr::Var)
            }
            None => Err(Error::UnknownIdentifier { name, offset: at }),
        }
    }
}
