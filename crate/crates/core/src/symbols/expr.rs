//! Coefficient expressions for user-defined scalar operators.
//!
//! The config file accepts polynomial coefficient expressions in the base
//! coordinates. Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' UINT)?
//! atom   := NUMBER | 'i' | VAR | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
//! VAR    := 'x' DIGIT+                (1-based coordinate index)
//!         | 'x' | 'y' | 'z' | 't'     (aliases for x1, x2, x3, x1)
//! ```
//!
//! Numbers are decimal floats; `i` is the imaginary unit. Whitespace is free.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    /// 0-based coordinate index.
    Coord(usize),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Coord(j) => Complex64::new(x.get(*j).copied().unwrap_or(0.0), 0.0),
            Expr::Sin(e) => e.eval(x).sin(),
            Expr::Cos(e) => e.eval(x).cos(),
            Expr::Neg(e) => -e.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Pow(e, p) => e.eval(x).powu(*p),
        }
    }

    /// Largest 0-based coordinate index mentioned, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Coord(j) => Some(*j),
            Expr::Sin(e) | Expr::Cos(e) | Expr::Neg(e) | Expr::Pow(e, _) => e.max_coord(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                match (a.max_coord(), b.max_coord()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }
}

pub fn parse(input: &str) -> Result<Expr> {
    let mut p = Parser {
        input: input.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::ExprParse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = if self.eat(b'-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let p = self.uint()?;
            return Ok(Expr::Pow(Box::new(base), p));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.eat(b'(');
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("expected a number, coordinate, 'i', sin(..) or cos(..)")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            let exponent_sign = (c == b'+' || c == b'-')
                && matches!(
                    self.input.get(self.pos.wrapping_sub(1)),
                    Some(b'e') | Some(b'E')
                );
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exponent_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| Error::ExprParse {
            position: start,
            message: format!("bad number literal '{text}'"),
        })?;
        self.skip_ws();
        Ok(Expr::Const(Complex64::new(v, 0.0)))
    }

    fn uint(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        let v: u32 = text.parse().map_err(|_| Error::ExprParse {
            position: start,
            message: "expected a non-negative integer exponent".into(),
        })?;
        self.skip_ws();
        Ok(v)
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .to_string();
        self.skip_ws();
        match name.as_str() {
            "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
            "sin" | "cos" => {
                if !self.eat(b'(') {
                    return Err(self.err("expected '(' after trig function"));
                }
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(if name == "sin" {
                    Expr::Sin(Box::new(inner))
                } else {
                    Expr::Cos(Box::new(inner))
                })
            }
            "x" => Ok(Expr::Coord(0)),
            "y" => Ok(Expr::Coord(1)),
            "z" => Ok(Expr::Coord(2)),
            "t" => Ok(Expr::Coord(0)),
            _ => {
                if let Some(rest) = name.strip_prefix('x') {
                    if let Ok(k) = rest.parse::<usize>() {
                        if k >= 1 {
                            return Ok(Expr::Coord(k - 1));
                        }
                    }
                }
                Err(Error::ExprParse {
                    position: start,
                    message: format!("unknown identifier '{name}'"),
                })
            }
        }
    }
}
