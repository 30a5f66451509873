//! Expression parser for polynomials and rational functions.
//!
//! Grammar: `+ - * ^` with parentheses and unary minus; `^` takes a
//! non-negative integer. Identifiers resolve to declared variables or the
//! field's generator symbol. A single top-level `/` splits numerator and
//! denominator; `/` is not allowed anywhere else. Errors carry the byte
//! position of the offending token.

use super::{MultiPoly, RationalFunction, Vars};
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};

pub fn parse_poly(field: &Field, vars: &Vars, input: &str) -> Result<MultiPoly> {
    let mut p = Parser::new(field, vars, input);
    p.skip_ws();
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        let msg = if p.peek() == Some(b'/') {
            "'/' is only allowed once at the top level; use parse_rational".to_string()
        } else {
            "unexpected trailing input".to_string()
        };
        return Err(Error::Parse { pos: p.pos, msg });
    }
    Ok(poly)
}

pub fn parse_rational(field: &Field, vars: &Vars, input: &str) -> Result<RationalFunction> {
    let mut p = Parser::new(field, vars, input);
    p.skip_ws();
    let num = p.expr()?;
    p.skip_ws();
    if p.peek() == Some(b'/') {
        p.pos += 1;
        p.skip_ws();
        let den_pos = p.pos;
        let den = p.expr()?;
        p.skip_ws();
        if p.pos != p.input.len() {
            return Err(Error::Parse {
                pos: p.pos,
                msg: "unexpected trailing input".to_string(),
            });
        }
        if den.is_zero() {
            return Err(Error::Parse {
                pos: den_pos,
                msg: "denominator is zero".to_string(),
            });
        }
        RationalFunction::new(num, den)
    } else if p.pos != p.input.len() {
        Err(Error::Parse {
            pos: p.pos,
            msg: "unexpected trailing input".to_string(),
        })
    } else {
        Ok(RationalFunction::from_poly(num))
    }
}

struct Parser<'a> {
    field: &'a Field,
    vars: &'a Vars,
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(field: &'a Field, vars: &'a Vars, input: &'a str) -> Self {
        Parser {
            field,
            vars,
            input: input.as_bytes(),
            pos: 0,
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

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
                acc = acc * self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == start {
                return Err(Error::Parse {
                    pos: start,
                    msg: "expected integer exponent".to_string(),
                });
            }
            let e: u32 = std::str::from_utf8(&self.input[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse {
                    pos: start,
                    msg: "exponent too large".to_string(),
                })?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                Ok(-&self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let v = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(Error::Parse {
                        pos: self.pos,
                        msg: "expected ')'".to_string(),
                    });
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: u128 = std::str::from_utf8(&self.input[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| Error::Parse {
                        pos: start,
                        msg: "integer too large".to_string(),
                    })?;
                let c = FieldElement::from_int(self.field, (n % self.field.p() as u128) as i64);
                Ok(MultiPoly::constant(self.field, self.vars, c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.input.len()
                    && (self.input[self.pos].is_ascii_alphanumeric()
                        || self.input[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
                if let Some(i) = self.vars.iter().position(|v| v == name) {
                    Ok(MultiPoly::var(self.field, self.vars, i))
                } else if name == self.field.gen_name() {
                    Ok(MultiPoly::constant(
                        self.field,
                        self.vars,
                        FieldElement::generator(self.field),
                    ))
                } else {
                    Err(Error::Parse {
                        pos: start,
                        msg: format!("unknown symbol '{name}'"),
                    })
                }
            }
            _ => Err(Error::Parse {
                pos: self.pos,
                msg: "expected a term".to_string(),
            }),
        }
    }
}
