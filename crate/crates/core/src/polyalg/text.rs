//! Exchange grammar.
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*      divisors must be nonzero constants
//! factor := '-' factor | atom ['^' integer]
//! atom   := integer | name | '(' expr ')'
//! ```
//!
//! Printing emits the expanded canonical form, terms in decreasing lex order
//! of variable ids, each as `coeff*name^exp*…` with rationals written `p/q`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::poly::{Polynomial, Rat};
use super::table::VariableTable;
use super::PolyError;

/// Parses a rational polynomial over the names in `table`.
pub fn parse_poly(src: &str, table: &VariableTable) -> Result<Polynomial<Rat>, PolyError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, table };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rat(src: &str) -> Result<Rat, PolyError> {
    let table = VariableTable::new();
    let p = parse_poly(src, &table)?;
    match p.len() {
        0 => Ok(Rat::zero()),
        1 if p.total_degree() == Some(0) => Ok(p.coeff(&Monomial::one())),
        _ => Err(PolyError::Parse { pos: 0, msg: "not a rational constant".into() }),
    }
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Prints `p` in the exchange grammar.
pub fn format_poly(p: &Polynomial<Rat>, table: &VariableTable) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let mut factors: Vec<String> = Vec::new();
        if !a.is_one() || m.is_one() {
            factors.push(format_rat(&a));
        }
        for &(v, e) in m.pairs() {
            let name = table.name(v);
            factors.push(if e == 1 { name.to_string() } else { format!("{name}^{e}") });
        }
        out.push_str(&factors.join("*"));
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    table: &'a VariableTable,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial<Rat>, PolyError> {
        let mut acc = match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial<Rat>, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.factor()?;
                    let k = if d.len() == 1 && d.total_degree() == Some(0) {
                        d.coeff(&Monomial::one())
                    } else {
                        return Err(PolyError::Parse { pos: at, msg: "division by a non-constant".into() });
                    };
                    acc = acc.scale(&(Rat::one() / k));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial<Rat>, PolyError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial<Rat>, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Polynomial::constant(Rat::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.table.id(name) {
                    Some(v) => Ok(Polynomial::var(v)),
                    None => Err(PolyError::Parse { pos: start, msg: format!("unknown variable `{name}`") }),
                }
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        s.parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }
}
