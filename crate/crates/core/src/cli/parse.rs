//! Recursive-descent parser for polynomial expressions over declared
//! variables: integer and `INT/INT` literals, `+ - * ^` and parentheses.
//! Division is only accepted between two integer literals; negative
//! exponents only on Laurent variables.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactalg::{MPoly, Monomial, Rat};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect())));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    zero: &'a MPoly,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?)?;
            } else if self.peek() == Some(&Tok::Sym('/')) {
                return self.err("division is only supported between integer literals");
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MPoly> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn exponent(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                let n: i64 = i64::try_from(n).or_else(|_| self.err("exponent too large"))?;
                let n = if neg { -n } else { n };
                i32::try_from(n).map(i64::from).or_else(|_| self.err("exponent too large"))
            }
            _ => self.err("expected an integer exponent"),
        }
    }

    fn power(&mut self) -> Result<MPoly> {
        // identifiers take negative exponents directly (Laurent variables)
        if let Some(Tok::Ident(name)) = self.peek().cloned() {
            let pos = self.pos();
            self.i += 1;
            let idx = self
                .zero
                .vars()
                .iter()
                .position(|v| *v == name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            let e = if self.eat('^') { self.exponent()? } else { 1 };
            let n = self.zero.nvars();
            return self
                .zero
                .monomial_like(Monomial::var(n, idx, e as i32), Rat::one())
                .map_err(|err| match err {
                    Error::LaurentNotAllowed(v) => {
                        Error::Syntax { pos, msg: format!("negative exponent on non-Laurent variable `{v}`") }
                    }
                    other => other,
                });
        }
        let base = self.primary()?;
        if self.eat('^') {
            let e = self.exponent()?;
            if e < 0 {
                return self.err("negative exponents apply to variables only");
            }
            return base.pow(e as u32);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<MPoly> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                let mut d = BigInt::from(1);
                if self.eat('/') {
                    match self.peek().cloned() {
                        Some(Tok::Int(m)) if m != BigInt::from(0) => {
                            self.i += 1;
                            d = m;
                        }
                        Some(Tok::Int(_)) => return self.err("division by zero"),
                        _ => return self.err("division is only supported between integer literals"),
                    }
                }
                Ok(self.zero.constant_like(Rat::from_bigints(n, d)))
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` over `vars`; `laurent[i]` allows negative powers of
/// `vars[i]`.
pub fn parse_polynomial(text: &str, vars: &[String], laurent: &[bool]) -> Result<MPoly> {
    let vars: Arc<[String]> = vars.iter().cloned().collect();
    let flags: Arc<[bool]> = if laurent.is_empty() { vec![false; vars.len()].into() } else { laurent.into() };
    let zero = MPoly::zero_in(vars, flags);
    let mut p = Parser { toks: lex(text)?, i: 0, end: text.len(), zero: &zero };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}
