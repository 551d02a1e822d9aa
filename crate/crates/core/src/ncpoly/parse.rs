//! Recursive-descent parser for the constraint language:
//!
//! ```text
//! poly  := term (('+'|'-') term)*
//! term  := coeff ('*' word)? | word
//! word  := VAR ('*' VAR)*
//! VAR   := 'X' INT
//! coeff := REAL | '(' REAL ',' REAL ')' | 'i' | REAL '*' 'i'
//! ```
//!
//! Whitespace is insignificant. A leading sign on the first term is accepted,
//! and reals inside a `(re,im)` pair may carry their own sign.

use num_complex::Complex64;

use super::{NCPolynomial, Word};
use crate::error::{Error, Result};

pub(super) fn parse(text: &str, arity: usize) -> Result<NCPolynomial> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, arity };
    let terms = p.poly()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    NCPolynomial::from_terms(arity, terms)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn poly(&mut self) -> Result<Vec<(Word, Complex64)>> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        if self.eat(b'-') {
            sign = -1.0;
        } else {
            self.eat(b'+');
        }
        loop {
            let (w, c) = self.term()?;
            terms.push((w, c * sign));
            if self.eat(b'+') {
                sign = 1.0;
            } else if self.eat(b'-') {
                sign = -1.0;
            } else {
                break;
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(Word, Complex64)> {
        match self.peek() {
            Some(b'X') => Ok((self.word()?, Complex64::new(1.0, 0.0))),
            Some(_) => {
                let c = self.coeff()?;
                if self.eat(b'*') {
                    Ok((self.word()?, c))
                } else {
                    Ok((Word::new(), c))
                }
            }
            None => Err(self.error("expected a term")),
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = vec![self.var()?];
        loop {
            let save = self.pos;
            if self.eat(b'*') {
                if self.peek() == Some(b'X') {
                    w.push(self.var()?);
                    continue;
                }
                self.pos = save;
                return Err(self.error("expected a variable after '*'"));
            }
            return Ok(w);
        }
    }

    fn var(&mut self) -> Result<usize> {
        self.expect(b'X')?;
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an index after 'X'"));
        }
        let idx: usize = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Syntax { pos: start, msg: "index too large".into() })?;
        if idx == 0 || idx > self.arity {
            return Err(Error::IndexOutOfRange { index: idx, arity: self.arity });
        }
        Ok(idx - 1)
    }

    fn coeff(&mut self) -> Result<Complex64> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let re = self.real(true)?;
                self.expect(b',')?;
                let im = self.real(true)?;
                self.expect(b')')?;
                Ok(Complex64::new(re, im))
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Complex64::new(0.0, 1.0))
            }
            _ => {
                let r = self.real(false)?;
                let save = self.pos;
                if self.eat(b'*') && self.peek() == Some(b'i') {
                    self.pos += 1;
                    return Ok(Complex64::new(0.0, r));
                }
                self.pos = save;
                Ok(Complex64::new(r, 0.0))
            }
        }
    }

    fn real(&mut self, signed: bool) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        if signed && i < s.len() && (s[i] == b'-' || s[i] == b'+') {
            i += 1;
        }
        let digits_start = i;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i == digits_start {
            return Err(self.error("expected a number"));
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'-' || s[j] == b'+') {
                j += 1;
            }
            let exp_digits = j;
            while j < s.len() && s[j].is_ascii_digit() {
                j += 1;
            }
            if j > exp_digits {
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).unwrap();
        let v: f64 = text
            .parse()
            .map_err(|_| Error::Syntax { pos: start, msg: format!("bad number '{text}'") })?;
        if !v.is_finite() {
            return Err(Error::Syntax { pos: start, msg: "non-finite number".into() });
        }
        self.pos = i;
        Ok(v)
    }
}
