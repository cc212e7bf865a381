use num::bigint::BigInt;

use super::expr::RationalExpr;
use super::{SymError, SymResult, Symbols};

/// Parse an arithmetic expression over declared symbols.
///
/// Accepted syntax: `+ - * / ^` with the usual precedence, parentheses,
/// unary minus, nonnegative integer literals and declared symbol names.
/// Exponents must be nonnegative integer literals. The symbol table of the
/// result lists variables first, then parameters.
pub fn parse(text: &str, variables: &[&str], parameters: &[&str]) -> SymResult<RationalExpr> {
    let syms = Symbols::new(variables.iter().chain(parameters.iter()).copied());
    parse_on(text, &syms)
}

/// Parse against an existing symbol table.
pub fn parse_on(text: &str, syms: &Symbols) -> SymResult<RationalExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        syms,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    syms: &'a Symbols,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> SymError {
        SymError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn expr(&mut self) -> SymResult<RationalExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> SymResult<RationalExpr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.bump();
                    acc = acc.div(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> SymResult<RationalExpr> {
        if self.peek() == Some(b'-') {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        if self.peek() == Some(b'+') {
            self.bump();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> SymResult<RationalExpr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.uint()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> SymResult<RationalExpr> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.bump();
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RationalExpr::from_poly(super::MultiPoly::constant(
                    self.syms,
                    num::BigRational::from_integer(n),
                )))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.syms.index_of(name) {
                    Some(i) => Ok(RationalExpr::var(self.syms, i)),
                    None => Err(SymError::Undeclared(name.to_string())),
                }
            }
            _ => Err(self.err("expected number, symbol or `(`")),
        }
    }

    fn integer(&mut self) -> SymResult<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse::<BigInt>()
            .map_err(|_| self.err("integer out of range"))
    }

    fn uint(&mut self) -> SymResult<u32> {
        self.skip_ws();
        let start = self.pos;
        let n = self.integer()?;
        u32::try_from(n).map_err(|_| SymError::Syntax {
            pos: start,
            msg: "exponent must be a nonnegative integer".to_string(),
        })
    }
}
