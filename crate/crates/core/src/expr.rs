//! Exact arithmetic over decimal literals, used to replay computations.
//!
//! Grammar: `expr := term (('+'|'-') term)*`, `term := unary (('*'|'/') unary)*`,
//! `unary := '-' unary | atom`, `atom := number | '(' expr ')'`.

use alloc::string::String;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
    #[error("division by zero")]
    DivisionByZero,
}

/// Evaluates `src` exactly.
pub fn evaluate(src: &str) -> Result<BigRational, ExprError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v)
}

/// Parses a plain decimal literal such as `-12.5` exactly.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let mut p = Parser { src: body.as_bytes(), pos: 0 };
    let v = p.number().ok()?;
    if p.pos != body.len() {
        return None;
    }
    Some(if neg { -v } else { v })
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Whether `claimed` equals the exact `result` within a relative tolerance
/// of 1e-9 (absolute for results smaller than one).
pub fn replay_matches(result: &BigRational, claimed: f64) -> bool {
    let Some(c) = rational_from_f64(claimed) else {
        return false;
    };
    let diff = (result - &c).abs();
    let scale = if result.abs() > BigRational::from_integer(BigInt::from(1)) {
        result.abs()
    } else {
        BigRational::from_integer(BigInt::from(1))
    };
    // 1e-9 as an exact fraction.
    let tol = BigRational::new(BigInt::from(1), BigInt::from(1_000_000_000u64));
    diff <= tol * scale
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExprError {
        ExprError::Parse {
            at: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<BigRational, ExprError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BigRational, ExprError> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            if op == b'*' {
                acc *= rhs;
            } else {
                if rhs.is_zero() {
                    return Err(ExprError::DivisionByZero);
                }
                acc /= rhs;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<BigRational, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => Err(self.error("expected a number")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<BigRational, ExprError> {
        let start = self.pos;
        let mut digits = String::new();
        let mut frac_len = 0u32;
        let mut seen_dot = false;
        while let Some(&c) = self.src.get(self.pos) {
            match c {
                b'0'..=b'9' => {
                    digits.push(c as char);
                    if seen_dot {
                        frac_len += 1;
                    }
                }
                b'.' if !seen_dot => seen_dot = true,
                _ => break,
            }
            self.pos += 1;
        }
        if digits.is_empty() {
            self.pos = start;
            return Err(self.error("expected digits"));
        }
        let numer: BigInt = digits.parse().map_err(|_| self.error("bad number"))?;
        let denom = num_traits::pow(BigInt::from(10), frac_len as usize);
        Ok(BigRational::new(numer, denom))
    }
}
