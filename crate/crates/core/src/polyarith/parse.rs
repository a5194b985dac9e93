//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar:
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//! Division is only allowed by nonzero constants, so `3/64*x` is accepted.

use super::mpoly::{MPoly, Rational};
use super::PolyError;
use num_bigint::BigInt;
use num_traits::Zero;

/// Parse `src` as a polynomial in `vars`.
pub fn parse_poly<S: AsRef<str>>(src: &str, vars: &[S]) -> Result<MPoly, PolyError> {
    let names: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        vars: names,
    };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(PolyError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(PolyError::Syntax {
            pos: p.pos,
            msg: format!("unexpected character '{}'", p.src[p.pos] as char),
        });
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Vec<String>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<MPoly, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let t = self.unary()?;
                    acc = &acc * &t;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let t = self.unary()?;
                    match t.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                        Some(_) => {
                            return Err(PolyError::Syntax {
                                pos: at,
                                msg: "division by zero".into(),
                            })
                        }
                        None => {
                            return Err(PolyError::Syntax {
                                pos: at,
                                msg: "division by a non-constant".into(),
                            })
                        }
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<MPoly, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.syntax("expected non-negative integer exponent"));
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let k: u32 = s.parse().map_err(|_| PolyError::Syntax {
                pos: start,
                msg: "exponent too large".into(),
            })?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly, PolyError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = s.parse().unwrap();
                Ok(MPoly::constant(Rational::from_integer(n), &self.vars))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if !self.vars.iter().any(|v| v == name) {
                    return Err(PolyError::UnknownVariable {
                        name: name.to_string(),
                        pos: start,
                    });
                }
                Ok(MPoly::var(name, &self.vars))
            }
            Some(c) => Err(self.syntax(format!("unexpected character '{}'", c as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XYZ: [&str; 3] = ["x", "y", "z"];

    #[test]
    fn parses_quartic_surface() {
        let f = parse_poly("z^4 - 4*x*z + 3*y^2", &XYZ).unwrap();
        assert_eq!(f.nterms(), 3);
        assert_eq!(f.to_string(), "z^4 - 4*x*z + 3*y^2");
    }

    #[test]
    fn zero_and_difference_of_squares() {
        assert!(parse_poly("0", &XYZ).unwrap().is_zero());
        let f = parse_poly("(y^3-x^2)*(y^3+x^2)", &XYZ).unwrap();
        assert_eq!(f, parse_poly("y^6 - x^4", &XYZ).unwrap());
    }

    #[test]
    fn rational_literals_and_unary_minus() {
        let f = parse_poly("-x^2 + 3/64*z", &XYZ).unwrap();
        assert_eq!(f.to_string(), "-x^2 + 3/64*z");
        let g = parse_poly("--x", &XYZ).unwrap();
        assert_eq!(g.to_string(), "x");
    }

    #[test]
    fn reports_errors_with_position() {
        match parse_poly("x + * y", &XYZ) {
            Err(PolyError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse_poly("x + w", &XYZ) {
            Err(PolyError::UnknownVariable { name, pos }) => {
                assert_eq!(name, "w");
                assert_eq!(pos, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_poly("x/y", &XYZ).is_err());
        assert!(parse_poly("x^", &XYZ).is_err());
        assert!(parse_poly("(x", &XYZ).is_err());
        assert!(parse_poly("", &XYZ).is_err());
        assert!(parse_poly("x/0", &XYZ).is_err());
    }

    #[test]
    fn print_parse_roundtrip() {
        let f = parse_poly("(x - 2*y + 1/3)^3 * (z - x/7)", &XYZ).unwrap();
        let g = parse_poly(&f.to_string(), &XYZ).unwrap();
        assert_eq!(f, g);
        assert_eq!(f.to_string(), g.to_string());
    }
}
