//! Text syntax for elements of Q(t), e.g. `(2*t^2 - 1)/(3*t + 2)` or
//! `1/2*t`. Accepts integer literals, the generator `t`, parentheses,
//! `+ - * /`, unary minus and integer exponents `^k` (`^-k` inverts).

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::field::FieldElement;
use crate::error::{Error, Result};

impl FromStr for FieldElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_field_element(s)
    }
}

pub fn parse_field_element(input: &str) -> Result<FieldElement> {
    let mut parser = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    parser.skip_ws();
    if parser.at_end() {
        return Err(parser.error("empty expression"));
    }
    let value = parser.expr()?;
    parser.skip_ws();
    if !parser.at_end() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    /// Re-tags an arithmetic failure with the current position.
    fn at<T>(&self, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Parse { .. } => e,
            other => self.error(&other.to_string()),
        })
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.at(acc.checked_add(&rhs))?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.at(acc.checked_sub(&rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.at(acc.checked_mul(&rhs))?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let start = self.pos;
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        self.pos = start;
                        return Err(self.error("division by zero"));
                    }
                    acc = self.at(acc.checked_div(&rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<FieldElement> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        let digits = self.digits();
        let exp: i32 = digits
            .parse()
            .map_err(|_| self.error_at(start, "expected an integer exponent"))?;
        let exp = if negative { -exp } else { exp };
        self.at(base.powi(exp))
    }

    fn error_at(&self, pos: usize, message: &str) -> Error {
        Error::Parse {
            column: pos + 1,
            message: message.to_string(),
        }
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn atom(&mut self) -> Result<FieldElement> {
        self.skip_ws();
        match self.peek() {
            Some(b't') => {
                self.pos += 1;
                Ok(FieldElement::t())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits().to_string();
                let n: BigInt = digits.parse().expect("ascii digits");
                Ok(FieldElement::constant(BigRational::from_integer(n)))
            }
            Some(_) => Err(self.error("expected a number, 't' or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::poly::Poly;

    #[test]
    fn parses_sample_literal() {
        let x: FieldElement = "(2*t^2 - 1)/(3*t + 2)".parse().unwrap();
        let expected =
            FieldElement::new(Poly::from_i64(&[-1, 0, 2]), Poly::from_i64(&[2, 3])).unwrap();
        assert_eq!(x, expected);
        assert_eq!(x.to_string(), "(2/3*t^2 - 1/3)/(t + 2/3)");
    }

    #[test]
    fn rational_coefficients() {
        let x: FieldElement = "1/2*t - 3/4".parse().unwrap();
        assert_eq!(x.to_string(), "1/2*t - 3/4");
    }

    #[test]
    fn negative_exponent() {
        let x: FieldElement = "t^-2".parse().unwrap();
        assert_eq!(x.to_string(), "(1)/(t^2)");
    }

    #[test]
    fn errors_carry_columns() {
        match "t + * 2".parse::<FieldElement>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
        match "(t + 1".parse::<FieldElement>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 7),
            other => panic!("unexpected {other:?}"),
        }
        match "1/(t - t)".parse::<FieldElement>() {
            Err(Error::Parse { column, message }) => {
                assert_eq!(column, 3);
                assert!(message.contains("division by zero"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!("".parse::<FieldElement>().is_err());
        assert!("t t".parse::<FieldElement>().is_err());
    }
}
