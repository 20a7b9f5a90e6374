use num_bigint::BigInt;

use super::{Field, Monomial, Poly};
use crate::error::{Error, Result};

/// Parse `text` as a polynomial in the variables `names`.
///
/// Grammar: sums and differences of products of powers; factors are integer
/// or `p/q` literals, identifiers, or parenthesised expressions. `^` binds
/// tightest and takes a non-negative integer exponent. Unary minus is allowed
/// at the start of any factor chain.
pub fn parse_poly(text: &str, names: &[String], field: Field) -> Result<Poly> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        names,
        field,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error("empty expression"));
    }
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
    field: Field,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
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

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
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

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected exponent"));
            }
            let e: u32 = digits.parse().map_err(|_| Error::Parse {
                pos: start,
                msg: "exponent too large".into(),
            })?;
            if base.is_zero() && e == 0 {
                return Ok(Poly::one(self.field));
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Poly> {
        let num: BigInt = self.digits().parse().expect("digit run");
        let mut den = BigInt::from(1);
        let save = self.pos;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let d = self.digits();
            if d.is_empty() {
                // division is not part of the grammar except inside literals
                self.pos = save;
                return Err(self.error("expected denominator digits after `/`"));
            }
            den = d.parse().expect("digit run");
            if den == BigInt::from(0) {
                return Err(Error::ZeroDenominator(at));
            }
        }
        match self.field.fraction(&num, &den) {
            Some(c) => Ok(Poly::constant(c)),
            None => Err(Error::ZeroDenominator(save)),
        }
    }

    fn ident(&mut self) -> Result<Poly> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_alphanumeric() || c == b'\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match self.names.iter().position(|n| n == name) {
            Some(i) => Ok(Poly::monomial(Monomial::var(i, 1), self.field.one())),
            None => Err(Error::UnknownVariable(name.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonomialOrder;

    fn ctx() -> Vec<String> {
        ["x", "y", "t", "x'"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    #[test]
    fn reads_terms() {
        let p = parse_poly("x*y - t^2", &ctx(), Field::Rational).unwrap();
        assert_eq!(p.len(), 2);
        assert!(parse_poly("0", &ctx(), Field::Rational).unwrap().is_zero());
        let q = parse_poly("-(x' + 1/2)^2", &ctx(), Field::Rational).unwrap();
        assert_eq!(
            q.to_text(&ctx(), &MonomialOrder::Grevlex),
            "-x'^2 - x' - 1/4"
        );
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(
            parse_poly("x + z", &ctx(), Field::Rational),
            Err(Error::UnknownVariable(v)) if v == "z"
        ));
        assert!(matches!(
            parse_poly("x + 1/0", &ctx(), Field::Rational),
            Err(Error::ZeroDenominator(_))
        ));
        assert!(matches!(
            parse_poly("x + * y", &ctx(), Field::Rational),
            Err(Error::Parse { pos: 4, .. })
        ));
        assert!(parse_poly("(x", &ctx(), Field::Rational).is_err());
        assert!(parse_poly("", &ctx(), Field::Rational).is_err());
    }

    #[test]
    fn prime_field_literals() {
        let f = Field::prime(7).unwrap();
        let p = parse_poly("3/2*x + 8", &ctx(), f).unwrap();
        assert_eq!(p.to_text(&ctx(), &MonomialOrder::Grevlex), "5*x + 1");
        assert!(matches!(
            parse_poly("1/7", &ctx(), f),
            Err(Error::ZeroDenominator(_))
        ));
    }
}
