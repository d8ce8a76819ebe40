//! Text grammar for polynomials.
//!
//! ```text
//! poly   := [sign] term (sign term)*
//! term   := factor ('*' factor)*
//! factor := int ['/' int] | 'z' K ['^' E]      K >= 1, E >= 1
//! ```
//! Whitespace is ignored. `z0` is rejected since it names the
//! homogenizing variable.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Poly};
use crate::rational::Rational;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type RawTerm = (Rational, Vec<(usize, u32)>);

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
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

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn small(&mut self, what: &str) -> Result<u32> {
        let at = self.pos;
        let d = self.digits()?;
        d.parse::<u32>().map_err(|_| Error::Parse { pos: at, msg: format!("{what} too large") })
    }

    fn factor(&mut self, coeff: &mut Rational, powers: &mut Vec<(usize, u32)>) -> Result<()> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                let at = self.pos;
                let k = self.small("variable index")?;
                if k == 0 {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "z0 is reserved for homogenization".into(),
                    });
                }
                let mut e = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let at = self.pos;
                    e = self.small("exponent")?;
                    if e == 0 {
                        return Err(Error::Parse { pos: at, msg: "exponent must be at least 1".into() });
                    }
                }
                powers.push((k as usize, e));
                Ok(())
            }
            Some(c) if c.is_ascii_digit() => {
                let n: BigInt = self.digits()?.parse().unwrap();
                let mut d = BigInt::one();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let at = self.pos;
                    d = self.digits()?.parse().unwrap();
                    if d.is_zero() {
                        return Err(Error::Parse { pos: at, msg: "zero denominator".into() });
                    }
                }
                *coeff *= Rational::new(n, d);
                Ok(())
            }
            Some(_) => self.err("expected a number or a variable zK"),
            None => self.err("unexpected end of input"),
        }
    }

    fn term(&mut self, sign: Rational) -> Result<RawTerm> {
        let mut coeff = sign;
        let mut powers = Vec::new();
        self.factor(&mut coeff, &mut powers)?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            self.factor(&mut coeff, &mut powers)?;
        }
        Ok((coeff, powers))
    }

    fn poly(&mut self) -> Result<Vec<RawTerm>> {
        let mut terms = Vec::new();
        let mut sign = Rational::one();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = -sign;
            }
            Some(b'+') => self.pos += 1,
            None => return self.err("empty polynomial"),
            _ => {}
        }
        terms.push(self.term(sign)?);
        loop {
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term(Rational::one())?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    terms.push(self.term(-Rational::one())?);
                }
                Some(_) => return self.err("expected '+' or '-'"),
            }
        }
        Ok(terms)
    }
}

fn raw_terms(src: &str) -> Result<Vec<RawTerm>> {
    Parser { src: src.as_bytes(), pos: 0 }.poly()
}

fn max_var(terms: &[RawTerm]) -> usize {
    terms.iter().flat_map(|(_, p)| p.iter().map(|(k, _)| *k)).max().unwrap_or(0)
}

fn assemble(terms: Vec<RawTerm>, nvars: usize) -> Poly {
    let mut out = Poly::zero(nvars);
    for (c, powers) in terms {
        let mut m = MultiIndex::zero(nvars);
        for (k, e) in powers {
            m.0[k - 1] += e;
        }
        out.add_term(m, c);
    }
    out
}

/// With `nvars = None` the count is the largest index used, at least 1.
pub fn parse_poly(src: &str, nvars: Option<usize>) -> Result<Poly> {
    let terms = raw_terms(src)?;
    let used = max_var(&terms);
    let n = match nvars {
        Some(n) if used > n => {
            return Err(Error::VariableOutOfRange { index: used, nvars: n });
        }
        Some(n) => n,
        None => used.max(1),
    };
    Ok(assemble(terms, n))
}

/// Parses several polynomials into a common ring.
pub fn parse_many(srcs: &[&str]) -> Result<Vec<Poly>> {
    let raws = srcs.iter().map(|s| raw_terms(s)).collect::<Result<Vec<_>>>()?;
    let n = raws.iter().map(|t| max_var(t)).max().unwrap_or(0).max(1);
    Ok(raws.into_iter().map(|t| assemble(t, n)).collect())
}

pub fn parse_pair(a: &str, b: &str) -> Result<(Poly, Poly)> {
    let mut v = parse_many(&[a, b])?;
    let b = v.pop().unwrap();
    let a = v.pop().unwrap();
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn accepts_grammar() {
        let p = parse_poly("z1*z2 + 1", None).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.nvars(), 2);
        let q = parse_poly(" -3/2 * z1^2 ", None).unwrap();
        assert_eq!(q.num_terms(), 1);
        assert_eq!(q.coeff(&MultiIndex(vec![2])), frac(-3, 2));
    }

    #[test]
    fn rejects_z0_with_position() {
        match parse_poly("z1 + z0", None) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "z1 +", "1/0", "z1^0", "z1 z2", "x1", "2/", "z"] {
            assert!(parse_poly(bad, None).is_err(), "{bad}");
        }
    }

    #[test]
    fn shared_variable_count() {
        let (p, q) = parse_pair("1", "z1*z3").unwrap();
        assert_eq!(p.nvars(), 3);
        assert_eq!(q.nvars(), 3);
        assert!(parse_poly("z3", Some(2)).is_err());
    }
}
