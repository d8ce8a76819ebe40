//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are `z1, …, zd` and are stored 0-based. Terms are kept in a
//! `BTreeMap` keyed by [`MultiIndex`], whose ordering is graded
//! lexicographic with `z1 > z2 > …`. Printing goes from the largest term down.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, to_f64, ExactComplex, Rational};

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise minimum (the exponent of the monomial gcd).
    pub fn gcd(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Point in `C^d` with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPoint {
    pub coords: Vec<ExactComplex>,
}

impl EvalPoint {
    pub fn new(coords: Vec<ExactComplex>) -> Self {
        EvalPoint { coords }
    }

    pub fn real(coords: &[Rational]) -> Self {
        EvalPoint { coords: coords.iter().cloned().map(ExactComplex::real).collect() }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary arithmetic.
pub fn poly_arith(a: &Poly, b: &Poly, op: ArithOp) -> Result<Poly> {
    if a.nvars != b.nvars {
        return Err(Error::NvarsMismatch { left: a.nvars, right: b.nvars });
    }
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    })
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(MultiIndex::zero(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    /// The variable `z_{k+1}` (0-based `k`).
    pub fn var(nvars: usize, k: usize) -> Self {
        Poly::monomial(MultiIndex::unit(nvars, k), Rational::one())
    }

    pub fn monomial(m: MultiIndex, c: Rational) -> Self {
        let mut p = Poly::zero(m.len());
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial length does not match nvars");
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c·z^m`, dropping the term if it cancels.
    pub fn add_term(&mut self, m: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(MultiIndex::degree)
    }

    /// Degree in the 0-based variable `k`, `None` for the zero polynomial.
    pub fn degree_in(&self, k: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[k]).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(MultiIndex::degree)
    }

    pub fn min_degree_in(&self, k: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[k]).min()
    }

    pub fn leading(&self) -> Option<(&MultiIndex, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Re-embeds into a ring with more variables.
    pub fn with_nvars(&self, nvars: usize) -> Poly {
        assert!(nvars >= self.nvars, "cannot drop variables");
        let mut p = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.resize(nvars, 0);
            p.terms.insert(MultiIndex(e), c.clone());
        }
        p
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `c·z^m`.
    pub fn mul_monomial(&self, m: &MultiIndex, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.add(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Derivative in the 0-based variable `k`.
    pub fn derivative(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[k] -= 1;
            out.add_term(dm, c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Formal partial derivative in `z_j`, 1-based.
    pub fn partial_derivative(&self, j: usize) -> Result<Poly> {
        self.check_var(j)?;
        Ok(self.derivative(j - 1))
    }

    /// `n`-th derivative in the 0-based variable `k`.
    pub fn nth_derivative(&self, k: usize, n: u32) -> Poly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative(k);
        }
        p
    }

    fn check_var(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.nvars {
            Err(Error::VariableOutOfRange { index: j, nvars: self.nvars })
        } else {
            Ok(())
        }
    }

    pub fn evaluate(&self, z: &EvalPoint) -> Result<ExactComplex> {
        if z.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, found: z.len() });
        }
        let mut acc = ExactComplex::zero();
        for (m, c) in &self.terms {
            let mut t = ExactComplex::real(c.clone());
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &z.coords[k].pow(e);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Evaluation at a real rational point. Panics on length mismatch.
    pub fn eval_rational(&self, z: &[Rational]) -> Rational {
        assert_eq!(z.len(), self.nvars);
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(z[k].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .enumerate()
                    .fold(to_f64(c), |t, (k, &e)| t * z[k].powi(e as i32))
            })
            .sum()
    }

    pub fn eval_c64(&self, z: &[num_complex::Complex64]) -> num_complex::Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .enumerate()
                    .fold(num_complex::Complex64::new(to_f64(c), 0.0), |t, (k, &e)| {
                        t * z[k].powi(e as i32)
                    })
            })
            .sum()
    }

    /// Largest absolute coefficient as a float.
    pub fn coeff_scale(&self) -> f64 {
        self.terms.values().map(|c| to_f64(&c.abs())).fold(0.0, f64::max)
    }

    /// Exact quotient `self / d` when `d` divides `self`, else `None`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.leading() {
            let qm = m.checked_sub(&lm)?;
            let qc = c / &lc;
            rem = &rem - &d.mul_monomial(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Substitutes `z_k := values[k]` for every variable, producing a
    /// polynomial in `target_nvars` variables.
    pub fn compose(&self, values: &[Poly], target_nvars: usize) -> Poly {
        assert_eq!(values.len(), self.nvars);
        let mut out = Poly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target_nvars, c.clone());
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &values[k].pow(e);
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn parse(src: &str) -> Result<Poly> {
        crate::parse::parse_poly(src, None)
    }

    /// Parses with an explicit variable count; indices above it are errors.
    pub fn parse_with_nvars(src: &str, nvars: usize) -> Result<Poly> {
        crate::parse::parse_poly(src, Some(nvars))
    }
}

fn merge(a: &Poly, b: &Poly, sign: bool) -> Poly {
    assert_eq!(a.nvars, b.nvars, "variable count mismatch");
    let mut out = a.clone();
    for (m, c) in &b.terms {
        out.add_term(m.clone(), if sign { c.clone() } else { -c.clone() });
    }
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        merge(self, o, true)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        merge(self, o, false)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.add(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

/// `W_j[q,p] = q·∂p/∂z_j − p·∂q/∂z_j`, `j` 1-based.
pub fn wronskian(q: &Poly, p: &Poly, j: usize) -> Result<Poly> {
    if q.nvars != p.nvars {
        return Err(Error::NvarsMismatch { left: q.nvars, right: p.nvars });
    }
    q.check_var(j)?;
    Ok(&(q * &p.derivative(j - 1)) - &(p * &q.derivative(j - 1)))
}

pub(crate) fn write_monomial(f: &mut impl fmt::Write, m: &MultiIndex, names: &dyn Fn(usize) -> String) -> fmt::Result {
    let mut first = true;
    for (k, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        f.write_str(&names(k))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Text form of a monomial, e.g. `z1^2*z3`, or `1` for the empty one.
pub fn monomial_string(m: &MultiIndex) -> String {
    if m.degree() == 0 {
        return "1".into();
    }
    let mut s = String::new();
    write_monomial(&mut s, m, &|k| format!("z{}", k + 1)).unwrap();
    s
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.degree() == 0 {
                f.write_str(&format_rational(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", format_rational(&a))?;
                }
                f.write_str(&monomial_string(m))?;
            }
        }
        Ok(())
    }
}

/// `p/q` with `q ≢ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial("denominator"));
        }
        if num.nvars() != den.nvars() {
            return Err(Error::NvarsMismatch { left: num.nvars(), right: den.nvars() });
        }
        Ok(RationalFunction { num, den })
    }

    /// Parses numerator and denominator with a shared variable count.
    pub fn parse(num: &str, den: &str) -> Result<Self> {
        let (p, q) = crate::parse::parse_pair(num, den)?;
        RationalFunction::new(p, q)
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    /// `None` at a pole.
    pub fn evaluate(&self, z: &EvalPoint) -> Result<Option<ExactComplex>> {
        let d = self.den.evaluate(z)?;
        let n = self.num.evaluate(z)?;
        Ok(n.checked_div(&d))
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn p(s: &str) -> Poly {
        Poly::parse_with_nvars(s, 2).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = p("z1 + z2");
        let b = p("z1 - z2");
        assert_eq!((&a * &b).to_string(), "z1^2 - z2^2");
    }

    #[test]
    fn additive_identity_and_cancellation() {
        let a = p("3*z1^2*z2 - 1");
        assert_eq!(&a + &Poly::zero(2), a);
        let c = &p("z1*z2") - &p("z1*z2");
        assert!(c.is_zero());
        assert_eq!(c.nvars(), 2);
        assert_eq!(c.degree(), None);
    }

    #[test]
    fn mismatched_nvars_is_an_error() {
        let a = Poly::parse_with_nvars("z1", 1).unwrap();
        let b = p("z1");
        assert!(matches!(poly_arith(&a, &b, ArithOp::Add), Err(Error::NvarsMismatch { .. })));
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("z1^2*z2").partial_derivative(1).unwrap(), p("2*z1*z2"));
        assert_eq!(p("z1 + z2").partial_derivative(2).unwrap(), p("1"));
        assert!(p("7/3").partial_derivative(1).unwrap().is_zero());
        assert!(p("z1").partial_derivative(3).is_err());
        assert!(p("z1").partial_derivative(0).is_err());
    }

    #[test]
    fn wronskian_examples() {
        let w = wronskian(&p("z1 + z2"), &p("z1*z2"), 1).unwrap();
        assert_eq!(w.to_string(), "z2^2");
        let z = Poly::parse_with_nvars("z1", 1).unwrap();
        let m1 = Poly::parse_with_nvars("-1", 1).unwrap();
        assert_eq!(wronskian(&z, &m1, 1).unwrap().to_string(), "1");
        let q = p("z1^3 - 2*z2");
        assert!(wronskian(&q, &q, 2).unwrap().is_zero());
    }

    #[test]
    fn evaluation() {
        let one_var = Poly::parse_with_nvars("z1^2 + 1", 1).unwrap();
        let at_i = one_var.evaluate(&EvalPoint::new(vec![ExactComplex::i()])).unwrap();
        assert!(at_i.is_zero());
        let five = Poly::constant(2, int(5));
        let pt = EvalPoint::real(&[int(3), frac(-1, 7)]);
        assert_eq!(five.evaluate(&pt).unwrap(), ExactComplex::real(int(5)));
        let xy = p("z1*z2").evaluate(&EvalPoint::real(&[int(2), frac(3, 2)])).unwrap();
        assert_eq!(xy, ExactComplex::real(int(3)));
        assert!(p("z1").evaluate(&EvalPoint::real(&[int(1)])).is_err());
    }

    #[test]
    fn exact_division() {
        let a = p("z1 + z2");
        let b = p("z1^2 - 3*z2 + 1");
        assert_eq!((&a * &b).div_exact(&a), Some(b.clone()));
        assert_eq!(p("z1^2 + 1").div_exact(&p("z1 + 1")), None);
    }

    #[test]
    fn grlex_order() {
        let z1 = MultiIndex(vec![1, 0]);
        let z2 = MultiIndex(vec![0, 1]);
        let one = MultiIndex(vec![0, 0]);
        let z1z2 = MultiIndex(vec![1, 1]);
        assert!(z1 > z2 && z2 > one && z1z2 > z1);
        assert!(MultiIndex(vec![0, 2]) < z1z2);
    }

    #[test]
    fn printing() {
        assert_eq!(p("1 + z1*z2").to_string(), "z1*z2 + 1");
        assert_eq!(p("-3/2*z1^2*z2").to_string(), "-3/2*z1^2*z2");
        assert_eq!(p("-z2 - z1").to_string(), "-z1 - z2");
        assert_eq!(Poly::zero(2).to_string(), "0");
    }
}
