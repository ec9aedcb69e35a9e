//! Exact scalars and the coefficient abstraction shared by exact, floating
//! point and polynomial computations.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. `BigRational` keeps the denominator positive and
/// the fraction reduced.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(s: &Scalar) -> f64 {
    s.to_f64().unwrap_or(f64::NAN)
}

/// Parses `7`, `-3/4` or a terminating decimal such as `0.125`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    let bad = || Error::Parse(format!("invalid number `{t}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{t}`")));
        }
        return Ok(Scalar::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let w: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().map_err(|_| bad())?
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Scalar::new(w * &den + f, den);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Scalar::from_integer(n))
}

/// Formats a scalar as `n` or `n/d`.
pub fn fmt_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// A structure constant carried both exactly and as a double, so floating
/// point evaluation does not convert big rationals in inner loops.
#[derive(Clone, Debug, PartialEq)]
pub struct Constant {
    pub exact: Scalar,
    pub approx: f64,
}

impl Constant {
    pub fn new(exact: Scalar) -> Self {
        let approx = to_f64(&exact);
        Self { exact, approx }
    }
}

/// Ring of coefficients for Lie-algebra computations. Only ring operations
/// and multiplication by rational constants are needed, which is what lets
/// the same BCH and adjoint code run over exact rationals, doubles and
/// polynomials.
pub trait Coeff: Clone + Send + Sync + fmt::Debug {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn vanishes(&self) -> bool;
    fn from_scalar(s: &Scalar) -> Self;
    fn from_constant(c: &Constant) -> Self {
        Self::from_scalar(&c.exact)
    }
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.add_assign_ref(&p);
    }

    fn scale(&self, s: &Scalar) -> Self {
        self.mul_ref(&Self::from_scalar(s))
    }
}

impl Coeff for Scalar {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.clone()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        if !Zero::is_zero(a) && !Zero::is_zero(b) {
            *self += a * b;
        }
    }
}

impl Coeff for f64 {
    fn zero_value() -> Self {
        0.0
    }
    fn one_value() -> Self {
        1.0
    }
    fn vanishes(&self) -> bool {
        *self == 0.0
    }
    fn from_scalar(s: &Scalar) -> Self {
        to_f64(s)
    }
    fn from_constant(c: &Constant) -> Self {
        c.approx
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= *other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

/// Sparse monomial: sorted `(variable, exponent)` pairs with positive exponents.
pub type Monomial = Vec<(u32, u32)>;

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Multivariate polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&c) {
            terms.insert(Vec::new(), c);
        }
        Self { terms }
    }

    pub fn var(index: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(index, 1)], <Scalar as One>::one());
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, monomial: &Monomial) -> Scalar {
        self.terms.get(monomial).cloned().unwrap_or_else(Zero::zero)
    }

    /// Coefficient of `var^power` in a univariate reading of the polynomial.
    pub fn coefficient_of_power(&self, var: u32, power: u32) -> Scalar {
        if power == 0 {
            return self.coefficient(&Vec::new());
        }
        self.coefficient(&vec![(var, power)])
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut acc: Scalar = Zero::zero();
        for (mono, c) in &self.terms {
            let mut term = c.clone();
            for &(v, e) in mono {
                term *= num_traits::pow(point[v as usize].clone(), e as usize);
            }
            acc += term;
        }
        acc
    }

    fn add_term(&mut self, mono: Monomial, c: Scalar) {
        if Zero::is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if Zero::is_zero(o.get()) {
                    o.remove();
                }
            }
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let unit = mag.is_one() && !mono.is_empty();
            if !unit {
                write!(f, "{}", fmt_scalar(&mag))?;
            }
            for (n, &(v, e)) in mono.iter().enumerate() {
                if n > 0 || !unit {
                    write!(f, "*")?;
                }
                if e == 1 {
                    write!(f, "x{}", v + 1)?;
                } else {
                    write!(f, "x{}^{}", v + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

impl Coeff for Polynomial {
    fn zero_value() -> Self {
        Self::default()
    }
    fn one_value() -> Self {
        Self::constant(One::one())
    }
    fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_scalar(s: &Scalar) -> Self {
        Self::constant(s.clone())
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c);
        }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mul_monomials(ma, mb), ca * cb);
            }
        }
        out
    }
    fn neg_ref(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
    fn scale(&self, s: &Scalar) -> Self {
        if Zero::is_zero(s) {
            return Self::default();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_fractions_and_decimals() {
        assert_eq!(parse_scalar("7").unwrap(), int(7));
        assert_eq!(parse_scalar(" -3/4 ").unwrap(), rat(-3, 4));
        assert_eq!(parse_scalar("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_scalar("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_scalar("-.5").unwrap(), rat(-1, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("1.").is_err());
    }

    #[test]
    fn rationals_are_normalized() {
        let r = rat(4, -6);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
        assert_eq!(fmt_scalar(&r), "-2/3");
        assert_eq!(fmt_scalar(&int(5)), "5");
    }

    #[test]
    fn polynomial_ring_operations() {
        let x = Polynomial::var(0);
        let y = Polynomial::var(1);
        let mut s = x.clone();
        s.add_assign_ref(&y);
        let sq = s.mul_ref(&s);
        // (x + y)^2 = x^2 + 2xy + y^2
        assert_eq!(sq.coefficient(&vec![(0, 2)]), int(1));
        assert_eq!(sq.coefficient(&vec![(0, 1), (1, 1)]), int(2));
        assert_eq!(sq.eval(&[int(2), int(3)]), int(25));
        let mut d = sq.clone();
        d.sub_assign_ref(&sq);
        assert!(d.vanishes());
        assert_eq!(sq.total_degree(), 2);
    }
}
