//! Exact scalars: arbitrary-precision rationals and the field `F = Q(α)` of
//! rational functions in a single formal parameter `α`.
//!
//! Every algebraic object in this crate is generic over [`Coeff`], which is
//! implemented by [`BigRational`] (the parameter specialized to a number)
//! and by [`RatFn`] (the parameter kept symbolic).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use num_traits::{One, Zero};
use num_traits::Signed;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational function has a pole at {0}")]
    PoleAtPoint(BigRational),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

/// The coefficient field used throughout the crate.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_rational(q: BigRational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError>;

    fn inv(&self) -> Result<Self, ExactError> {
        Self::one().checked_div(self)
    }

    /// Integer power; negative exponents invert.
    fn powi(&self, e: i64) -> Result<Self, ExactError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc * &base;
        }
        Ok(acc)
    }

    /// Parses the text produced by `Display`.
    fn parse_text(s: &str) -> Result<Self, ExactError>;
}

impl Coeff for BigRational {
    fn from_rational(q: BigRational) -> Self {
        q
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(self / rhs)
    }

    fn parse_text(s: &str) -> Result<Self, ExactError> {
        parse_rational(s)
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let err = |reason: &str| ExactError::Parse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| err("bad numerator"))?;
    let d = BigInt::from_str(d).map_err(|_| err("bad denominator"))?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// Dense univariate polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
struct Poly(Vec<BigRational>);

impl Poly {
    fn zero() -> Self {
        Poly(Vec::new())
    }

    fn constant(c: BigRational) -> Self {
        Poly(vec![c]).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lc(&self) -> &BigRational {
        self.0.last().expect("leading coefficient of zero polynomial")
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.0.get(i), other.0.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(c);
        }
        Poly(out).trimmed()
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|a| a * c).collect())
    }

    fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.0.clone();
        if rem.len() < d.0.len() {
            return (Poly::zero(), self.clone());
        }
        let dl = d.0.len();
        let lc_inv = d.lc().recip();
        let mut quo = vec![BigRational::zero(); rem.len() - dl + 1];
        for k in (0..quo.len()).rev() {
            let c = &rem[k + dl - 1] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                rem[k + j] -= &c * dj;
            }
            quo[k] = c;
        }
        rem.truncate(dl - 1);
        (Poly(quo).trimmed(), Poly(rem).trimmed())
    }

    fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn write_text(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write_power(f, k)?,
                (_, false) => {
                    write!(f, "{mag}*")?;
                    write_power(f, k)?;
                }
            }
        }
        Ok(())
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, k: usize) -> fmt::Result {
    if k == 1 {
        f.write_str("a")
    } else {
        write!(f, "a^{k}")
    }
}

/// An element of `Q(α)` in canonical form: numerator and denominator are
/// coprime and the denominator is monic.
///
/// The text form writes `α` as `a`, e.g. `(1/2 - a + 1/2*a^2)/(a)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    /// The formal parameter `α`.
    pub fn alpha() -> Self {
        RatFn {
            num: Poly(vec![BigRational::zero(), BigRational::one()]),
            den: Poly::constant(BigRational::one()),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        RatFn {
            num: Poly::constant(c),
            den: Poly::constant(BigRational::one()),
        }
    }

    /// Builds `num/den` from coefficient lists (lowest degree first).
    pub fn from_coeffs(num: Vec<BigRational>, den: Vec<BigRational>) -> Result<Self, ExactError> {
        Self::from_polys(Poly(num).trimmed(), Poly(den).trimmed())
    }

    fn from_polys(num: Poly, den: Poly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFn::zero());
        }
        let (num, den) = if den.degree() == 0 || num.degree() == 0 {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.degree() == 0 {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let lc = den.lc().clone();
        if lc.is_one() {
            Ok(RatFn { num, den })
        } else {
            let inv = lc.recip();
            Ok(RatFn {
                num: num.scale(&inv),
                den: den.scale(&inv),
            })
        }
    }

    pub fn numerator(&self) -> &[BigRational] {
        &self.num.0
    }

    pub fn denominator(&self) -> &[BigRational] {
        &self.den.0
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// Returns the rational constant when `self` does not depend on `α`.
    pub fn as_constant(&self) -> Option<BigRational> {
        (self.num.degree() == 0 && self.den.degree() == 0).then(|| {
            self.num.0.first().cloned().unwrap_or_else(BigRational::zero)
        })
    }

    /// Evaluates at `α = x`.
    pub fn eval(&self, x: &BigRational) -> Result<BigRational, ExactError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(ExactError::PoleAtPoint(x.clone()));
        }
        Ok(self.num.eval(x) / d)
    }

    fn add_ref(&self, other: &RatFn) -> RatFn {
        if self.den == other.den {
            return RatFn::from_polys(self.num.add(&other.num), self.den.clone())
                .expect("nonzero denominator");
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        RatFn::from_polys(num, self.den.mul(&other.den)).expect("nonzero denominator")
    }

    fn mul_ref(&self, other: &RatFn) -> RatFn {
        if self.is_zero() || other.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFn {
                num: self.num.mul(&other.num),
                den: self.den.clone(),
            };
        }
        RatFn::from_polys(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    fn neg_ref(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Zero for RatFn {
    fn zero() -> Self {
        RatFn {
            num: Poly::zero(),
            den: Poly::constant(BigRational::one()),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFn {
    fn one() -> Self {
        RatFn::constant(BigRational::one())
    }
}

impl From<BigRational> for RatFn {
    fn from(q: BigRational) -> Self {
        RatFn::constant(q)
    }
}

impl From<i64> for RatFn {
    fn from(n: i64) -> Self {
        RatFn::constant(int(n))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<RatFn> for RatFn {
            type Output = RatFn;
            fn $m(self, rhs: RatFn) -> RatFn {
                self.$imp(&rhs)
            }
        }
        impl<'a> $tr<&'a RatFn> for RatFn {
            type Output = RatFn;
            fn $m(self, rhs: &'a RatFn) -> RatFn {
                self.$imp(rhs)
            }
        }
        impl<'a> $tr<RatFn> for &'a RatFn {
            type Output = RatFn;
            fn $m(self, rhs: RatFn) -> RatFn {
                self.$imp(&rhs)
            }
        }
        impl<'a, 'b> $tr<&'b RatFn> for &'a RatFn {
            type Output = RatFn;
            fn $m(self, rhs: &'b RatFn) -> RatFn {
                self.$imp(rhs)
            }
        }
    };
}

impl RatFn {
    fn sub_ref(&self, other: &RatFn) -> RatFn {
        self.add_ref(&other.neg_ref())
    }

    fn div_ref(&self, other: &RatFn) -> RatFn {
        self.checked_div(other).expect("RatFn division by zero")
    }
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        self.neg_ref()
    }
}

impl<'a> Neg for &'a RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        self.neg_ref()
    }
}

impl Coeff for RatFn {
    fn from_rational(q: BigRational) -> Self {
        RatFn::constant(q)
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(RatFn::zero());
        }
        RatFn::from_polys(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    fn parse_text(s: &str) -> Result<Self, ExactError> {
        s.parse()
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return self.num.write_text(f);
        }
        f.write_str("(")?;
        self.num.write_text(f)?;
        f.write_str(")/(")?;
        self.den.write_text(f)?;
        f.write_str(")")
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFn({self})")
    }
}

impl FromStr for RatFn {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s,
            chars: s.char_indices().peekable(),
        };
        let v = p.expr()?;
        p.skip_ws();
        if p.chars.peek().is_some() {
            return Err(p.fail("trailing input"));
        }
        Ok(v)
    }
}

/// Recursive-descent parser for rational expressions in `a` (also `α`,
/// `alpha`) with `+ - * / ^` and parentheses.
struct Parser<'s> {
    src: &'s str,
    chars: std::iter::Peekable<std::str::CharIndices<'s>>,
}

impl Parser<'_> {
    fn fail(&self, reason: &str) -> ExactError {
        ExactError::Parse {
            input: self.src.to_string(),
            reason: reason.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn expr(&mut self) -> Result<RatFn, ExactError> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.chars.next();
            let rhs = self.term()?;
            acc = if c == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFn, ExactError> {
        let mut acc = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.chars.next();
            let rhs = self.unary()?;
            acc = if c == '*' {
                acc * rhs
            } else {
                acc.checked_div(&rhs)?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFn, ExactError> {
        match self.peek() {
            Some('-') => {
                self.chars.next();
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.chars.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFn, ExactError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.chars.next();
            let neg = if self.peek() == Some('-') {
                self.chars.next();
                true
            } else {
                false
            };
            let e = self.integer()?;
            let e: i64 = e.try_into().map_err(|_| self.fail("exponent too large"))?;
            return base.powi(if neg { -e } else { e });
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, ExactError> {
        self.skip_ws();
        let mut digits = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(self.fail("expected integer"));
        }
        Ok(digits.parse().expect("ascii digits"))
    }

    fn atom(&mut self) -> Result<RatFn, ExactError> {
        match self.peek() {
            Some('(') => {
                self.chars.next();
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.fail("unbalanced parenthesis"));
                }
                self.chars.next();
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                Ok(RatFn::constant(BigRational::from_integer(self.integer()?)))
            }
            Some('a' | 'α') => {
                let mut ident = String::new();
                while let Some(&(_, c)) = self.chars.peek() {
                    if c.is_alphabetic() {
                        ident.push(c);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                match ident.as_str() {
                    "a" | "α" | "alpha" => Ok(RatFn::alpha()),
                    _ => Err(self.fail("unknown identifier")),
                }
            }
            _ => Err(self.fail("unexpected token")),
        }
    }
}
