//! Exact arithmetic in a single quadratic field ℚ(√d).
//!
//! Every geometric decision in the crate (which piece contains a point, which
//! color class a point falls in, whether an interval straddles a
//! discontinuity) goes through [`ExactScalar::try_cmp`], which never touches
//! floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("radicand {0} is not squarefree")]
    NonSquarefreeRadicand(u32),
    #[error("field mismatch: sqrt({left}) vs sqrt({right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("value {0} outside [-1, 2)")]
    OutOfExpectedRange(String),
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
}

/// Returns true when `d` has no square factor other than 1. `0` and `1` are
/// accepted as the degenerate (purely rational) contexts.
pub fn is_squarefree(d: u32) -> bool {
    let d = u64::from(d);
    let mut i = 2u64;
    while i * i <= d {
        if d % (i * i) == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// An element `a + b·√d` of ℚ(√d) in canonical form.
///
/// `a` and `b` are reduced fractions with positive denominators. When `d` is
/// 0 or 1 the radical part is folded into `a`, so `b` is always zero there.
/// Zero keeps its `d`, so field checks stay uniform.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
    d: u32,
}

impl ExactScalar {
    /// Builds `a_num/a_den + (b_num/b_den)·√d`.
    pub fn new(
        a_num: impl Into<BigInt>,
        a_den: impl Into<BigInt>,
        b_num: impl Into<BigInt>,
        b_den: impl Into<BigInt>,
        d: u32,
    ) -> Result<Self, ScalarError> {
        let (a_num, a_den, b_num, b_den) = (a_num.into(), a_den.into(), b_num.into(), b_den.into());
        if a_den.is_zero() || b_den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        if !is_squarefree(d) {
            return Err(ScalarError::NonSquarefreeRadicand(d));
        }
        Ok(Self::from_parts(
            BigRational::new(a_num, a_den),
            BigRational::new(b_num, b_den),
            d,
        ))
    }

    /// Assumes `d` has already been checked for squarefreeness.
    pub(crate) fn from_parts(a: BigRational, b: BigRational, d: u32) -> Self {
        match d {
            0 => Self { a, b: BigRational::zero(), d },
            1 => Self { a: a + b, b: BigRational::zero(), d },
            _ => Self { a, b, d },
        }
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>, d: u32) -> Result<Self, ScalarError> {
        Self::new(num, den, 0, 1, d)
    }

    pub fn from_integer(n: i64, d: u32) -> Result<Self, ScalarError> {
        Self::new(n, 1, 0, 1, d)
    }

    pub fn zero(d: u32) -> Result<Self, ScalarError> {
        Self::from_integer(0, d)
    }

    pub fn one(d: u32) -> Result<Self, ScalarError> {
        Self::from_integer(1, d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.b
    }

    pub fn field(&self) -> u32 {
        self.d
    }

    pub fn a_num(&self) -> &BigInt {
        self.a.numer()
    }

    pub fn a_den(&self) -> &BigInt {
        self.a.denom()
    }

    pub fn b_num(&self) -> &BigInt {
        self.b.numer()
    }

    pub fn b_den(&self) -> &BigInt {
        self.b.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn check_field(&self, other: &Self) -> Result<(), ScalarError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch { left: self.d, right: other.d })
        }
    }

    /// Sign of `a + b√d`. When the parts disagree in sign, compares `a²`
    /// against `b²·d`.
    pub fn signum(&self) -> Ordering {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
                match a2.cmp(&b2d) {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                }
            }
        }
    }

    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, ScalarError> {
        self.check_field(other)?;
        Ok(quick_cmp(self, other).unwrap_or_else(|| exact_cmp(self, other)))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check_field(other)?;
        Ok(Self { a: &self.a + &other.a, b: &self.b + &other.b, d: self.d })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check_field(other)?;
        Ok(Self { a: &self.a - &other.a, b: &self.b - &other.b, d: self.d })
    }

    /// `(a₁a₂ + b₁b₂d) + (a₁b₂ + a₂b₁)√d`
    pub fn try_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check_field(other)?;
        let d = BigRational::from_integer(BigInt::from(self.d));
        let a = &self.a * &other.a + &self.b * &other.b * d;
        let b = &self.a * &other.b + &other.a * &self.b;
        Ok(Self { a, b, d: self.d })
    }

    /// Multiplies by a rational constant; stays inside the ring.
    pub fn scale(&self, factor: &BigRational) -> Self {
        Self { a: &self.a * factor, b: &self.b * factor, d: self.d }
    }

    /// Reduces a single translation step's output into `[0, 1)`.
    pub fn mod1(&self) -> Result<Self, ScalarError> {
        let one = Self::one(self.d)?;
        let minus_one = -&one;
        let two = &one + &one;
        if *self < minus_one || *self >= two {
            return Err(ScalarError::OutOfExpectedRange(self.to_string()));
        }
        let zero = Self::zero(self.d)?;
        Ok(if *self < zero {
            self + &one
        } else if *self >= one {
            self - &one
        } else {
            self.clone()
        })
    }

    /// Parses the textual form `rat | rat (+|-) rat "*sqrt(" uint ")"` in
    /// field context `d`. A bare rational is placed into `d`; a radical with
    /// any other radicand is a field mismatch.
    pub fn parse(text: &str, d: u32) -> Result<Self, ScalarError> {
        if !is_squarefree(d) {
            return Err(ScalarError::NonSquarefreeRadicand(d));
        }
        Parser { src: text.as_bytes(), pos: 0 }.scalar(d)
    }
}

fn exact_cmp(x: &ExactScalar, y: &ExactScalar) -> Ordering {
    if x.b == y.b {
        return x.a.cmp(&y.a);
    }
    ExactScalar::from_parts(&x.a - &y.a, &x.b - &y.b, x.d).signum()
}

fn small(q: &BigRational) -> Option<(i128, i128)> {
    Some((q.numer().to_i64()?.into(), q.denom().to_i64()?.into()))
}

/// Order of two same-field scalars whose parts all fit in `i64`, computed
/// in machine integers; `None` when an intermediate would overflow.
///
/// The difference is `(X + Y√d) / (Ad·Bd)` with `X = An·Bd`, `Y = Bn·Ad`
/// and positive denominators. Opposite signs are settled by comparing
/// `X²` with `d·Y²`.
fn quick_cmp(x: &ExactScalar, y: &ExactScalar) -> Option<Ordering> {
    let (p1, q1) = small(&x.a)?;
    let (p2, q2) = small(&y.a)?;
    let an = p1 * q2 - p2 * q1;
    if x.b.is_zero() && y.b.is_zero() {
        return Some(an.cmp(&0));
    }
    let (r1, s1) = small(&x.b)?;
    let (r2, s2) = small(&y.b)?;
    let bn = r1 * s2 - r2 * s1;
    let (sa, sb) = (an.cmp(&0), bn.cmp(&0));
    match (sa, sb) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => return Some(s),
        (a, b) if a == b => return Some(a),
        _ => {}
    }
    let xx = an.checked_mul(s1.checked_mul(s2)?)?.unsigned_abs();
    let yy = bn.checked_mul(q1.checked_mul(q2)?)?.unsigned_abs();
    let x2 = xx.checked_mul(xx)?;
    let y2d = yy.checked_mul(yy)?.checked_mul(u128::from(x.d))?;
    Some(match x2.cmp(&y2d) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater => sa,
        Ordering::Less => sb,
    })
}

fn sign_of(q: &BigRational) -> Ordering {
    if q.is_positive() {
        Ordering::Greater
    } else if q.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// # Panics
///
/// Comparing scalars from different field contexts panics; use
/// [`ExactScalar::try_cmp`] when the contexts are not already known to agree.
impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("comparison across field contexts")
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                self.$checked(rhs).expect("arithmetic across field contexts")
            }
        }

        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { a: -&self.a, b: -&self.b, d: self.d }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

fn write_rat(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rat(f, &self.a)?;
        if !self.b.is_zero() {
            f.write_str(if self.b.is_negative() { "-" } else { "+" })?;
            write_rat(f, &self.b.abs())?;
            write!(f, "*sqrt({})", self.d)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [d={}]", self.d)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> ScalarError {
        ScalarError::Syntax { position: self.pos, message: message.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_str(&mut self, s: &str) -> Result<(), ScalarError> {
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn uint(&mut self) -> Result<BigInt, ScalarError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit run parses"))
    }

    fn rat(&mut self, allow_sign: bool) -> Result<BigRational, ScalarError> {
        let negative = allow_sign && self.eat(b'-');
        let num = self.uint()?;
        let den = if self.eat(b'/') {
            let at = self.pos;
            let den = self.uint()?;
            if den.is_zero() {
                self.pos = at;
                return Err(ScalarError::ZeroDenominator);
            }
            den
        } else {
            BigInt::one()
        };
        let q = BigRational::new(num, den);
        Ok(if negative { -q } else { q })
    }

    fn scalar(mut self, d: u32) -> Result<ExactScalar, ScalarError> {
        let a = self.rat(true)?;
        let b = match self.peek() {
            None => BigRational::zero(),
            Some(sign @ (b'+' | b'-')) => {
                self.pos += 1;
                let b = self.rat(true)?;
                self.expect_str("*sqrt(")?;
                let at = self.pos;
                let radicand = self.uint()?;
                let radicand: u32 = radicand.try_into().map_err(|_| ScalarError::Syntax {
                    position: at,
                    message: "radicand too large".into(),
                })?;
                self.expect_str(")")?;
                if !is_squarefree(radicand) {
                    return Err(ScalarError::NonSquarefreeRadicand(radicand));
                }
                if radicand != d {
                    return Err(ScalarError::FieldMismatch { left: radicand, right: d });
                }
                if sign == b'-' {
                    -b
                } else {
                    b
                }
            }
            Some(_) => return Err(self.err("unexpected character")),
        };
        if self.pos != self.src.len() {
            return Err(self.err("trailing input"));
        }
        Ok(ExactScalar::from_parts(a, b, d))
    }
}

#[cfg(test)]
pub(crate) mod decimal_oracle {
    //! Fixed-point decimal evaluation, independent of the exact comparison
    //! path: the value is truncated to 60 decimal places using an integer
    //! square root.

    use super::ExactScalar;
    use num_bigint::BigInt;
    use std::cmp::Ordering;

    const DIGITS: u32 = 60;

    pub fn scaled(x: &ExactScalar) -> BigInt {
        let scale = BigInt::from(10).pow(DIGITS);
        let sqrt_d = (BigInt::from(x.field()) * &scale * &scale).sqrt();
        let a = num_integer::Integer::div_floor(&(x.a_num() * &scale), x.a_den());
        let b = num_integer::Integer::div_floor(&(x.b_num() * sqrt_d), x.b_den());
        a + b
    }

    /// Agrees with the exact order whenever the values differ by more than
    /// 10^-50; closer values are reported equal.
    pub fn cmp(x: &ExactScalar, y: &ExactScalar) -> Ordering {
        let diff = scaled(x) - scaled(y);
        let slack = BigInt::from(10).pow(DIGITS - 50);
        if diff > slack {
            Ordering::Greater
        } else if diff < -slack {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}
