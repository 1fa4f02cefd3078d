//! Scalar values shared by every engine: finite reals, exact rationals, and
//! the `Scalar` sum type that keeps rational arithmetic exact until an
//! irrational operation forces a float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational in canonical form (den > 0, gcd = 1).
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("non-finite real value {0}")]
    NonFinite(f64),
    #[error("division by zero")]
    DivisionByZero,
}

/// A finite double-precision real. Construction rejects NaN and infinities.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Real(f64);

impl Real {
    pub const ZERO: Real = Real(0.0);
    pub const ONE: Real = Real(1.0);
    pub const PI: Real = Real(std::f64::consts::PI);

    pub fn new(value: f64) -> Result<Self, NumError> {
        if value.is_finite() {
            Ok(Real(value))
        } else {
            Err(NumError::NonFinite(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Real> for f64 {
    fn from(r: Real) -> f64 {
        r.0
    }
}

impl TryFrom<f64> for Real {
    type Error = NumError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Real::new(value)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Build a rational from a small integer pair. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Correctly rounded conversion of an exact rational to `f64`.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Exact conversion of a finite `f64` to a rational.
pub fn f64_to_rat(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// A number that is either an exact rational or a finite float.
///
/// Arithmetic between two exact operands stays exact; any float operand
/// demotes the result to a float.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(Rat),
    Float(Real),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Rat::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(rat_int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(rat(num, den))
    }

    pub fn float(x: f64) -> Result<Self, NumError> {
        Real::new(x).map(Scalar::Float)
    }

    pub fn pi() -> Self {
        Scalar::Float(Real::PI)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rat_to_f64(r),
            Scalar::Float(x) => x.get(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => x.get() == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => x.get() < 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(Real(x.get().abs())),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, NumError> {
        if rhs.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a / b)),
            _ => Scalar::float(self.to_f64() / rhs.to_f64()),
        }
    }

    /// Integer power. Exact operands stay exact.
    pub fn powi(&self, exp: i64) -> Result<Scalar, NumError> {
        match self {
            Scalar::Exact(r) => {
                if exp < 0 && r.is_zero() {
                    return Err(NumError::DivisionByZero);
                }
                let e = i32::try_from(exp).map_err(|_| NumError::NonFinite(f64::INFINITY))?;
                Ok(Scalar::Exact(num_traits::pow::Pow::pow(r, e)))
            }
            Scalar::Float(x) => {
                let e = i32::try_from(exp).unwrap_or(if exp < 0 { i32::MIN } else { i32::MAX });
                Scalar::float(x.get().powi(e))
            }
        }
    }

    /// Equality used by the expression language: exact when both sides are
    /// exact, otherwise relative-or-absolute tolerance `tol`.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
            }
        }
    }
}

fn float_op(a: &Scalar, b: &Scalar, op: impl Fn(f64, f64) -> f64) -> Scalar {
    Scalar::Float(Real(op(a.to_f64(), b.to_f64())))
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => float_op(self, rhs, |x, y| x + y),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => float_op(self, rhs, |x, y| x - y),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => float_op(self, rhs, |x, y| x * y),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(x) => Scalar::Float(Real(-x.get())),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Exact comparison for exact pairs, float comparison otherwise.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::Exact(r)
    }
}

impl From<Real> for Scalar {
    fn from(r: Real) -> Self {
        Scalar::Float(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

/// `7/2` for exact values; floats use the shortest round-trip form, with
/// the float `π` spelled `pi`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) if x.get() == std::f64::consts::PI => f.write_str("pi"),
            Scalar::Float(x) if x.get() == -std::f64::consts::PI => f.write_str("-pi"),
            Scalar::Float(x) => write!(f, "{}", x.get()),
        }
    }
}

/// Parse a decimal literal (`12`, `0.25`, `1e-9`, `2.5E3`) into an exact
/// rational.
pub fn parse_decimal(text: &str) -> Option<Rat> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rat::from_integer(numer * num_traits::pow::pow(ten, scale as usize))
    } else {
        Rat::new(numer, num_traits::pow::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Plain-mode number formatting: ten fractional digits, trailing zeros
/// trimmed.
pub fn format_plain(x: f64) -> String {
    let mut s = format!("{x:.10}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}
