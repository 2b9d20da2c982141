//! Arithmetic shared by the exact and floating-point solver paths.
//!
//! Solvers are written once against [`Scalar`] and instantiated with `f64`
//! (tolerance-based comparisons) or [`BigRational`] (exact comparisons).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub trait Scalar: Clone + fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Comparison tolerance: zero for exact types.
    fn eps() -> Self;
    fn is_exact() -> bool;
    fn to_value(&self) -> Value;

    fn abs(&self) -> Self {
        if self.is_negative_strict() {
            self.neg()
        } else {
            self.clone()
        }
    }
    fn is_negative_strict(&self) -> bool {
        self.to_cmp(&Self::zero()) == Ordering::Less
    }
    fn to_cmp(&self, o: &Self) -> Ordering;
    /// `self > eps`.
    fn gt_eps(&self) -> bool {
        self.to_cmp(&Self::eps()) == Ordering::Greater
    }
    /// `self < -eps`.
    fn lt_neg_eps(&self) -> bool {
        self.to_cmp(&Self::eps().neg()) == Ordering::Less
    }
    fn near_zero(&self) -> bool {
        !self.gt_eps() && !self.lt_neg_eps()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn eps() -> Self {
        1e-12
    }
    fn is_exact() -> bool {
        false
    }
    fn to_value(&self) -> Value {
        Value::Float(*self)
    }
    fn to_cmp(&self, o: &Self) -> Ordering {
        self.partial_cmp(o).unwrap_or(Ordering::Equal)
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn eps() -> Self {
        Zero::zero()
    }
    fn is_exact() -> bool {
        true
    }
    fn to_value(&self) -> Value {
        Value::Exact(self.clone())
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_cmp(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
}

/// Exact conversion of a finite float (every finite `f64` is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if x.is_finite() {
        BigRational::from_f64(x)
    } else {
        None
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"n/d"`, `"n"` or a decimal literal such as `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    // Decimal literal: read digits exactly instead of going through f64.
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A number produced by either solver path.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Float(f64),
    Exact(Rational),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Float(x) => *x,
            Value::Exact(r) => Scalar::to_f64(r),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Float(x) => *x == 0.0,
            Value::Exact(r) => r.is_zero(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x}"),
            Value::Exact(r) => write!(f, "{}", format_rational(r)),
        }
    }
}

/// Numeric mode for decisions whose outcome must not depend on rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    #[default]
    Float,
    Rational,
}
