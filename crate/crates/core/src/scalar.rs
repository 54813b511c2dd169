//! Numeric scalar abstraction.
//!
//! Tables and sums are generic over [`Scalar`] so that the same code runs in
//! `f64` and in exact rational arithmetic. Exact mode is what the property
//! suites use to assert identities with zero residual.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when arithmetic on this type is exact.
    const EXACT: bool;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("integer is representable")
    }

    /// Largest integer not above `self`.
    fn floor_int(&self) -> i64;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn floor_int(&self) -> i64 {
        self.floor() as i64
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn floor_int(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("floor fits in i64")
    }
}

/// A computed value together with a bound on its truncation error. A bound of
/// zero means the value is exact up to floating point rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error_bound: f64,
}

impl<T> Estimate<T> {
    pub fn exact(value: T) -> Self {
        Estimate { value, error_bound: 0.0 }
    }
}

/// Builds the rational `num/den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or a finite decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() || body.contains(['e', 'E']) {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { return None } else { digits.parse().ok()? };
    let den = BigInt::from(10).pow(frac_part.len() as u32);
    Some(Rational::new(num * sign, den))
}

/// Greatest common divisor of two non-negative integers.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}
