//! Exact rationals and the extended cost type `ExtCost`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational used for edge prices and all cost values.
pub type Rational = Ratio<i128>;

pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

pub fn frac(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

/// A nonnegative exact rational or `+inf`.
///
/// The derived order puts every finite value below `Infinite`, and
/// `Infinite == Infinite`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtCost {
    Finite(Rational),
    Infinite,
}

impl ExtCost {
    pub fn zero() -> Self {
        ExtCost::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtCost::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtCost::Finite(r) => Some(r),
            ExtCost::Infinite => None,
        }
    }

    /// `self - other` when both are finite.
    pub fn checked_sub(&self, other: &ExtCost) -> Option<Rational> {
        match (self, other) {
            (ExtCost::Finite(a), ExtCost::Finite(b)) => Some(a - b),
            _ => None,
        }
    }

    /// Exact `p/q` form; integers keep the `/1` suffix.
    pub fn exact(&self) -> String {
        match self {
            ExtCost::Finite(r) => format_exact(r),
            ExtCost::Infinite => "inf".to_string(),
        }
    }

    pub fn decimal(&self) -> String {
        match self {
            ExtCost::Finite(r) => format_decimal(r),
            ExtCost::Infinite => "inf".to_string(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtCost::Finite(r) => to_f64(r),
            ExtCost::Infinite => f64::INFINITY,
        }
    }
}

impl From<Rational> for ExtCost {
    fn from(r: Rational) -> Self {
        ExtCost::Finite(r)
    }
}

impl Add for ExtCost {
    type Output = ExtCost;
    fn add(self, rhs: ExtCost) -> ExtCost {
        match (self, rhs) {
            (ExtCost::Finite(a), ExtCost::Finite(b)) => ExtCost::Finite(a + b),
            _ => ExtCost::Infinite,
        }
    }
}

impl Add<Rational> for ExtCost {
    type Output = ExtCost;
    fn add(self, rhs: Rational) -> ExtCost {
        match self {
            ExtCost::Finite(a) => ExtCost::Finite(a + rhs),
            ExtCost::Infinite => ExtCost::Infinite,
        }
    }
}

impl AddAssign for ExtCost {
    fn add_assign(&mut self, rhs: ExtCost) {
        *self = std::mem::replace(self, ExtCost::Infinite) + rhs;
    }
}

impl Mul<Rational> for ExtCost {
    type Output = ExtCost;
    fn mul(self, rhs: Rational) -> ExtCost {
        match self {
            ExtCost::Finite(a) => ExtCost::Finite(a * rhs),
            ExtCost::Infinite => ExtCost::Infinite,
        }
    }
}

impl std::iter::Sum for ExtCost {
    fn sum<I: Iterator<Item = ExtCost>>(iter: I) -> ExtCost {
        iter.fold(ExtCost::zero(), |acc, c| acc + c)
    }
}

impl fmt::Display for ExtCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.exact())
    }
}

impl Serialize for ExtCost {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.exact())
    }
}

pub fn format_exact(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with 12 significant digits, trailing zeros trimmed.
pub fn format_decimal(r: &Rational) -> String {
    let x = to_f64(r);
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Parses `p/q`, an integer, a finite decimal (`10.3`), scientific notation
/// (`1e-3`) or an integer power (`10^6`). Decimals are converted exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::BadNumber(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(p / q);
    }
    if let Some((base, exp)) = s.split_once('^') {
        let base = parse_rational(base)?;
        let exp: i32 = exp.trim().parse().map_err(|_| bad())?;
        if exp.unsigned_abs() > 60 || (base.is_zero() && exp < 0) {
            return Err(bad());
        }
        return Ok(num_traits::pow::Pow::pow(base, exp));
    }
    if let Some(pos) = s.find(['e', 'E']) {
        let mantissa = parse_decimal(&s[..pos]).ok_or_else(bad)?;
        let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
        if exp.unsigned_abs() > 30 {
            return Err(bad());
        }
        return Ok(mantissa * num_traits::pow::Pow::pow(int(10), exp));
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, fraction) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && fraction.is_empty() {
        return None;
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) || fraction.len() > 30 {
        return None;
    }
    let digits = format!("{whole}{fraction}");
    let numer = i128::from_str(&digits).ok()?;
    let denom = 10i128.checked_pow(fraction.len() as u32)?;
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Parses a nonnegative edge price.
pub fn parse_alpha(text: &str) -> Result<Rational> {
    let a = parse_rational(text)?;
    if a.is_negative() {
        return Err(Error::NegativeAlpha(text.to_string()));
    }
    Ok(a)
}

/// `sqrt`-free test of `x <= 4 * sqrt(alpha) + 4` for integer `x >= 0`.
pub fn within_sqrt_bound(x: u64, alpha: &Rational) -> bool {
    if x <= 4 {
        return true;
    }
    let slack = int(x as i128 - 4);
    slack * slack <= int(16) * alpha
}
