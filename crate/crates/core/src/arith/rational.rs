//! Exact rationals over `i128`.
//!
//! Values are kept in lowest terms with a positive denominator. Every
//! operation is checked: the operator impls panic on overflow or on division
//! by zero (like the primitive integer types in debug builds, but in release
//! builds too), while the `checked_*` methods report the failure as an
//! [`Error`].

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num/den` in lowest terms.
    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let g = gcd_i128(num, den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = num.checked_neg().ok_or(Error::Overflow)?;
            den = den.checked_neg().ok_or(Error::Overflow)?;
        }
        Ok(Rational { num, den })
    }

    /// Shorthand for literals; panics on a zero denominator.
    pub fn frac(num: i128, den: i128) -> Self {
        Self::new(num, den).expect("zero denominator")
    }

    pub const fn integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn to_integer(&self) -> Option<i128> {
        self.is_integer().then_some(self.num)
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    pub fn ceil(&self) -> i128 {
        -((-self.num).div_euclid(self.den))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den, self.num)
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        let g = gcd_i128(self.den, rhs.den);
        let lhs_scale = rhs.den / g;
        let rhs_scale = self.den / g;
        let a = self.num.checked_mul(lhs_scale).ok_or(Error::Overflow)?;
        let b = rhs.num.checked_mul(rhs_scale).ok_or(Error::Overflow)?;
        let num = a.checked_add(b).ok_or(Error::Overflow)?;
        let den = self.den.checked_mul(lhs_scale).ok_or(Error::Overflow)?;
        Self::new(num, den)
    }

    pub fn checked_neg(self) -> Result<Self> {
        let num = self.num.checked_neg().ok_or(Error::Overflow)?;
        Ok(Rational { num, den: self.den })
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        // cross-reduce first so intermediate products stay small
        let g1 = gcd_i128(self.num, rhs.den).max(1);
        let g2 = gcd_i128(rhs.num, self.den).max(1);
        let num = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .ok_or(Error::Overflow)?;
        let den = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .ok_or(Error::Overflow)?;
        Self::new(num, den)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.checked_mul(rhs.recip()?)
    }

    fn cmp_checked(&self, other: &Self) -> Result<Ordering> {
        let a = self.num.checked_mul(other.den).ok_or(Error::Overflow)?;
        let b = other.num.checked_mul(self.den).ok_or(Error::Overflow)?;
        Ok(a.cmp(&b))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

macro_rules! from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(n: $t) -> Self {
                Rational::integer(n as i128)
            }
        }
    )*};
}
from_int!(i32, i64, u32, u64, usize);

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_checked(other).expect("rational overflow")
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("rational overflow")
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("rational overflow")
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("rational overflow")
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Self) -> Self {
        match self.checked_div(rhs) {
            Ok(v) => v,
            Err(Error::DivisionByZero) => panic!("rational division by zero"),
            Err(_) => panic!("rational overflow"),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Self {
        self.checked_neg().expect("rational overflow")
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "rational",
            input: s.to_string(),
        };
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i128 = n.trim().parse().map_err(|_| bad())?;
                let d: i128 = d.trim().parse().map_err(|_| bad())?;
                Rational::new(n, d)
            }
            None => s.parse::<i128>().map(Rational::integer).map_err(|_| bad()),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Decimal rendering for display only.
///
/// Terminating expansions are written out exactly; anything else is rounded
/// (half away from zero) to `digits` places and prefixed with `≈`.
pub fn to_decimal(x: Rational, digits: u32) -> String {
    let mut den = x.den;
    while den % 2 == 0 {
        den /= 2;
    }
    while den % 5 == 0 {
        den /= 5;
    }
    let sign = if x.num < 0 { "-" } else { "" };
    let n = x.num.unsigned_abs();
    let d = x.den.unsigned_abs();
    if den == 1 {
        let int = n / d;
        let mut rem = n % d;
        let mut frac = String::new();
        while rem != 0 {
            rem *= 10;
            frac.push(char::from(b'0' + (rem / d) as u8));
            rem %= d;
        }
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        let scale = 10u128.pow(digits);
        let scaled = (n * scale * 2 + d) / (2 * d);
        let int = scaled / scale;
        let frac = scaled % scale;
        format!(
            "≈{sign}{int}.{frac:0width$}",
            width = digits as usize
        )
    }
}
