//! Factorization and the handful of divisibility predicates the sieve needs.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{invalid, Error, Result};

/// Prime factorization `p1^a1 * p2^a2 * ...` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// The prime-power components `p^a`, ascending by prime.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, a)| p.pow(a))
    }

    pub fn value(&self) -> u64 {
        self.prime_powers().product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, a)| a == 1)
    }
}

impl fmt::Display for Factorization {
    /// `2^3*5^2`, `7*19`; the empty factorization prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, a)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if a == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{a}")?;
            }
        }
        Ok(())
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(invalid("cannot factorize 0"));
    }
    let mut n = n;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut a = 0;
            while n.is_multiple_of(p) {
                n /= p;
                a += 1;
            }
            factors.push((p, a));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    Ok(Factorization { factors })
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::Overflow)
}

/// Least common multiple of a non-empty list.
pub fn lcm_list(xs: &[u64]) -> Result<u64> {
    if xs.is_empty() {
        return Err(invalid("lcm of an empty list"));
    }
    xs.iter().try_fold(1, |acc, &x| lcm(acc, x))
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// All `d >= 1` with `d^2 | n`, ascending.
pub fn square_divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d * d) {
            out.push(d);
        }
        d += 1;
    }
    out
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn is_perfect_square(n: u128) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Whether a non-negative rational is the square of a rational.
pub fn is_rational_square(x: Rational) -> Result<bool> {
    if x.is_negative() {
        return Err(invalid(format!("square test on negative value {x}")));
    }
    Ok(is_perfect_square(x.numer() as u128) && is_perfect_square(x.denom() as u128))
}
