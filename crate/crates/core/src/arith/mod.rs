//! Exact arithmetic: rationals, factorization, divisibility.

mod numtheory;
mod rational;

pub use numtheory::{
    divisors, factorize, gcd, is_rational_square, isqrt, lcm, lcm_list, square_divisors,
    Factorization,
};
pub use rational::{to_decimal, Rational};
