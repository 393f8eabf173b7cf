//! Reid baskets and the orbifold Riemann–Roch identities.
//!
//! A basket is a multiset of virtual quotient points `(r, b)`, each standing
//! for a point of type `1/r (1, -1, b)`. The two identities used throughout:
//!
//! ```text
//! c2·c1 + Σ (r - 1/r)                 = 24
//! c1³/2 + 3 - Σ b(r - b)/(2r)         = h⁰(-K)  ∈ Z≥0
//! ```
//!
//! Both sums run over the basket with multiplicity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{gcd, lcm_list, Rational};
use crate::error::{invalid, Error, Result};

/// One virtual quotient point `(r, b)` with `r >= 2`, `1 <= b <= r/2`, `gcd(b, r) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasketPoint {
    r: u64,
    b: u64,
}

impl BasketPoint {
    pub fn new(r: u64, b: u64) -> Result<Self> {
        if r < 2 {
            return Err(invalid(format!("basket point ({r},{b}): r must be at least 2")));
        }
        if b < 1 || 2 * b > r {
            return Err(invalid(format!("basket point ({r},{b}): need 1 <= b <= r/2")));
        }
        if gcd(b, r) != 1 {
            return Err(invalid(format!("basket point ({r},{b}): b and r not coprime")));
        }
        Ok(BasketPoint { r, b })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// The admissible `b` values for a given index `r`.
    pub fn admissible_b(r: u64) -> Vec<u64> {
        (1..=r / 2).filter(|&b| gcd(b, r) == 1).collect()
    }

    /// `r - 1/r`
    pub fn r_term(&self) -> Rational {
        Rational::from(self.r) - Rational::frac(1, self.r as i128)
    }

    /// `b(r - b) / (2r)`
    pub fn genus_contribution(&self) -> Rational {
        Rational::frac((self.b * (self.r - self.b)) as i128, (2 * self.r) as i128)
    }
}

impl fmt::Display for BasketPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.b)
    }
}

/// A multiset of basket points, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Basket {
    points: Vec<BasketPoint>,
}

impl Basket {
    pub fn new(mut points: Vec<BasketPoint>) -> Self {
        points.sort();
        Basket { points }
    }

    pub fn empty() -> Self {
        Basket::default()
    }

    /// Convenience constructor from raw pairs.
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self> {
        let points = pairs
            .iter()
            .map(|&(r, b)| BasketPoint::new(r, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Basket::new(points))
    }

    pub fn points(&self) -> &[BasketPoint] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// The multiset of indices `r`, ascending.
    pub fn r_values(&self) -> Vec<u64> {
        self.points.iter().map(|p| p.r).collect()
    }

    pub fn with_point(&self, point: BasketPoint) -> Basket {
        let mut points = self.points.clone();
        points.push(point);
        Basket::new(points)
    }

    /// `Σ (r - 1/r)` with multiplicity.
    pub fn r_sum(&self) -> Rational {
        self.points.iter().map(BasketPoint::r_term).sum()
    }

    /// `c2·c1 = 24 - Σ (r - 1/r)`; fails when the sum reaches 24.
    pub fn c2c1(&self) -> Result<Rational> {
        let value = Rational::integer(24) - self.r_sum();
        if !value.is_positive() {
            return Err(invalid(format!(
                "basket {self} has r-sum {} >= 24",
                self.r_sum()
            )));
        }
        Ok(value)
    }

    /// `Σ b(r - b)/(2r)` with multiplicity.
    pub fn genus_term(&self) -> Rational {
        self.points.iter().map(BasketPoint::genus_contribution).sum()
    }

    /// Gorenstein index: the lcm of the indices. Undefined for the empty basket.
    pub fn gorenstein_index(&self) -> Result<u64> {
        if self.is_empty() {
            return Err(invalid("Gorenstein index of an empty basket"));
        }
        lcm_list(&self.r_values())
    }

    /// Like [`Basket::gorenstein_index`] but `1` for the empty basket.
    pub(crate) fn index_or_one(&self) -> u64 {
        self.gorenstein_index().unwrap_or(1)
    }
}

impl fmt::Display for Basket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Basket {
    type Err = Error;

    /// Accepts `{(3,1),(2,1)}`, `(3,1),(2,1)`, `(3,1)` and `{}`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "basket",
            input: s.to_string(),
        };
        let body = s.trim();
        let body = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .unwrap_or(body)
            .trim();
        let mut points = Vec::new();
        let mut rest = body;
        while !rest.is_empty() {
            let rest_trim = rest.trim_start_matches([',', ' ']);
            if rest_trim.is_empty() {
                break;
            }
            let inner = rest_trim.strip_prefix('(').ok_or_else(bad)?;
            let close = inner.find(')').ok_or_else(bad)?;
            let (r, b) = inner[..close].split_once(',').ok_or_else(bad)?;
            let r: u64 = r.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            points.push(BasketPoint::new(r, b)?);
            rest = &inner[close + 1..];
        }
        Ok(Basket::new(points))
    }
}

impl Serialize for Basket {
    /// Sorted list of `[r, b]` pairs.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[u64; 2]> = self.points.iter().map(|p| [p.r, p.b]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Basket {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[u64; 2]>::deserialize(deserializer)?;
        let points = pairs
            .into_iter()
            .map(|[r, b]| BasketPoint::new(r, b))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Basket::new(points))
    }
}

/// `Σ (r - 1/r)` over the basket.
pub fn r_sum(basket: &Basket) -> Rational {
    basket.r_sum()
}

pub fn c2c1_from_basket(basket: &Basket) -> Result<Rational> {
    basket.c2c1()
}

pub fn genus_term(basket: &Basket) -> Rational {
    basket.genus_term()
}

pub fn gorenstein_index(basket: &Basket) -> Result<u64> {
    basket.gorenstein_index()
}

/// `h⁰(-K) = deg/2 + 3 - genus_term`, or `None` when that is not a
/// non-negative integer (the degree is rejected).
pub fn h0_from_degree(degree: Rational, basket: &Basket) -> Option<u64> {
    let value = degree * Rational::frac(1, 2) + Rational::integer(3) - basket.genus_term();
    value
        .to_integer()
        .and_then(|h| u64::try_from(h).ok())
}

/// A degree allowed by the plurigenus identity for a fixed basket.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCandidate {
    pub basket: Basket,
    /// `r_X · c1³`, always an integer.
    pub rx_deg: u64,
    pub h0: u64,
}

impl DegreeCandidate {
    pub fn degree(&self) -> Rational {
        Rational::from(self.rx_deg) / Rational::from(self.basket.index_or_one())
    }
}

/// All degrees `2h⁰ - 6 + 2·genus_term` with integral `h⁰ >= 0` lying strictly
/// inside `(lower, upper)`, ascending.
pub fn degree_candidates(basket: &Basket, lower: Rational, upper: Rational) -> Vec<DegreeCandidate> {
    let shift = Rational::integer(6) - basket.genus_term() * Rational::integer(2);
    // deg = 2h - shift, so lower < deg < upper  <=>  (lower + shift)/2 < h < (upper + shift)/2
    let half = Rational::frac(1, 2);
    let lo = (lower + shift) * half;
    let hi = (upper + shift) * half;
    let first = (lo.floor() + 1).max(0);
    let last = hi.ceil() - 1;
    let r_x = basket.index_or_one();
    (first..=last)
        .map(|h| {
            let deg = Rational::integer(2 * h) - shift;
            let rx_deg = deg * Rational::from(r_x);
            DegreeCandidate {
                basket: basket.clone(),
                rx_deg: rx_deg
                    .to_integer()
                    .and_then(|v| u64::try_from(v).ok())
                    .expect("r_X·c1³ is a positive integer inside the window"),
                h0: h as u64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn basket(pairs: &[(u64, u64)]) -> Basket {
        Basket::from_pairs(pairs).unwrap()
    }

    #[test]
    fn point_validation() {
        assert!(BasketPoint::new(1, 1).is_err());
        assert!(BasketPoint::new(5, 3).is_err());
        assert!(BasketPoint::new(4, 2).is_err());
        assert!(BasketPoint::new(2, 0).is_err());
        assert!(BasketPoint::new(2, 1).is_ok());
        assert_eq!(BasketPoint::admissible_b(7), vec![1, 2, 3]);
        assert_eq!(BasketPoint::admissible_b(6), vec![1]);
    }

    #[test]
    fn r_sums() {
        assert_eq!(basket(&[(2, 1), (2, 1)]).r_sum(), Rational::integer(3));
        assert_eq!(Basket::empty().r_sum(), Rational::ZERO);
        assert_eq!(basket(&[(5, 2)]).r_sum(), Rational::frac(24, 5));
    }

    #[test]
    fn c2c1_values() {
        assert_eq!(basket(&[(3, 1)]).c2c1().unwrap(), Rational::frac(64, 3));
        assert_eq!(basket(&[(2, 1)]).c2c1().unwrap(), Rational::frac(45, 2));
        assert_eq!(basket(&[(2, 1), (5, 2)]).c2c1().unwrap(), Rational::frac(177, 10));
        let heavy = Basket::new(vec![BasketPoint::new(2, 1).unwrap(); 16]);
        assert!(heavy.c2c1().is_err());
    }

    #[test]
    fn genus_terms() {
        assert_eq!(basket(&[(3, 1)]).genus_term(), Rational::frac(1, 3));
        assert_eq!(Basket::empty().genus_term(), Rational::ZERO);
        assert_eq!(basket(&[(5, 2)]).genus_term(), Rational::frac(3, 5));
    }

    #[test]
    fn gorenstein_indices() {
        assert_eq!(basket(&[(2, 1), (3, 1)]).gorenstein_index().unwrap(), 6);
        assert_eq!(basket(&[(3, 1), (3, 1)]).gorenstein_index().unwrap(), 3);
        assert_eq!(
            basket(&[(2, 1), (2, 1), (2, 1), (3, 1)]).gorenstein_index().unwrap(),
            6
        );
        assert!(Basket::empty().gorenstein_index().is_err());
    }

    #[test]
    fn h0_values() {
        assert_eq!(h0_from_degree(Rational::frac(336, 5), &basket(&[(5, 2)])), Some(36));
        assert_eq!(h0_from_degree(Rational::frac(200, 3), &basket(&[(3, 1)])), Some(36));
        assert_eq!(h0_from_degree(Rational::integer(67), &basket(&[(3, 1)])), None);
        assert_eq!(h0_from_degree(Rational::integer(64), &Basket::empty()), Some(35));
    }

    #[test]
    fn degree_candidate_examples() {
        let w = |c: Vec<DegreeCandidate>| c.iter().map(|c| c.rx_deg).collect::<Vec<_>>();
        let (lo, hi) = (Rational::integer(66), Rational::integer(72));
        assert_eq!(w(degree_candidates(&basket(&[(2, 1)]), lo, hi)), vec![133, 137, 141]);
        assert_eq!(w(degree_candidates(&basket(&[(5, 1)]), lo, hi)), vec![334, 344, 354]);
        assert_eq!(w(degree_candidates(&basket(&[(5, 2)]), lo, hi)), vec![336, 346, 356]);
        assert!(degree_candidates(&basket(&[(3, 1)]), lo, Rational::frac(200, 3)).is_empty());
        // both ends are open
        assert_eq!(
            w(degree_candidates(&basket(&[(3, 1)]), Rational::frac(200, 3), Rational::frac(206, 3))),
            Vec::<u64>::new()
        );
        assert_eq!(
            w(degree_candidates(&basket(&[(2, 1), (2, 1), (2, 1), (3, 1)]), lo, hi)),
            vec![397, 409, 421]
        );
    }

    #[test]
    fn text_and_json_forms() {
        let b: Basket = "{(3,1),(2,1)}".parse().unwrap();
        assert_eq!(b.to_string(), "{(2,1),(3,1)}");
        assert_eq!("(3,1)".parse::<Basket>().unwrap(), basket(&[(3, 1)]));
        assert_eq!("{}".parse::<Basket>().unwrap(), Basket::empty());
        assert!("{(4,2)}".parse::<Basket>().is_err());
        assert!("{(3,1}".parse::<Basket>().is_err());
        assert_eq!(serde_json::to_string(&b).unwrap(), "[[2,1],[3,1]]");
        let back: Basket = serde_json::from_str("[[3,1],[2,1]]").unwrap();
        assert_eq!(back, b);
    }

    fn arb_point() -> impl Strategy<Value = BasketPoint> {
        (2u64..=9)
            .prop_flat_map(|r| {
                let bs = BasketPoint::admissible_b(r);
                (Just(r), proptest::sample::select(bs))
            })
            .prop_map(|(r, b)| BasketPoint::new(r, b).unwrap())
    }

    fn arb_basket() -> impl Strategy<Value = Basket> {
        proptest::collection::vec(arb_point(), 0..4).prop_map(Basket::new)
    }

    proptest! {
        #[test]
        fn c2c1_plus_r_sum_is_24(b in arb_basket()) {
            prop_assume!(b.r_sum() < Rational::integer(24));
            prop_assert_eq!(b.c2c1().unwrap() + b.r_sum(), Rational::integer(24));
        }

        #[test]
        fn adding_a_point_lowers_c2c1(b in arb_basket(), p in arb_point()) {
            let bigger = b.with_point(p);
            prop_assume!(bigger.r_sum() < Rational::integer(24));
            prop_assert!(bigger.c2c1().unwrap() < b.c2c1().unwrap());
        }

        #[test]
        fn candidates_round_trip_through_h0(b in arb_basket(), lo in 0i128..80, width in 1i128..20) {
            let lower = Rational::integer(lo);
            let upper = Rational::integer(lo + width);
            for c in degree_candidates(&b, lower, upper) {
                prop_assert_eq!(h0_from_degree(c.degree(), &b), Some(c.h0));
                prop_assert!(c.degree() > lower && c.degree() < upper);
            }
        }
    }
}
