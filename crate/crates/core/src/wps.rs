//! Weighted projective 3-spaces `P(a0,a1,a2,a3)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, Rational};
use crate::basket::{h0_from_degree, Basket};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightedP3 {
    weights: [u64; 4],
}

impl WeightedP3 {
    /// Accepts only well-formed weights: every three of them are coprime.
    pub fn new(weights: [u64; 4]) -> Result<Self> {
        if weights.contains(&0) {
            return Err(invalid(format!("weights must be positive: {weights:?}")));
        }
        for skip in 0..4 {
            let triple: Vec<u64> = (0..4).filter(|&i| i != skip).map(|i| weights[i]).collect();
            let g = triple.iter().fold(0, |acc, &w| gcd(acc, w));
            if g != 1 {
                return Err(invalid(format!(
                    "not well-formed: gcd({},{},{}) = {g}",
                    triple[0], triple[1], triple[2]
                )));
            }
        }
        Ok(WeightedP3 { weights })
    }

    pub fn weights(&self) -> [u64; 4] {
        self.weights
    }

    /// `a0 + a1 + a2 + a3`
    pub fn weil_index(&self) -> u64 {
        self.weights.iter().sum()
    }

    /// `(Σ a)³ / Π a`
    pub fn anticanonical_degree(&self) -> Rational {
        let s = Rational::from(self.weil_index());
        let p: u64 = self.weights.iter().product();
        s * s * s / Rational::from(p)
    }

    pub fn singular_strata(&self) -> Vec<Stratum> {
        let w = self.weights;
        let mut out = Vec::new();
        for i in 0..4 {
            if w[i] >= 2 {
                let r = w[i];
                let local: Vec<u64> = (0..4).filter(|&k| k != i).map(|k| w[k] % r).collect();
                out.push(Stratum::Point {
                    coordinate: i,
                    point: QuotientPoint {
                        r,
                        weights: [local[0], local[1], local[2]],
                    },
                });
            }
        }
        for i in 0..4 {
            for k in i + 1..4 {
                let g = gcd(w[i], w[k]);
                if g >= 2 {
                    out.push(Stratum::Curve {
                        coordinates: (i, k),
                        order: g,
                    });
                }
            }
        }
        out
    }

    /// Number of monomials of weighted degree `d`.
    pub fn h0_monomials(&self, d: u64) -> u64 {
        let d = d as usize;
        let mut ways = vec![0u64; d + 1];
        ways[0] = 1;
        for &a in &self.weights {
            let a = a as usize;
            for s in a..=d {
                ways[s] += ways[s - a];
            }
        }
        ways[d]
    }

    /// `h0(-K)` counted by monomials against the basket's Riemann–Roch value.
    pub fn basket_consistency(&self, basket: &Basket) -> bool {
        let count = self.h0_monomials(self.weil_index());
        h0_from_degree(self.anticanonical_degree(), basket) == Some(count)
    }
}

impl fmt::Display for WeightedP3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.weights;
        write!(f, "P({a},{b},{c},{d})")
    }
}

/// Cyclic quotient `(1/r)(w1,w2,w3)` with weights reduced mod `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientPoint {
    pub r: u64,
    pub weights: [u64; 3],
}

impl QuotientPoint {
    pub fn new(r: u64, weights: [i64; 3]) -> Result<Self> {
        if r < 2 {
            return Err(invalid(format!("quotient order {r} < 2")));
        }
        let reduce = |w: i64| w.rem_euclid(r as i64) as u64;
        Ok(QuotientPoint {
            r,
            weights: weights.map(reduce),
        })
    }

    pub fn is_isolated(&self) -> bool {
        self.weights.iter().all(|&w| gcd(w, self.r) == 1)
    }

    /// `σ(k) = Σ frac(k·w_i / r)` for `k = 1..r-1`.
    pub fn age_values(&self) -> Vec<Rational> {
        (1..self.r)
            .map(|k| {
                let num: u64 = self.weights.iter().map(|&w| (k * w) % self.r).sum();
                Rational::frac(num as i128, self.r as i128)
            })
            .collect()
    }
}

impl fmt::Display for QuotientPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.weights;
        write!(f, "1/{}({a},{b},{c})", self.r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Singularity {
    Terminal,
    CanonicalNotTerminal,
    NotCanonical,
}

impl fmt::Display for Singularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Singularity::Terminal => "TERMINAL",
            Singularity::CanonicalNotTerminal => "CANONICAL_NOT_TERMINAL",
            Singularity::NotCanonical => "NOT_CANONICAL",
        })
    }
}

/// Reid–Tai classification of an isolated cyclic quotient.
pub fn reid_tai(point: &QuotientPoint) -> Result<Singularity> {
    if !point.is_isolated() {
        return Err(Error::NotSupported(format!("{point} is not an isolated quotient")));
    }
    let min = point
        .age_values()
        .into_iter()
        .min()
        .expect("r >= 2 gives at least one value");
    Ok(match min.cmp(&Rational::ONE) {
        std::cmp::Ordering::Greater => Singularity::Terminal,
        std::cmp::Ordering::Equal => Singularity::CanonicalNotTerminal,
        std::cmp::Ordering::Less => Singularity::NotCanonical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Stratum {
    Point { coordinate: usize, point: QuotientPoint },
    Curve { coordinates: (usize, usize), order: u64 },
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stratum::Point { coordinate, point } => write!(f, "P{coordinate}: {point}"),
            Stratum::Curve { coordinates: (i, k), order } => {
                write!(f, "P{i}P{k}: curve of Z/{order} quotients")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(w: [u64; 4]) -> WeightedP3 {
        WeightedP3::new(w).unwrap()
    }

    fn qp(r: u64, w: [i64; 3]) -> QuotientPoint {
        QuotientPoint::new(r, w).unwrap()
    }

    #[test]
    fn degrees_and_indices() {
        assert_eq!(p([1, 1, 3, 5]).anticanonical_degree(), Rational::frac(200, 3));
        assert_eq!(p([1, 1, 1, 1]).anticanonical_degree(), Rational::integer(64));
        assert_eq!(p([1, 1, 1, 2]).anticanonical_degree(), Rational::frac(125, 2));
        assert_eq!(p([1, 1, 3, 5]).weil_index(), 10);
        assert_eq!(p([1, 1, 4, 6]).weil_index(), 12);
    }

    #[test]
    fn well_formedness() {
        let err = WeightedP3::new([1, 2, 4, 6]).unwrap_err().to_string();
        assert!(err.contains("gcd(2,4,6) = 2"), "{err}");
        assert!(WeightedP3::new([0, 1, 1, 1]).is_err());
        assert!(WeightedP3::new([2, 2, 3, 5]).is_ok());
    }

    #[test]
    fn strata() {
        let s = p([1, 1, 3, 5]).singular_strata();
        let points: Vec<QuotientPoint> = s
            .iter()
            .filter_map(|x| match x {
                Stratum::Point { point, .. } => Some(*point),
                _ => None,
            })
            .collect();
        assert_eq!(points, vec![qp(3, [1, 1, 2]), qp(5, [1, 1, 3])]);
        assert_eq!(s.len(), 2);
        assert!(p([1, 1, 1, 1]).singular_strata().is_empty());
        assert_eq!(p([1, 1, 1, 2]).singular_strata(), vec![Stratum::Point {
            coordinate: 3,
            point: qp(2, [1, 1, 1])
        }]);
        let s = p([2, 2, 3, 5]).singular_strata();
        assert!(s.contains(&Stratum::Curve { coordinates: (0, 1), order: 2 }));
    }

    #[test]
    fn reid_tai_examples() {
        assert_eq!(reid_tai(&qp(3, [1, 1, 2])).unwrap(), Singularity::Terminal);
        assert_eq!(qp(3, [1, 1, 2]).age_values(), vec![Rational::frac(4, 3), Rational::frac(5, 3)]);
        assert_eq!(reid_tai(&qp(5, [1, 1, 3])).unwrap(), Singularity::CanonicalNotTerminal);
        assert_eq!(reid_tai(&qp(2, [1, 1, 1])).unwrap(), Singularity::Terminal);
        assert_eq!(reid_tai(&qp(3, [1, -1, 1])).unwrap(), Singularity::Terminal);
        assert_eq!(reid_tai(&qp(5, [1, 1, -2])).unwrap(), Singularity::CanonicalNotTerminal);
        assert_eq!(reid_tai(&qp(5, [1, 1, 1])).unwrap(), Singularity::NotCanonical);
        assert!(matches!(reid_tai(&qp(2, [0, 1, 1])), Err(Error::NotSupported(_))));
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(p([1, 1, 3, 5]).h0_monomials(10), 36);
        assert_eq!(p([1, 1, 1, 1]).h0_monomials(0), 1);
        assert_eq!(p([1, 1, 1, 1]).h0_monomials(1), 4);
        for d in 0..=20u64 {
            let binom = (d + 3) * (d + 2) * (d + 1) / 6;
            assert_eq!(p([1, 1, 1, 1]).h0_monomials(d), binom);
        }
    }

    #[test]
    fn monomials_match_enumeration() {
        for w in [[1, 1, 3, 5], [1, 2, 3, 5], [1, 1, 4, 6], [2, 3, 5, 7]] {
            let space = p(w);
            for d in 0..=30u64 {
                let mut count = 0;
                for e0 in 0..=d / w[0] {
                    for e1 in 0..=d / w[1] {
                        for e2 in 0..=d / w[2] {
                            let used = e0 * w[0] + e1 * w[1] + e2 * w[2];
                            if used <= d && (d - used) % w[3] == 0 {
                                count += 1;
                            }
                        }
                    }
                }
                assert_eq!(space.h0_monomials(d), count, "{space} degree {d}");
            }
        }
    }

    #[test]
    fn basket_checks() {
        let three = Basket::from_pairs(&[(3, 1)]).unwrap();
        let two = Basket::from_pairs(&[(2, 1)]).unwrap();
        assert!(p([1, 1, 3, 5]).basket_consistency(&three));
        assert!(!p([1, 1, 3, 5]).basket_consistency(&two));
        assert!(p([1, 1, 1, 1]).basket_consistency(&Basket::empty()));
    }

    proptest! {
        #[test]
        fn degree_is_index_cubed_over_product(w in prop::array::uniform4(1u64..12)) {
            if let Ok(space) = WeightedP3::new(w) {
                let q = Rational::from(space.weil_index());
                let prod: u64 = w.iter().product();
                prop_assert_eq!(space.anticanonical_degree(), q * q * q / Rational::from(prod));
            }
        }

        #[test]
        fn reid_tai_is_symmetric(r in 2u64..20, w in prop::array::uniform3(-40i64..40), shift in prop::array::uniform3(-3i64..3)) {
            let a = QuotientPoint::new(r, w).unwrap();
            let shifted = [w[0] + shift[0] * r as i64, w[1] + shift[1] * r as i64, w[2] + shift[2] * r as i64];
            let b = QuotientPoint::new(r, [shifted[2], shifted[0], shifted[1]]).unwrap();
            match (reid_tai(&a), reid_tai(&b)) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
                (Err(_), Err(_)) => {}
                other => prop_assert!(false, "mismatch {:?}", other),
            }
        }
    }
}
