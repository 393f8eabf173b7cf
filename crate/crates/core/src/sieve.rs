//! Regime-dependent candidate tables.
//!
//! For each range of the Q-Fano index `q` the Kawamata–Miyaoka type bound
//! `c1³ <= k(q)·c2·c1` together with `c1³ > lower` caps the basket sum
//! `Σ (r - 1/r)`. Every index multiset under the cap is expanded into baskets,
//! every basket into degree candidates inside the window, and the candidates
//! that keep a non-negative (positive, for `q >= 7`) slack
//! `r_X·c2·c1 - k(q)⁻¹·r_X·c1³` become table rows.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::basket::{degree_candidates, Basket, BasketPoint};
use crate::error::{invalid, Result};

/// Coarse range of the Q-Fano index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QRegime {
    /// `q <= 5`
    Low,
    /// `q = 6`
    Six,
    /// `q >= 7`
    High,
}

impl QRegime {
    pub const ALL: [QRegime; 3] = [QRegime::Low, QRegime::Six, QRegime::High];

    pub fn of(q: u64) -> QRegime {
        match q {
            0..=5 => QRegime::Low,
            6 => QRegime::Six,
            _ => QRegime::High,
        }
    }

    /// Coefficient `c` in the slack `r_X·c2c1 - c·r_X·c1³` used for this regime's table.
    ///
    /// For `q >= 7` the exact reciprocal `(q²+2q-4)/(4q²)` exceeds `1/4`, so
    /// the table uses `1/4` with a strict inequality.
    pub fn coefficient(self) -> Rational {
        match self {
            QRegime::Low => km_reciprocal(1),
            QRegime::Six => km_reciprocal(6),
            QRegime::High => Rational::frac(1, 4),
        }
    }

    /// Whether a zero slack is admissible.
    pub fn allows_zero_slack(self) -> bool {
        self != QRegime::High
    }
}

impl fmt::Display for QRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QRegime::Low => "q<=5",
            QRegime::Six => "q=6",
            QRegime::High => "q>=7",
        })
    }
}

/// Kawamata–Miyaoka coefficient: `c1³ <= k(q)·c2·c1`.
pub fn km_coefficient(q: u64) -> Rational {
    km_reciprocal(q).recip().expect("coefficient is positive")
}

/// `1/k(q)`: `5/16` for `q <= 5`, `(q²+2q-4)/(4q²)` otherwise.
pub fn km_reciprocal(q: u64) -> Rational {
    if q <= 5 {
        Rational::frac(5, 16)
    } else {
        let q = q as i128;
        Rational::frac(q * q + 2 * q - 4, 4 * q * q)
    }
}

/// `r_X·c2c1 - km_reciprocal(q)·r_X·c1³`
pub fn km_slack(rx_c2c1: Rational, rx_deg: u64, q: u64) -> Rational {
    rx_c2c1 - km_reciprocal(q) * Rational::from(rx_deg)
}

/// Upper bound on `Σ (r - 1/r)` implied by the regime inequality and `c1³ > deg_lower`.
pub fn rsum_bound(regime: QRegime, deg_lower: Rational) -> Rational {
    Rational::integer(24) - regime.coefficient() * deg_lower
}

/// All multisets of integers `>= 2` with `Σ (r - 1/r) < bound`, ordered by
/// size and then lexicographically.
pub fn enumerate_rx_multisets(bound: Rational) -> Vec<Vec<u64>> {
    fn term(r: u64) -> Rational {
        Rational::from(r) - Rational::frac(1, r as i128)
    }
    fn extend(min_r: u64, budget: Rational, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let mut r = min_r;
        // r - 1/r is increasing, so stop at the first r that does not fit
        while term(r) < budget {
            current.push(r);
            out.push(current.clone());
            extend(r, budget - term(r), current, out);
            current.pop();
            r += 1;
        }
    }
    let mut out = Vec::new();
    if bound.is_positive() {
        extend(2, bound, &mut Vec::new(), &mut out);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Every basket with the given index multiset, up to reordering equal indices.
pub fn enumerate_baskets(rx: &[u64]) -> Result<Vec<Basket>> {
    if let Some(&r) = rx.iter().find(|&&r| r < 2) {
        return Err(invalid(format!("basket index {r} < 2")));
    }
    let mut sorted = rx.to_vec();
    sorted.sort_unstable();
    let mut partial: Vec<Vec<BasketPoint>> = vec![Vec::new()];
    for (i, &r) in sorted.iter().enumerate() {
        let mut next = Vec::new();
        for points in &partial {
            // equal indices take nondecreasing b so that each multiset appears once
            let min_b = match points.last() {
                Some(p) if i > 0 && sorted[i - 1] == r => p.b(),
                _ => 1,
            };
            for b in BasketPoint::admissible_b(r).into_iter().filter(|&b| b >= min_b) {
                let mut extended = points.clone();
                extended.push(BasketPoint::new(r, b)?);
                next.push(extended);
            }
        }
        partial = next;
    }
    let mut baskets: Vec<Basket> = partial.into_iter().map(Basket::new).collect();
    baskets.sort();
    Ok(baskets)
}

/// Open window `lower < c1³ < upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lower: Rational,
    pub upper: Rational,
}

impl Window {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self> {
        if lower >= upper {
            return Err(invalid(format!("empty window ({lower}, {upper})")));
        }
        if lower.is_negative() {
            return Err(invalid(format!("negative window bound {lower}")));
        }
        Ok(Window { lower, upper })
    }
}

impl Default for Window {
    fn default() -> Self {
        Window {
            lower: Rational::integer(66),
            upper: Rational::integer(72),
        }
    }
}

/// One degree candidate that passes the regime inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveRow {
    pub basket: Basket,
    pub r_x: u64,
    pub rx_c2c1: Rational,
    pub rx_deg: u64,
    /// `rx_c2c1 - coefficient·rx_deg` for the regime that produced the row.
    pub slack: Rational,
}

impl SieveRow {
    /// Builds a row for a basket and an integral `r_X·c1³`, computing the slack
    /// with the given coefficient.
    pub fn new(basket: Basket, rx_deg: u64, coefficient: Rational) -> Result<Self> {
        let r_x = basket.gorenstein_index()?;
        let rx_c2c1 = basket.c2c1()? * Rational::from(r_x);
        let slack = rx_c2c1 - coefficient * Rational::from(rx_deg);
        Ok(SieveRow {
            basket,
            r_x,
            rx_c2c1,
            rx_deg,
            slack,
        })
    }

    pub fn degree(&self) -> Rational {
        Rational::from(self.rx_deg) / Rational::from(self.r_x)
    }

    pub fn c2c1(&self) -> Rational {
        self.rx_c2c1 / Rational::from(self.r_x)
    }

    pub fn r_values(&self) -> Vec<u64> {
        self.basket.r_values()
    }

    pub fn key(&self) -> String {
        format!("RX={};deg={}", format_multiset(&self.r_values()), self.rx_deg)
    }
}

/// `{2,2,3}`
pub fn format_multiset(values: &[u64]) -> String {
    let inner: Vec<String> = values.iter().map(u64::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// All rows sharing one index multiset; an empty `rows` is a "None" group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseGroup {
    pub r_values: Vec<u64>,
    pub r_x: u64,
    pub rx_c2c1: Rational,
    pub rows: Vec<SieveRow>,
}

impl CaseGroup {
    pub fn is_none(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn max_slack(&self) -> Option<Rational> {
        self.rows.iter().map(|r| r.slack).max()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTable {
    pub regime: QRegime,
    pub window: Window,
    pub rsum_bound: Rational,
    pub groups: Vec<CaseGroup>,
}

impl CaseTable {
    pub fn rows(&self) -> impl Iterator<Item = &SieveRow> {
        self.groups.iter().flat_map(|g| g.rows.iter())
    }
}

/// Builds the candidate table of one regime.
pub fn build_case_table(regime: QRegime, window: Window) -> Result<CaseTable> {
    let bound = rsum_bound(regime, window.lower);
    let coefficient = regime.coefficient();
    let mut groups = Vec::new();
    for rx in enumerate_rx_multisets(bound) {
        let baskets = enumerate_baskets(&rx)?;
        let r_x = baskets[0].gorenstein_index()?;
        let rx_c2c1 = baskets[0].c2c1()? * Rational::from(r_x);
        let mut rows = Vec::new();
        for basket in baskets {
            let mut upper = window.upper;
            if regime == QRegime::High {
                // c1³ < 4·c2·c1
                upper = upper.min(basket.c2c1()? * Rational::integer(4));
            }
            for candidate in degree_candidates(&basket, window.lower, upper) {
                let row = SieveRow::new(basket.clone(), candidate.rx_deg, coefficient)?;
                let keep = if regime.allows_zero_slack() {
                    !row.slack.is_negative()
                } else {
                    row.slack.is_positive()
                };
                if keep {
                    rows.push(row);
                }
            }
        }
        rows.sort_by(|a, b| a.rx_deg.cmp(&b.rx_deg).then_with(|| a.basket.cmp(&b.basket)));
        groups.push(CaseGroup {
            r_values: rx,
            r_x,
            rx_c2c1,
            rows,
        });
    }
    Ok(CaseTable {
        regime,
        window,
        rsum_bound: bound,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn coefficients() {
        assert_eq!(km_coefficient(6), r(36, 11));
        assert_eq!(km_coefficient(1), r(16, 5));
        assert_eq!(km_coefficient(5), r(16, 5));
        assert_eq!(km_coefficient(84), r(7056, 1805));
        assert_eq!(km_coefficient(84), r(28224, 7220));
    }

    #[test]
    fn rsum_bounds() {
        let lo = Rational::integer(66);
        assert_eq!(rsum_bound(QRegime::Low, lo), r(27, 8));
        assert_eq!(rsum_bound(QRegime::Six, lo), r(23, 6));
        assert_eq!(rsum_bound(QRegime::High, lo), r(15, 2));
    }

    #[test]
    fn multisets_by_regime() {
        assert_eq!(enumerate_rx_multisets(r(27, 8)), vec![vec![2], vec![3], vec![2, 2]]);
        assert_eq!(
            enumerate_rx_multisets(r(23, 6)),
            vec![vec![2], vec![3], vec![4], vec![2, 2]]
        );
        let high = enumerate_rx_multisets(r(15, 2));
        let expected: Vec<Vec<u64>> = vec![
            vec![2], vec![3], vec![4], vec![5], vec![6], vec![7],
            vec![2, 2], vec![2, 3], vec![2, 4], vec![2, 5], vec![2, 6], vec![3, 3], vec![3, 4], vec![3, 5],
            vec![2, 2, 2], vec![2, 2, 3], vec![2, 2, 4], vec![2, 3, 3],
            vec![2, 2, 2, 2], vec![2, 2, 2, 3],
        ];
        assert_eq!(high, expected);
        assert!(enumerate_rx_multisets(Rational::ZERO).is_empty());
        assert!(enumerate_rx_multisets(r(3, 2)).is_empty());
    }

    #[test]
    fn baskets_for_multisets() {
        let show = |rx: &[u64]| -> Vec<String> {
            enumerate_baskets(rx).unwrap().iter().map(|b| b.to_string()).collect()
        };
        assert_eq!(show(&[5]), vec!["{(5,1)}", "{(5,2)}"]);
        assert_eq!(show(&[2]), vec!["{(2,1)}"]);
        assert_eq!(show(&[7]), vec!["{(7,1)}", "{(7,2)}", "{(7,3)}"]);
        assert_eq!(show(&[5, 5]), vec!["{(5,1),(5,1)}", "{(5,1),(5,2)}", "{(5,2),(5,2)}"]);
        assert_eq!(show(&[2, 5]), vec!["{(2,1),(5,1)}", "{(2,1),(5,2)}"]);
        assert!(enumerate_baskets(&[1]).is_err());
    }

    #[test]
    fn window_validation() {
        assert!(Window::new(Rational::integer(72), Rational::integer(66)).is_err());
        assert!(Window::new(Rational::integer(66), Rational::integer(66)).is_err());
    }

    #[test]
    fn low_table() {
        let t = build_case_table(QRegime::Low, Window::default()).unwrap();
        let rows: Vec<(String, u64, Rational, u64, Rational)> = t
            .rows()
            .map(|row| (format_multiset(&row.r_values()), row.r_x, row.rx_c2c1, row.rx_deg, row.slack))
            .collect();
        let expected = vec![
            ("{2}".to_string(), 2, Rational::integer(45), 133, r(55, 16)),
            ("{2}".to_string(), 2, Rational::integer(45), 137, r(35, 16)),
            ("{2}".to_string(), 2, Rational::integer(45), 141, r(15, 16)),
            ("{3}".to_string(), 3, Rational::integer(64), 200, r(3, 2)),
            ("{2,2}".to_string(), 2, Rational::integer(42), 134, r(1, 8)),
        ];
        assert_eq!(rows, expected);
    }

    #[test]
    fn six_table_has_a_none_group() {
        let t = build_case_table(QRegime::Six, Window::default()).unwrap();
        let four = t.groups.iter().find(|g| g.r_values == vec![4]).unwrap();
        assert!(four.is_none());
        assert_eq!(four.rx_c2c1, Rational::integer(81));
    }

    #[test]
    fn high_table_cuts_at_four_c2c1() {
        let t = build_case_table(QRegime::High, Window::default()).unwrap();
        let g = t.groups.iter().find(|g| g.r_values == vec![2, 5]).unwrap();
        let degs: Vec<u64> = g.rows.iter().map(|r| r.rx_deg).collect();
        assert_eq!(degs, vec![673, 677, 693, 697]);
        for row in t.rows() {
            assert!(Rational::from(row.rx_deg) < row.rx_c2c1 * Rational::integer(4));
        }
    }

    #[test]
    fn narrower_window_drops_rows() {
        let w = Window::new(Rational::integer(66), Rational::integer(70)).unwrap();
        let t = build_case_table(QRegime::Low, w).unwrap();
        let degs: Vec<u64> = t.rows().map(|r| r.rx_deg).collect();
        assert_eq!(degs, vec![133, 137, 200, 134]);
    }

    #[test]
    fn row_keys() {
        let t = build_case_table(QRegime::Low, Window::default()).unwrap();
        let keys: Vec<String> = t.rows().map(SieveRow::key).collect();
        assert_eq!(keys[4], "RX={2,2};deg=134");
    }
}
