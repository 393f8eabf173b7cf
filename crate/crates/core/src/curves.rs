//! Curves of Du Val singularities in the singular locus, and the two
//! exclusion arguments built on them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_rational_square, lcm_list, Rational};
use crate::basket::{h0_from_degree, Basket};
use crate::error::{invalid, Error, Result};
use crate::filters::{FilterConstants, SurvivorRow};
use crate::sieve::{km_slack, SieveRow};

/// Transversal Du Val type of a singular curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DuValKind {
    A(u32),
    D(u32),
    E(u32),
}

impl fmt::Display for DuValKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DuValKind::A(n) => write!(f, "A{n}"),
            DuValKind::D(m) => write!(f, "D{m}"),
            DuValKind::E(k) => write!(f, "E{k}"),
        }
    }
}

/// `e`: exceptional curve count plus one; `g`: order of the local
/// fundamental group; `j`: order of the local class group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveType {
    pub kind: DuValKind,
    pub e: u64,
    pub g: u64,
    pub j: u64,
}

impl CurveType {
    /// `e - 1/g`, the contribution per unit of `r_X·c1·C`.
    pub fn weight(&self) -> Rational {
        Rational::from(self.e) - Rational::frac(1, self.g as i128)
    }

    /// `j - 1/j`
    pub fn ja_weight(&self) -> Rational {
        Rational::from(self.j) - Rational::frac(1, self.j as i128)
    }
}

pub fn curve_type_data(kind: DuValKind) -> Result<CurveType> {
    let (e, g, j) = match kind {
        DuValKind::A(n) if n >= 1 => {
            let n = n as u64;
            (n + 1, n + 1, n + 1)
        }
        DuValKind::D(m) if m >= 4 => {
            let m = m as u64;
            (m + 1, 4 * m - 8, 4)
        }
        DuValKind::E(6) => (7, 24, 3),
        DuValKind::E(7) => (8, 48, 2),
        DuValKind::E(8) => (9, 120, 1),
        other => return Err(invalid(format!("no Du Val type {other}"))),
    };
    Ok(CurveType { kind, e, g, j })
}

/// Multiset of `(type, r_X·c1·C)` entries, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveConfig {
    pub entries: Vec<(CurveType, u64)>,
}

impl CurveConfig {
    pub fn new(mut entries: Vec<(CurveType, u64)>) -> Self {
        entries.sort();
        CurveConfig { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ (e - 1/g)·degree`
    pub fn weight(&self) -> Rational {
        self.entries
            .iter()
            .map(|(t, d)| t.weight() * Rational::from(*d))
            .sum()
    }

    /// `Σ (j - 1/j)·degree`
    pub fn ja_weight(&self) -> Rational {
        self.entries
            .iter()
            .map(|(t, d)| t.ja_weight() * Rational::from(*d))
            .sum()
    }

    pub fn lcm_j(&self) -> Result<u64> {
        let js: Vec<u64> = self.entries.iter().map(|(t, _)| t.j).collect();
        if js.is_empty() {
            Ok(1)
        } else {
            lcm_list(&js)
        }
    }
}

impl fmt::Display for CurveConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(t, d)| format!("({},{d})", t.kind))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Right-hand side of the singular-curve inequality; equals the `J_A` bound.
pub fn curve_bound(row: &SieveRow, q: u64) -> Result<Rational> {
    if q == 0 {
        return Err(invalid("q must be positive"));
    }
    Ok(km_slack(row.rx_c2c1, row.rx_deg, q))
}

/// Every curve type whose unit weight is at most `bound`.
pub fn curve_types_within(bound: Rational) -> Vec<CurveType> {
    let mut out = Vec::new();
    for n in 1.. {
        let t = curve_type_data(DuValKind::A(n)).expect("valid A type");
        if t.weight() > bound {
            break;
        }
        out.push(t);
    }
    for m in 4.. {
        let t = curve_type_data(DuValKind::D(m)).expect("valid D type");
        if t.weight() > bound {
            break;
        }
        out.push(t);
    }
    for k in [6, 7, 8] {
        let t = curve_type_data(DuValKind::E(k)).expect("valid E type");
        if t.weight() <= bound {
            out.push(t);
        }
    }
    out
}

/// All configurations with `Σ (e - 1/g)·degree <= bound`, optionally
/// requiring `lcm_divisor | lcm(j)` and a non-empty configuration. Sorted.
pub fn curve_config_search(
    bound: Rational,
    lcm_divisor: Option<u64>,
    require_nonempty: bool,
) -> Result<Vec<CurveConfig>> {
    if bound.is_negative() {
        return Err(invalid(format!("negative bound {bound}")));
    }
    if lcm_divisor == Some(0) {
        return Err(invalid("lcm divisor must be positive"));
    }
    let mut atoms: Vec<(CurveType, u64, Rational)> = Vec::new();
    for t in curve_types_within(bound) {
        let w = t.weight();
        let mut d = 1u64;
        while w * Rational::from(d) <= bound {
            atoms.push((t, d, w * Rational::from(d)));
            d += 1;
        }
    }

    fn walk(
        atoms: &[(CurveType, u64, Rational)],
        start: usize,
        remaining: Rational,
        current: &mut Vec<(CurveType, u64)>,
        out: &mut Vec<CurveConfig>,
    ) {
        out.push(CurveConfig::new(current.clone()));
        for (i, &(t, d, w)) in atoms.iter().enumerate().skip(start) {
            if w <= remaining {
                current.push((t, d));
                walk(atoms, i, remaining - w, current, out);
                current.pop();
            }
        }
    }
    let mut all = Vec::new();
    walk(&atoms, 0, bound, &mut Vec::new(), &mut all);

    let mut out = Vec::new();
    for config in all {
        if require_nonempty && config.is_empty() {
            continue;
        }
        if let Some(ja) = lcm_divisor {
            if config.lcm_j()? % ja != 0 {
                continue;
            }
        }
        out.push(config);
    }
    out.sort();
    Ok(out)
}

/// Possible values of `D̄²·K_Y` for a torsion divisor, over all choices of
/// local indices at the basket points.
pub fn torsion_square_values(basket: &Basket) -> Result<BTreeSet<Rational>> {
    const LIMIT: u64 = 1 << 20;
    if basket.is_empty() {
        return Err(invalid("empty basket"));
    }
    let mut sums: BTreeSet<Rational> = BTreeSet::from([Rational::ZERO]);
    let mut choices = 1u64;
    for p in basket.points() {
        let (r, b) = (p.r(), p.b());
        choices = choices.saturating_mul(r);
        if choices > LIMIT {
            return Err(invalid(format!("too many local index choices for {basket}")));
        }
        let contributions: BTreeSet<Rational> = (0..r)
            .map(|i| {
                let m = (i * b) % r;
                Rational::frac((m * (r - m)) as i128, 2 * r as i128)
            })
            .collect();
        sums = sums
            .iter()
            .flat_map(|s| contributions.iter().map(move |c| *s + *c))
            .collect();
    }
    Ok(sums
        .into_iter()
        .map(|s| Rational::integer(4) - Rational::integer(2) * s)
        .collect())
}

/// Self-intersection constant `E₀²·f*K_X` of the crepant divisor over an `A1` curve.
pub fn crepant_constant() -> Rational {
    Rational::frac(2, 3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Excluded,
    Inconclusive,
}

/// Quotients `v / constant` and whether none of them is a rational square.
pub fn decide_torsion_values(
    values: &BTreeSet<Rational>,
    constant: Rational,
) -> Result<(Vec<Rational>, Verdict)> {
    let quotients = values
        .iter()
        .map(|v| v.checked_div(constant))
        .collect::<Result<Vec<_>>>()?;
    let mut any_square = false;
    for q in &quotients {
        any_square |= is_rational_square(*q)?;
    }
    let verdict = if any_square {
        Verdict::Inconclusive
    } else {
        Verdict::Excluded
    };
    Ok((quotients, verdict))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionRecord {
    pub q: u64,
    pub q_hat: u64,
    pub bound: Rational,
    pub configs: Vec<CurveConfig>,
    pub values: Vec<Rational>,
    pub quotients: Vec<Rational>,
    pub verdict: Verdict,
}

/// Rules out `q ≠ q̂` on the basket `{(3,1)}` at `r_X·c1³ = 200`.
pub fn torsion_exclusion(row: &SieveRow, q: u64, q_hat: u64) -> Result<TorsionRecord> {
    let expected = Basket::from_pairs(&[(3, 1)])?;
    if q == q_hat {
        return Err(Error::Precondition(format!("q = q_hat = {q}")));
    }
    if row.basket != expected || row.rx_deg != 200 {
        return Err(Error::Precondition(format!(
            "torsion exclusion applies to {expected} at r_X*deg = 200, got {} at {}",
            row.basket, row.rx_deg
        )));
    }
    let bound = curve_bound(row, q)?;
    let configs = curve_config_search(bound, None, true)?;
    let a1 = CurveConfig::new(vec![(curve_type_data(DuValKind::A(1))?, 1)]);
    let values = torsion_square_values(&row.basket)?;
    let (quotients, square_verdict) = decide_torsion_values(&values, crepant_constant())?;
    let verdict = if configs == [a1] {
        square_verdict
    } else {
        Verdict::Inconclusive
    };
    Ok(TorsionRecord {
        q,
        q_hat,
        bound,
        configs,
        values: values.into_iter().collect(),
        quotients,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub witness: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub bound: Rational,
    pub config: CurveConfig,
    pub h0: u64,
    pub reduced_index: u64,
    pub gorenstein_degrees: Vec<u64>,
    pub terminal_index_bound: u64,
    pub checks: Vec<SubCheck>,
}

/// Audits the exclusion of the `{(5,2)}` survivor of index 84. A failing
/// sub-check is an error since the classification would change.
pub fn curve_exclusion_audit(row: &SurvivorRow, consts: &FilterConstants) -> Result<CurveRecord> {
    let ja = match row.ja_values().as_slice() {
        [ja] => *ja,
        other => return Err(Error::Precondition(format!("expected one J_A, got {other:?}"))),
    };
    if row.q != row.q_hat {
        return Err(Error::Precondition(format!("q = {} != q_hat = {}", row.q, row.q_hat)));
    }
    let sieve_row = SieveRow::new(row.basket.clone(), row.rx_deg, Rational::ZERO)?;
    let mut checks = Vec::new();
    let mut check = |name: &str, witness: String, passed: bool| {
        checks.push(SubCheck {
            name: name.to_string(),
            witness,
            passed,
        });
    };

    let bound = curve_bound(&sieve_row, row.q)?;
    check("curve_bound", format!("{bound}"), bound == Rational::frac(211, 21));

    let configs = curve_config_search(bound, Some(ja), true)?;
    let config = match configs.as_slice() {
        [c] => c.clone(),
        _ => {
            let listed: Vec<String> = configs.iter().map(ToString::to_string).collect();
            return Err(Error::SubCheckFailed(format!(
                "expected a unique curve configuration, got [{}]",
                listed.join(", ")
            )));
        }
    };
    check("unique_configuration", config.to_string(), config.weight() <= bound);

    let h0 = h0_from_degree(row.degree, &row.basket)
        .ok_or_else(|| Error::SubCheckFailed(format!("no integral h0 at degree {}", row.degree)))?;
    check("h0", h0.to_string(), h0 == 36);

    // resolving the curve with the smallest class-group order divides the index by it
    let j_min = config
        .entries
        .iter()
        .map(|(t, _)| t.j)
        .filter(|j| row.q.is_multiple_of(*j) && *j > 1)
        .min()
        .ok_or_else(|| Error::SubCheckFailed(format!("no curve of {config} divides q")))?;
    let reduced_index = row.q / j_min;
    let cap = consts
        .picard_one_bound
        .to_integer()
        .ok_or_else(|| Error::SubCheckFailed("Picard-one bound is not an integer".into()))?;
    let low = 2 * h0 as i128 - 6;
    let gorenstein_degrees: Vec<u64> = (low..=cap)
        .filter(|c| c % 2 == 0)
        .map(|c| c as u64)
        .collect();
    let divisible: Vec<u64> = gorenstein_degrees
        .iter()
        .copied()
        .filter(|c| c % reduced_index == 0)
        .collect();
    check(
        "gorenstein_escape",
        format!("{reduced_index} divides none of {gorenstein_degrees:?}"),
        !gorenstein_degrees.is_empty() && divisible.is_empty(),
    );
    check(
        "terminal_escape",
        format!("{} > {}", row.q, consts.terminal_index_bound),
        row.q > consts.terminal_index_bound,
    );

    if let Some(failed) = checks.iter().find(|c| !c.passed) {
        return Err(Error::SubCheckFailed(format!("{}: {}", failed.name, failed.witness)));
    }
    Ok(CurveRecord {
        bound,
        config,
        h0,
        reduced_index,
        gorenstein_degrees,
        terminal_index_bound: consts.terminal_index_bound,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use std::collections::BTreeMap;

    fn t(kind: DuValKind) -> CurveType {
        curve_type_data(kind).unwrap()
    }

    #[test]
    fn table_data() {
        let a2 = t(DuValKind::A(2));
        assert_eq!((a2.e, a2.g, a2.j), (3, 3, 3));
        let d4 = t(DuValKind::D(4));
        assert_eq!((d4.e, d4.g, d4.j), (5, 8, 4));
        let e8 = t(DuValKind::E(8));
        assert_eq!((e8.e, e8.g, e8.j), (9, 120, 1));
        assert!(curve_type_data(DuValKind::D(3)).is_err());
        assert!(curve_type_data(DuValKind::E(5)).is_err());
        assert!(curve_type_data(DuValKind::A(0)).is_err());
    }

    #[test]
    fn inequality_chain_is_termwise() {
        let kinds = (1..=50)
            .map(DuValKind::A)
            .chain((4..=50).map(DuValKind::D))
            .chain([6, 7, 8].map(DuValKind::E));
        for kind in kinds {
            let c = t(kind);
            assert!(c.j <= c.e && c.g >= c.j, "{kind}");
            assert!(c.ja_weight() <= c.weight(), "{kind}");
        }
    }

    #[test]
    fn searches() {
        let a2a6 = CurveConfig::new(vec![(t(DuValKind::A(2)), 1), (t(DuValKind::A(6)), 1)]);
        assert_eq!(curve_config_search(Rational::frac(211, 21), Some(21), true).unwrap(), vec![a2a6.clone()]);
        assert_eq!(a2a6.weight(), Rational::frac(200, 21));
        let a1 = CurveConfig::new(vec![(t(DuValKind::A(1)), 1)]);
        assert_eq!(curve_config_search(Rational::frac(3, 2), None, true).unwrap(), vec![a1]);
        assert_eq!(
            curve_config_search(Rational::ONE, None, false).unwrap(),
            vec![CurveConfig::new(vec![])]
        );
        assert!(curve_config_search(Rational::ONE, None, true).unwrap().is_empty());
        assert!(curve_config_search(Rational::integer(-1), None, false).is_err());
    }

    /// Number of multisets of atoms with total weight at most `bound`,
    /// computed by a sparse knapsack over exact sums.
    fn count_by_knapsack(bound: Rational) -> usize {
        let mut types = Vec::new();
        for n in 1..=40 {
            types.push(t(DuValKind::A(n)));
        }
        for m in 4..=40 {
            types.push(t(DuValKind::D(m)));
        }
        for k in [6, 7, 8] {
            types.push(t(DuValKind::E(k)));
        }
        let mut atoms = Vec::new();
        for ty in types {
            for d in 1..=20u64 {
                let w = ty.weight() * Rational::from(d);
                if w <= bound {
                    atoms.push(w);
                }
            }
        }
        let mut counts: BTreeMap<Rational, usize> = BTreeMap::from([(Rational::ZERO, 1)]);
        for w in atoms {
            let mut next = counts.clone();
            for (&s, &c) in &counts {
                let mut total = s + w;
                while total <= bound {
                    *next.entry(total).or_default() += c;
                    total += w;
                }
            }
            counts = next;
        }
        counts.values().sum()
    }

    #[test]
    fn search_is_complete_against_knapsack_count() {
        for twice in 0..=24 {
            let bound = Rational::frac(twice, 2);
            let found = curve_config_search(bound, None, false).unwrap();
            assert_eq!(found.len(), count_by_knapsack(bound), "bound {bound}");
        }
    }

    #[test]
    fn search_matches_listing_for_small_bounds() {
        for twice in 0..=12 {
            let bound = Rational::frac(twice, 2);
            let atoms: Vec<(CurveType, u64)> = [
                DuValKind::A(1), DuValKind::A(2), DuValKind::A(3), DuValKind::A(4), DuValKind::A(5),
                DuValKind::A(6), DuValKind::D(4), DuValKind::D(5), DuValKind::E(6), DuValKind::E(7),
            ]
            .into_iter()
            .flat_map(|k| (1..=4u64).map(move |d| (t(k), d)))
            .collect();
            let mut expected: BTreeSet<CurveConfig> = BTreeSet::new();
            for size in 0..=4 {
                for combo in atoms.iter().copied().combinations_with_replacement(size) {
                    let config = CurveConfig::new(combo);
                    if config.weight() <= bound {
                        expected.insert(config);
                    }
                }
            }
            let found: BTreeSet<CurveConfig> =
                curve_config_search(bound, None, false).unwrap().into_iter().collect();
            assert_eq!(found, expected, "bound {bound}");
        }
    }

    #[test]
    fn torsion_values() {
        let b = Basket::from_pairs(&[(3, 1)]).unwrap();
        let v: Vec<Rational> = torsion_square_values(&b).unwrap().into_iter().collect();
        assert_eq!(v, vec![Rational::frac(10, 3), Rational::integer(4)]);
        let b = Basket::from_pairs(&[(2, 1)]).unwrap();
        let v: Vec<Rational> = torsion_square_values(&b).unwrap().into_iter().collect();
        assert_eq!(v, vec![Rational::frac(7, 2), Rational::integer(4)]);
        assert!(torsion_square_values(&Basket::empty()).is_err());
    }

    #[test]
    fn torsion_values_contain_four_and_are_symmetric() {
        for (r, b) in [(5, 2), (7, 3), (4, 1), (6, 1)] {
            let basket = Basket::from_pairs(&[(r, b)]).unwrap();
            let values = torsion_square_values(&basket).unwrap();
            assert!(values.contains(&Rational::integer(4)));
            for i in 0..r {
                let m = (i * b) % r;
                let mirror = ((r - i) % r * b) % r;
                assert_eq!(m * (r - m), mirror * (r - mirror));
            }
        }
    }

    #[test]
    fn square_decision() {
        let values = BTreeSet::from([Rational::frac(10, 3), Rational::integer(4)]);
        let (quotients, verdict) = decide_torsion_values(&values, crepant_constant()).unwrap();
        assert_eq!(quotients, vec![Rational::integer(5), Rational::integer(6)]);
        assert_eq!(verdict, Verdict::Excluded);
        let values = BTreeSet::from([Rational::frac(8, 3)]);
        let (_, verdict) = decide_torsion_values(&values, crepant_constant()).unwrap();
        assert_eq!(verdict, Verdict::Inconclusive);
    }

    #[test]
    fn torsion_exclusion_preconditions() {
        let basket = Basket::from_pairs(&[(3, 1)]).unwrap();
        let row = SieveRow::new(basket, 200, Rational::frac(5, 16)).unwrap();
        let rec = torsion_exclusion(&row, 4, 2).unwrap();
        assert_eq!(rec.bound, Rational::frac(3, 2));
        assert_eq!(rec.verdict, Verdict::Excluded);
        assert!(torsion_exclusion(&row, 4, 4).is_err());
        let other = SieveRow::new(Basket::from_pairs(&[(2, 1)]).unwrap(), 133, Rational::ZERO).unwrap();
        assert!(torsion_exclusion(&other, 2, 1).is_err());
    }

    #[test]
    fn curve_bound_examples() {
        let row = SieveRow::new(Basket::from_pairs(&[(5, 2)]).unwrap(), 336, Rational::ZERO).unwrap();
        assert_eq!(curve_bound(&row, 84).unwrap(), Rational::frac(211, 21));
        let row = SieveRow::new(Basket::from_pairs(&[(2, 1)]).unwrap(), 141, Rational::ZERO).unwrap();
        assert_eq!(curve_bound(&row, 1).unwrap(), Rational::frac(15, 16));
    }
}
