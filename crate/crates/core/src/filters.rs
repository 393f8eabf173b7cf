//! Fano-index filters over the candidate tables.
//!
//! Each candidate is a sieve row together with a guess for the Q-Fano index
//! `q`, the Weil index `q̂` and the codimension-two Cartier index `J_A`. A case
//! analysis stage generates candidates and runs an ordered list of [`Check`]s;
//! the first failing check names the exclusion reason. The survivors of all
//! stages, merged by `(basket, degree, q, q̂)`, form the survivor table.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factorize, square_divisors, Rational};
use crate::basket::Basket;
use crate::error::{invalid, Result};
use crate::sieve::{build_case_table, km_slack, CaseTable, QRegime, SieveRow, Window};

/// Bounds quoted from external classification results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterConstants {
    /// Degree bound for canonical weak Fano threefolds.
    pub weak_fano_bound: Rational,
    /// Degree bound for Q-factorial canonical Fano threefolds of Picard number one.
    pub picard_one_bound: Rational,
    /// Weil index bound for non-Gorenstein terminal Fano threefolds of Picard number one.
    pub terminal_index_bound: u64,
}

impl Default for FilterConstants {
    fn default() -> Self {
        FilterConstants {
            weak_fano_bound: Rational::integer(324),
            picard_one_bound: Rational::integer(72),
            terminal_index_bound: 19,
        }
    }
}

impl FilterConstants {
    pub fn validate(&self) -> Result<()> {
        if !self.weak_fano_bound.is_positive()
            || !self.picard_one_bound.is_positive()
            || self.terminal_index_bound == 0
        {
            return Err(invalid("filter constants must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Reason {
    #[serde(rename = "RR-INTEGRALITY")]
    RrIntegrality,
    #[serde(rename = "KM-BOUND")]
    KmBound,
    #[serde(rename = "THM25-1")]
    Integrality,
    #[serde(rename = "QHAT-DIV")]
    QhatDivisibility,
    #[serde(rename = "JA-BOUND-24")]
    JaBound,
    #[serde(rename = "JA-BOUND-25")]
    JaBoundStrict,
    #[serde(rename = "LEMMA-210")]
    Stability,
    #[serde(rename = "TORSION-324")]
    TorsionCover,
    #[serde(rename = "TORSION-Q7")]
    TorsionHighIndex,
    #[serde(rename = "CURVE-PROP41")]
    CurveConfiguration,
    #[serde(rename = "TORSION-PROP42")]
    TorsionIrrational,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::RrIntegrality => "RR-INTEGRALITY",
            Reason::KmBound => "KM-BOUND",
            Reason::Integrality => "THM25-1",
            Reason::QhatDivisibility => "QHAT-DIV",
            Reason::JaBound => "JA-BOUND-24",
            Reason::JaBoundStrict => "JA-BOUND-25",
            Reason::Stability => "LEMMA-210",
            Reason::TorsionCover => "TORSION-324",
            Reason::TorsionHighIndex => "TORSION-Q7",
            Reason::CurveConfiguration => "CURVE-PROP41",
            Reason::TorsionIrrational => "TORSION-PROP42",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Survivor,
    Excluded(Reason),
}

impl Status {
    pub fn is_survivor(self) -> bool {
        self == Status::Survivor
    }

    pub fn reason(self) -> Option<Reason> {
        match self {
            Status::Survivor => None,
            Status::Excluded(r) => Some(r),
        }
    }
}

/// Sub-case of the index case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    /// `q <= 5`, `q ≠ q̂`
    LowTorsion,
    /// `q <= 5`, `q = q̂ = J_A`
    LowEqual,
    /// `q <= 5`, `q = q̂`, `J_A ≠ q`
    LowSquare,
    /// `q = 6`, `q ≠ q̂`
    SixTorsion,
    /// `q = q̂ = 6`
    SixEqual,
    /// `q >= 7`, `q = q̂ = J_A`
    HighEqual,
    /// `q >= 7`, `q = q̂`, `J_A ≠ q`
    HighSquare,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::LowTorsion,
        Stage::LowEqual,
        Stage::LowSquare,
        Stage::SixTorsion,
        Stage::SixEqual,
        Stage::HighEqual,
        Stage::HighSquare,
    ];

    pub fn regime(self) -> QRegime {
        match self {
            Stage::LowTorsion | Stage::LowEqual | Stage::LowSquare => QRegime::Low,
            Stage::SixTorsion | Stage::SixEqual => QRegime::Six,
            Stage::HighEqual | Stage::HighSquare => QRegime::High,
        }
    }

    /// The default check order of a stage.
    pub fn checks(self) -> Vec<Check> {
        use Check::*;
        match self {
            Stage::LowTorsion => vec![QhatDivides, Integrality, TorsionCover],
            Stage::LowEqual => vec![QhatDivides, JaBound, Stability],
            Stage::LowSquare => vec![QhatDivides, Integrality, JaBound, Stability],
            // the torsion cover rules out q̂ = 1 before integrality is consulted
            Stage::SixTorsion => vec![QhatDivides, TorsionCover, Integrality],
            Stage::SixEqual => vec![QhatDivides, Integrality, JaBound],
            Stage::HighEqual => vec![QhatDivides, TorsionHighIndex, JaBoundStrict, JaBound],
            Stage::HighSquare => vec![
                QhatDivides,
                Integrality,
                TorsionHighIndex,
                JaBoundStrict,
                JaBound,
            ],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::LowTorsion => "q<=5, q!=q_hat",
            Stage::LowEqual => "q<=5, q=q_hat=J_A",
            Stage::LowSquare => "q<=5, q=q_hat, J_A!=q",
            Stage::SixTorsion => "q=6, q!=q_hat",
            Stage::SixEqual => "q=q_hat=6",
            Stage::HighEqual => "q>=7, q=q_hat=J_A",
            Stage::HighSquare => "q>=7, q=q_hat, J_A!=q",
        })
    }
}

/// A candidate `(row, q, q̂, J_A)` with its verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedCase {
    pub stage: Stage,
    pub row: SieveRow,
    pub q: u64,
    pub q_hat: u64,
    pub ja: u64,
    #[serde(flatten)]
    pub status: Status,
}

impl IndexedCase {
    fn pending(stage: Stage, row: &SieveRow, q: u64, q_hat: u64, ja: u64) -> Self {
        IndexedCase {
            stage,
            row: row.clone(),
            q,
            q_hat,
            ja,
            status: Status::Survivor,
        }
    }
}

/// One filter rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Check {
    /// `q̂ | r_X·c1³` and `q̂ | q`.
    QhatDivides,
    /// `q² | J_A·r_X·c1³`.
    Integrality,
    /// Index-one cover degree bound, `q ≠ q̂` only.
    TorsionCover,
    /// Torsion for `q >= 7` forces a degree above the Picard-one bound.
    TorsionHighIndex,
    /// `J_A` prime-power sum against the `q`-dependent slack.
    JaBound,
    /// `J_A` prime-power sum strictly below `r_X·c2c1 - r_X·c1³/4`.
    JaBoundStrict,
    /// `c1³ <= 3·c2·c1` when `q = 1`.
    Stability,
}

impl Check {
    pub fn evaluate(self, case: &IndexedCase, consts: &FilterConstants) -> Result<Option<Reason>> {
        let row = &case.row;
        let failed = match self {
            Check::QhatDivides => {
                (!row.rx_deg.is_multiple_of(case.q_hat) || !case.q.is_multiple_of(case.q_hat))
                    .then_some(Reason::QhatDivisibility)
            }
            Check::Integrality => (!index_integrality(case.ja, row.rx_deg, case.q))
                .then_some(Reason::Integrality),
            Check::TorsionCover => {
                if case.q == case.q_hat {
                    None
                } else {
                    torsion_cover_filter(case, consts)?.reason()
                }
            }
            Check::TorsionHighIndex => {
                if case.q < 7 {
                    None
                } else {
                    high_index_torsion_filter(case, consts)?.reason()
                }
            }
            Check::JaBound => {
                (prime_power_sum(case.ja)? > ja_bound(row, case.q)).then_some(Reason::JaBound)
            }
            Check::JaBoundStrict => {
                let quarter = row.rx_c2c1 - Rational::frac(1, 4) * Rational::from(row.rx_deg);
                (prime_power_sum(case.ja)? >= quarter).then_some(Reason::JaBoundStrict)
            }
            Check::Stability => {
                if case.q == 1 {
                    stability_filter(row).reason()
                } else {
                    None
                }
            }
        };
        Ok(failed)
    }
}

/// `Σ (p^a - 1/p^a)` over the prime-power components of `j`.
pub fn prime_power_sum(j: u64) -> Result<Rational> {
    Ok(factorize(j)?
        .prime_powers()
        .map(|pa| Rational::from(pa) - Rational::frac(1, pa as i128))
        .sum())
}

/// Upper bound on the `J_A` prime-power sum for a given `q`.
pub fn ja_bound(row: &SieveRow, q: u64) -> Rational {
    km_slack(row.rx_c2c1, row.rx_deg, q)
}

/// `q² | J_A·r_X·c1³`
pub fn index_integrality(ja: u64, rx_deg: u64, q: u64) -> bool {
    (ja as u128 * rx_deg as u128).is_multiple_of(q as u128 * q as u128)
}

/// A torsion element of order `q/q̂` yields an index-one cover of degree
/// `(q/q̂)·c1³`; excluded when that exceeds the weak Fano bound.
pub fn torsion_cover_filter(case: &IndexedCase, consts: &FilterConstants) -> Result<Status> {
    if case.q == case.q_hat {
        return Err(invalid("torsion cover filter needs q != q_hat"));
    }
    if case.q_hat == 0 || !case.q.is_multiple_of(case.q_hat) {
        return Err(invalid(format!("q_hat = {} does not divide q = {}", case.q_hat, case.q)));
    }
    let order = Rational::from(case.q / case.q_hat);
    Ok(if order * case.row.degree() > consts.weak_fano_bound {
        Status::Excluded(Reason::TorsionCover)
    } else {
        Status::Survivor
    })
}

/// For `q >= 7`, `s`-torsion produces a Picard-one Fano of degree at least
/// `s·c1³`; with `s >= 2` and `c1³` in the window that exceeds the bound.
pub fn high_index_torsion_filter(case: &IndexedCase, consts: &FilterConstants) -> Result<Status> {
    if case.q < 7 {
        return Err(invalid(format!("high-index torsion filter needs q >= 7, got {}", case.q)));
    }
    if case.q == case.q_hat {
        return Ok(Status::Survivor);
    }
    if case.q_hat == 0 || !case.q.is_multiple_of(case.q_hat) {
        return Err(invalid(format!("q_hat = {} does not divide q = {}", case.q_hat, case.q)));
    }
    let order = Rational::from(case.q / case.q_hat);
    Ok(if order * case.row.degree() > consts.picard_one_bound {
        Status::Excluded(Reason::TorsionHighIndex)
    } else {
        Status::Survivor
    })
}

/// `c1³ <= 3·c2·c1` for `q = 1`.
pub fn stability_filter(row: &SieveRow) -> Status {
    if Rational::from(row.rx_deg) > Rational::integer(3) * row.rx_c2c1 {
        Status::Excluded(Reason::Stability)
    } else {
        Status::Survivor
    }
}

/// Pairs `(q, J_A)` with `d = q/J_A > 1`, `d² | deg`, `J_A | deg/d²` and
/// `q_min <= q <= q_max`, ordered by `d` then `J_A`.
pub fn square_factor_pairs(rx_deg: u64, q_min: u64, q_max: Option<u64>) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for d in square_divisors(rx_deg).into_iter().filter(|&d| d > 1) {
        for ja in divisors(rx_deg / (d * d)) {
            let q = ja * d;
            if q >= q_min && q_max.is_none_or(|m| q <= m) {
                out.push((q, ja));
            }
        }
    }
    out
}

/// Every `J >= 1` whose prime-power sum is at most `bound` (below `bound` when
/// `strict`), ascending.
pub fn ja_candidates(bound: Rational, strict: bool) -> Vec<u64> {
    fn fits(value: Rational, bound: Rational, strict: bool) -> bool {
        if strict {
            value < bound
        } else {
            value <= bound
        }
    }
    fn is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }
    fn extend(
        primes: &[u64],
        start: usize,
        value: u64,
        used: Rational,
        bound: Rational,
        strict: bool,
        out: &mut Vec<u64>,
    ) {
        for (i, &p) in primes.iter().enumerate().skip(start) {
            let mut pa = p;
            loop {
                let total = used + Rational::from(pa) - Rational::frac(1, pa as i128);
                if !fits(total, bound, strict) {
                    break;
                }
                out.push(value * pa);
                extend(primes, i + 1, value * pa, total, bound, strict, out);
                pa *= p;
            }
        }
    }
    if !fits(Rational::ZERO, bound, strict) {
        return Vec::new();
    }
    // a component p^a satisfies p^a - 1/p^a <= bound, hence p <= bound + 1
    let limit = bound.floor().max(0) as u64 + 1;
    let primes: Vec<u64> = (2..=limit).filter(|&n| is_prime(n)).collect();
    let mut out = vec![1];
    extend(&primes, 0, 1, Rational::ZERO, bound, strict, &mut out);
    out.sort_unstable();
    out
}

/// One merged survivor: all `J_A` values for a fixed `(basket, degree, q, q̂)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivorRow {
    pub basket: Basket,
    pub degree: Rational,
    pub r_x: u64,
    pub c2c1: Rational,
    pub rx_deg: u64,
    pub rx_c2c1: Rational,
    pub q: u64,
    pub q_hat: u64,
    /// `J_A` values, descending, each with the stage that produced it.
    pub ja: Vec<JaSource>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JaSource {
    pub ja: u64,
    pub stage: Stage,
}

impl SurvivorRow {
    pub fn ja_values(&self) -> Vec<u64> {
        self.ja.iter().map(|s| s.ja).collect()
    }

    pub fn key(&self) -> String {
        format!("deg={};B={};q={};q_hat={}", self.degree, self.basket, self.q, self.q_hat)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseAnalysis {
    pub window: Window,
    pub constants: FilterConstants,
    pub low: CaseTable,
    pub six: CaseTable,
    pub high: CaseTable,
    pub cases: Vec<IndexedCase>,
    pub table2: Vec<SurvivorRow>,
}

impl CaseAnalysis {
    pub fn table(&self, regime: QRegime) -> &CaseTable {
        match regime {
            QRegime::Low => &self.low,
            QRegime::Six => &self.six,
            QRegime::High => &self.high,
        }
    }

    pub fn cases_in(&self, stage: Stage) -> impl Iterator<Item = &IndexedCase> {
        self.cases.iter().filter(move |c| c.stage == stage)
    }

    pub fn survivors(&self) -> impl Iterator<Item = &IndexedCase> {
        self.cases.iter().filter(|c| c.status.is_survivor())
    }
}

fn generate(stage: Stage, table: &CaseTable) -> Result<Vec<IndexedCase>> {
    let mut out = Vec::new();
    for row in table.rows() {
        match stage {
            Stage::LowTorsion => {
                let mut pairs: Vec<(u64, u64)> = (2..=5u64)
                    .flat_map(|q| divisors(q).into_iter().filter(move |&h| h < q).map(move |h| (h, q)))
                    .collect();
                pairs.sort_unstable();
                for (q_hat, q) in pairs {
                    for ja in ja_candidates(ja_bound(row, q), false) {
                        out.push(IndexedCase::pending(stage, row, q, q_hat, ja));
                    }
                }
            }
            Stage::LowEqual => {
                for q in 1..=5 {
                    out.push(IndexedCase::pending(stage, row, q, q, q));
                }
            }
            Stage::LowSquare => {
                for (q, ja) in square_factor_pairs(row.rx_deg, 1, Some(5)) {
                    out.push(IndexedCase::pending(stage, row, q, q, ja));
                }
            }
            Stage::SixTorsion => {
                for q_hat in [1, 2, 3] {
                    for ja in ja_candidates(ja_bound(row, 6), false) {
                        out.push(IndexedCase::pending(stage, row, 6, q_hat, ja));
                    }
                }
            }
            Stage::SixEqual => {
                for ja in divisors(6) {
                    out.push(IndexedCase::pending(stage, row, 6, 6, ja));
                }
            }
            Stage::HighEqual => {
                for q in divisors(row.rx_deg).into_iter().filter(|&q| q >= 7) {
                    out.push(IndexedCase::pending(stage, row, q, q, q));
                }
            }
            Stage::HighSquare => {
                for (q, ja) in square_factor_pairs(row.rx_deg, 7, None) {
                    out.push(IndexedCase::pending(stage, row, q, q, ja));
                }
            }
        }
    }
    Ok(out)
}

/// Runs the full case analysis with the default check order.
pub fn run_case_analysis(window: Window, consts: FilterConstants) -> Result<CaseAnalysis> {
    run_case_analysis_with(window, consts, |_, _| {})
}

/// Runs the case analysis after letting `reorder` permute each stage's checks.
pub fn run_case_analysis_with<F>(window: Window, consts: FilterConstants, reorder: F) -> Result<CaseAnalysis>
where
    F: Fn(Stage, &mut Vec<Check>),
{
    consts.validate()?;
    let low = build_case_table(QRegime::Low, window)?;
    let six = build_case_table(QRegime::Six, window)?;
    let high = build_case_table(QRegime::High, window)?;

    let mut cases = Vec::new();
    for stage in Stage::ALL {
        let table = match stage.regime() {
            QRegime::Low => &low,
            QRegime::Six => &six,
            QRegime::High => &high,
        };
        let mut checks = stage.checks();
        reorder(stage, &mut checks);
        for mut case in generate(stage, table)? {
            for check in &checks {
                if let Some(reason) = check.evaluate(&case, &consts)? {
                    case.status = Status::Excluded(reason);
                    break;
                }
            }
            cases.push(case);
        }
    }

    let table2 = merge_survivors(cases.iter().filter(|c| c.status.is_survivor()));
    Ok(CaseAnalysis {
        window,
        constants: consts,
        low,
        six,
        high,
        cases,
        table2,
    })
}

/// Groups survivors by `(basket, degree, q, q̂)`; rows are ordered by degree,
/// then `q`, then `q̂`, all descending.
pub fn merge_survivors<'a>(survivors: impl Iterator<Item = &'a IndexedCase>) -> Vec<SurvivorRow> {
    let mut merged: BTreeMap<(Rational, u64, u64, Basket), SurvivorRow> = BTreeMap::new();
    for case in survivors {
        let row = &case.row;
        let key = (row.degree(), case.q, case.q_hat, row.basket.clone());
        let entry = merged.entry(key).or_insert_with(|| SurvivorRow {
            basket: row.basket.clone(),
            degree: row.degree(),
            r_x: row.r_x,
            c2c1: row.c2c1(),
            rx_deg: row.rx_deg,
            rx_c2c1: row.rx_c2c1,
            q: case.q,
            q_hat: case.q_hat,
            ja: Vec::new(),
        });
        if !entry.ja.iter().any(|s| s.ja == case.ja) {
            entry.ja.push(JaSource {
                ja: case.ja,
                stage: case.stage,
            });
        }
    }
    let mut rows: Vec<SurvivorRow> = merged.into_values().collect();
    for row in &mut rows {
        row.ja.sort_by_key(|s| std::cmp::Reverse(s.ja));
    }
    rows.sort_by(|a, b| {
        b.degree
            .cmp(&a.degree)
            .then(b.q.cmp(&a.q))
            .then(b.q_hat.cmp(&a.q_hat))
            .then(a.basket.cmp(&b.basket))
    });
    rows
}
