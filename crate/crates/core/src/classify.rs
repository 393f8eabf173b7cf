//! End-to-end classification: case analysis followed by the curve and
//! torsion exclusions on the survivor table.

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::basket::Basket;
use crate::curves::{curve_exclusion_audit, torsion_exclusion, CurveRecord, TorsionRecord, Verdict};
use crate::error::{Error, Result};
use crate::filters::{run_case_analysis, CaseAnalysis, FilterConstants, Reason, Status, SurvivorRow};
use crate::sieve::{SieveRow, Window};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalRow {
    pub row: SurvivorRow,
    #[serde(flatten)]
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_audit: Option<CurveRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<TorsionRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corollary {
    /// Largest surviving degree, if anything survives.
    pub max_degree: Option<Rational>,
    /// Indices `q` of the survivors at the largest degree, ascending.
    pub q_set: Vec<u64>,
    pub candidates: usize,
    pub excluded: usize,
    pub survivors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub analysis: CaseAnalysis,
    pub rows: Vec<FinalRow>,
    pub corollary: Corollary,
}

fn is_index84_row(row: &SurvivorRow) -> Result<bool> {
    Ok(row.basket == Basket::from_pairs(&[(5, 2)])?
        && row.rx_deg == 336
        && row.q == 84
        && row.q == row.q_hat
        && row.ja_values() == [21])
}

fn classify_row(row: &SurvivorRow, consts: &FilterConstants) -> Result<FinalRow> {
    let mut out = FinalRow {
        row: row.clone(),
        status: Status::Survivor,
        curve_audit: None,
        torsion: None,
    };
    if row.q != row.q_hat {
        let sieve_row = SieveRow::new(row.basket.clone(), row.rx_deg, Rational::ZERO)?;
        match torsion_exclusion(&sieve_row, row.q, row.q_hat) {
            Ok(record) => {
                if record.verdict == Verdict::Excluded {
                    out.status = Status::Excluded(Reason::TorsionIrrational);
                }
                out.torsion = Some(record);
            }
            // rows outside the argument's scope stay in the table
            Err(Error::Precondition(_)) => {}
            Err(e) => return Err(e),
        }
    } else if is_index84_row(row)? {
        let record = curve_exclusion_audit(row, consts)?;
        out.status = Status::Excluded(Reason::CurveConfiguration);
        out.curve_audit = Some(record);
    }
    Ok(out)
}

pub fn classify(window: Window, consts: FilterConstants) -> Result<Classification> {
    let analysis = run_case_analysis(window, consts)?;
    let rows = analysis
        .table2
        .iter()
        .map(|row| classify_row(row, &consts))
        .collect::<Result<Vec<_>>>()?;
    let surviving: Vec<&FinalRow> = rows.iter().filter(|r| r.status.is_survivor()).collect();
    let max_degree = surviving.iter().map(|r| r.row.degree).max();
    let mut q_set: Vec<u64> = surviving
        .iter()
        .filter(|r| Some(r.row.degree) == max_degree)
        .map(|r| r.row.q)
        .collect();
    q_set.sort_unstable();
    q_set.dedup();
    let corollary = Corollary {
        max_degree,
        q_set,
        candidates: rows.len(),
        excluded: rows.len() - surviving.len(),
        survivors: surviving.len(),
    };
    Ok(Classification {
        analysis,
        rows,
        corollary,
    })
}
