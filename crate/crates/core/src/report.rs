//! Table artifacts and their Markdown, CSV and JSON renderings.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, to_decimal, Rational};
use crate::classify::{classify, Classification};
use crate::error::{invalid, Error, Result};
use crate::filters::{FilterConstants, IndexedCase, Reason, Stage, Status};
use crate::sieve::{format_multiset, CaseTable, QRegime, SieveRow, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Md,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "md" | "markdown" => Ok(Format::Md),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(invalid(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub window: Window,
    pub constants: FilterConstants,
    pub format: Format,
    /// Show hidden candidates and the reason every excluded entry was dropped.
    pub emit_excluded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TableName {
    Table2,
    Table3,
    Table4,
    Table5,
    A1,
    A2,
    A3,
    A4,
    A5,
    Corollary,
}

impl TableName {
    pub const ALL: [TableName; 10] = [
        TableName::Table2,
        TableName::Table3,
        TableName::Table4,
        TableName::Table5,
        TableName::A1,
        TableName::A2,
        TableName::A3,
        TableName::A4,
        TableName::A5,
        TableName::Corollary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableName::Table2 => "TABLE2",
            TableName::Table3 => "TABLE3",
            TableName::Table4 => "TABLE4",
            TableName::Table5 => "TABLE5",
            TableName::A1 => "A1",
            TableName::A2 => "A2",
            TableName::A3 => "A3",
            TableName::A4 => "A4",
            TableName::A5 => "A5",
            TableName::Corollary => "COROLLARY",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.as_str())
    }
}

impl fmt::Display for TableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub value: u64,
    pub crossed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Cell {
    Empty,
    Text(String),
    Int(u64),
    Value(Rational),
    /// A rational that Markdown also shows as a decimal.
    Slack(Rational),
    List(Vec<Entry>),
}

impl Cell {
    fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn ints(values: impl IntoIterator<Item = u64>) -> Cell {
        Cell::List(
            values
                .into_iter()
                .map(|value| Entry { value, crossed: false })
                .collect(),
        )
    }

    fn csv(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Int(n) => n.to_string(),
            Cell::Value(r) | Cell::Slack(r) => r.to_string(),
            Cell::List(entries) => join(entries.iter().map(|e| e.value)),
        }
    }

    fn markdown(&self) -> String {
        match self {
            Cell::Slack(r) => format!("{r} ({})", to_decimal(*r, 4)),
            Cell::List(entries) => entries
                .iter()
                .map(|e| {
                    if e.crossed {
                        format!("~~{}~~", e.value)
                    } else {
                        e.value.to_string()
                    }
                })
                .collect::<Vec<_>>()
                .join(","),
            other => other.csv().replace('|', "\\|"),
        }
    }
}

fn join(values: impl IntoIterator<Item = u64>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: TableName,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: TableName, headers: &[&str]) -> Self {
        Table {
            name,
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
        w.write_record(&self.headers).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("### {}\n\n", self.name);
        out += &format!("| {} |\n", self.headers.join(" | "));
        out += &format!("|{}\n", "---|".repeat(self.headers.len()));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::markdown).collect();
            out += &format!("| {} |\n", cells.join(" | "));
        }
        out
    }
}

fn row_prefix(row: &SieveRow) -> Vec<Cell> {
    vec![
        Cell::text(format_multiset(&row.r_values())),
        Cell::Int(row.r_x),
        Cell::Value(row.rx_c2c1),
    ]
}

fn factored(rx_deg: u64) -> Result<Cell> {
    Ok(Cell::text(format!("{rx_deg}={}", factorize(rx_deg)?)))
}

/// Per-row table of one regime, with "None" groups kept.
pub fn regime_table(name: TableName, table: &CaseTable) -> Table {
    let mut out = Table::new(name, &["R_X", "r_X", "rX_c2c1", "rX_deg", "slack"]);
    for group in &table.groups {
        let prefix = vec![
            Cell::text(format_multiset(&group.r_values)),
            Cell::Int(group.r_x),
            Cell::Value(group.rx_c2c1),
        ];
        if group.is_none() {
            let mut cells = prefix.clone();
            cells.extend([Cell::text("None"), Cell::Empty]);
            out.rows.push(cells);
        }
        for row in &group.rows {
            let mut cells = prefix.clone();
            cells.extend([Cell::Int(row.rx_deg), Cell::Slack(row.slack)]);
            out.rows.push(cells);
        }
    }
    out
}

/// One line per index multiset with the degree list and the largest slack.
pub fn grouped_table(name: TableName, table: &CaseTable) -> Table {
    let mut out = Table::new(name, &["R_X", "r_X", "rX_c2c1", "rX_deg", "relation", "slack_max"]);
    for group in &table.groups {
        let mut cells = vec![
            Cell::text(format_multiset(&group.r_values)),
            Cell::Int(group.r_x),
            Cell::Value(group.rx_c2c1),
        ];
        match group.max_slack() {
            None => cells.extend([Cell::text("None"), Cell::Empty, Cell::Empty]),
            Some(max) => {
                let degrees: BTreeSet<u64> = group.rows.iter().map(|r| r.rx_deg).collect();
                let relation = if group.rows.len() == 1 { "=" } else { "<=" };
                cells.extend([Cell::ints(degrees), Cell::text(relation), Cell::Slack(max)]);
            }
        }
        out.rows.push(cells);
    }
    out
}

/// Groups cases by key in order of first appearance.
fn group_cases<'a, K: PartialEq>(
    cases: impl Iterator<Item = &'a IndexedCase>,
    key: impl Fn(&IndexedCase) -> K,
) -> Vec<Vec<&'a IndexedCase>> {
    let mut groups: Vec<(K, Vec<&IndexedCase>)> = Vec::new();
    for case in cases {
        let k = key(case);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, members)) => members.push(case),
            None => groups.push((k, vec![case])),
        }
    }
    groups.into_iter().map(|(_, members)| members).collect()
}

/// Entries with distinct values, ascending; an entry is crossed when every
/// case carrying that value was excluded for one of `crossing`.
fn entries(cases: &[&IndexedCase], value: impl Fn(&IndexedCase) -> u64, crossing: &[Reason]) -> Vec<Entry> {
    let values: BTreeSet<u64> = cases.iter().map(|c| value(c)).collect();
    values
        .into_iter()
        .map(|v| {
            let crossed = cases
                .iter()
                .filter(|c| value(c) == v)
                .all(|c| c.status.reason().is_some_and(|r| crossing.contains(&r)));
            Entry { value: v, crossed }
        })
        .collect()
}

fn crossed_cell(entries: &[Entry]) -> Cell {
    Cell::text(join(entries.iter().filter(|e| e.crossed).map(|e| e.value)))
}

fn reasons_cell(cases: &[&IndexedCase], label: impl Fn(&IndexedCase) -> String) -> Cell {
    let parts: Vec<String> = cases
        .iter()
        .filter_map(|c| c.status.reason().map(|r| format!("{}:{r}", label(c))))
        .collect();
    Cell::text(parts.join(";"))
}

struct AppendixSpec {
    stage: Stage,
    visible: fn(Status) -> bool,
}

impl AppendixSpec {
    fn cases<'a>(&self, cls: &'a Classification, emit_excluded: bool) -> Vec<&'a IndexedCase> {
        cls.analysis
            .cases_in(self.stage)
            .filter(|c| emit_excluded || (self.visible)(c.status))
            .collect()
    }
}

fn not_divisibility(s: Status) -> bool {
    s.reason() != Some(Reason::QhatDivisibility)
}

fn passes_quarter_bound(s: Status) -> bool {
    matches!(s, Status::Survivor | Status::Excluded(Reason::JaBound))
}

fn square_visible(s: Status) -> bool {
    matches!(
        s,
        Status::Survivor | Status::Excluded(Reason::JaBound) | Status::Excluded(Reason::JaBoundStrict)
    )
}

fn with_reasons(headers: &[&str], emit_excluded: bool) -> Vec<String> {
    let mut h: Vec<String> = headers.iter().map(|s| s.to_string()).collect();
    if emit_excluded {
        h.push("excluded".into());
    }
    h
}

pub fn appendix_a1(cls: &Classification, emit_excluded: bool) -> Table {
    let spec = AppendixSpec { stage: Stage::LowTorsion, visible: not_divisibility };
    let mut out = Table::new(TableName::A1, &[]);
    out.headers = with_reasons(&["R_X", "r_X", "rX_c2c1", "rX_deg", "q_hat", "q", "J_A"], emit_excluded);
    for group in group_cases(spec.cases(cls, emit_excluded).into_iter(), |c| (c.row.clone(), c.q_hat)) {
        let first = group[0];
        let mut cells = row_prefix(&first.row);
        cells.push(Cell::Int(first.row.rx_deg));
        cells.push(Cell::Int(first.q_hat));
        cells.push(Cell::List(entries(&group, |c| c.q, &[])));
        cells.push(Cell::List(entries(&group, |c| c.ja, &[])));
        if emit_excluded {
            cells.push(reasons_cell(&group, |c| format!("q={},J={}", c.q, c.ja)));
        }
        out.rows.push(cells);
    }
    out
}

pub fn appendix_a2(cls: &Classification, emit_excluded: bool) -> Table {
    let spec = AppendixSpec { stage: Stage::LowEqual, visible: not_divisibility };
    let mut out = Table::new(TableName::A2, &[]);
    out.headers = with_reasons(&["R_X", "r_X", "rX_c2c1", "rX_deg", "q", "slack", "crossed"], emit_excluded);
    for group in group_cases(spec.cases(cls, emit_excluded).into_iter(), |c| c.row.clone()) {
        let first = group[0];
        let qs = entries(&group, |c| c.q, &[Reason::JaBound]);
        let mut cells = row_prefix(&first.row);
        cells.push(Cell::Int(first.row.rx_deg));
        cells.push(crossed_list(&qs));
        cells.push(Cell::Slack(first.row.slack));
        cells.push(crossed_cell(&qs));
        if emit_excluded {
            cells.push(reasons_cell(&group, |c| format!("q={}", c.q)));
        }
        out.rows.push(cells);
    }
    out
}

fn crossed_list(entries: &[Entry]) -> Cell {
    Cell::List(entries.to_vec())
}

pub fn appendix_a3(cls: &Classification, emit_excluded: bool) -> Table {
    let spec = AppendixSpec { stage: Stage::SixTorsion, visible: not_divisibility };
    let mut out = Table::new(TableName::A3, &[]);
    out.headers = with_reasons(&["R_X", "r_X", "rX_c2c1", "rX_deg", "q_hat", "q", "J_A", "crossed"], emit_excluded);
    for group in group_cases(spec.cases(cls, emit_excluded).into_iter(), |c| (c.row.clone(), c.q_hat)) {
        let first = group[0];
        let q_hat = entries(&group, |c| c.q_hat, &[Reason::TorsionCover]);
        let mut cells = row_prefix(&first.row);
        cells.push(Cell::Int(first.row.rx_deg));
        cells.push(crossed_list(&q_hat));
        cells.push(Cell::Int(first.q));
        cells.push(Cell::List(entries(&group, |c| c.ja, &[])));
        cells.push(crossed_cell(&q_hat));
        if emit_excluded {
            cells.push(reasons_cell(&group, |c| format!("J={}", c.ja)));
        }
        out.rows.push(cells);
    }
    out
}

fn quarter_slack(row: &SieveRow) -> Rational {
    row.rx_c2c1 - Rational::frac(1, 4) * Rational::from(row.rx_deg)
}

pub fn appendix_a4(cls: &Classification, emit_excluded: bool) -> Result<Table> {
    let spec = AppendixSpec { stage: Stage::HighEqual, visible: passes_quarter_bound };
    let mut out = Table::new(TableName::A4, &[]);
    out.headers = with_reasons(&["R_X", "r_X", "rX_c2c1", "rX_deg", "q", "slack"], emit_excluded);
    for group in group_cases(spec.cases(cls, emit_excluded).into_iter(), |c| c.row.clone()) {
        let first = group[0];
        let mut cells = row_prefix(&first.row);
        cells.push(factored(first.row.rx_deg)?);
        cells.push(Cell::List(entries(&group, |c| c.q, &[])));
        cells.push(Cell::Slack(quarter_slack(&first.row)));
        if emit_excluded {
            cells.push(reasons_cell(&group, |c| format!("q={}", c.q)));
        }
        out.rows.push(cells);
    }
    Ok(out)
}

pub fn appendix_a5(cls: &Classification, emit_excluded: bool) -> Result<Table> {
    let spec = AppendixSpec { stage: Stage::HighSquare, visible: square_visible };
    let mut out = Table::new(TableName::A5, &[]);
    out.headers = with_reasons(
        &["R_X", "r_X", "rX_c2c1", "rX_deg", "q_over_JA", "J_A", "slack", "crossed"],
        emit_excluded,
    );
    for group in group_cases(spec.cases(cls, emit_excluded).into_iter(), |c| (c.row.clone(), c.q / c.ja)) {
        let first = group[0];
        let js = entries(&group, |c| c.ja, &[Reason::JaBoundStrict]);
        let mut cells = row_prefix(&first.row);
        cells.push(factored(first.row.rx_deg)?);
        cells.push(Cell::Int(first.q / first.ja));
        cells.push(crossed_list(&js));
        cells.push(Cell::Slack(quarter_slack(&first.row)));
        cells.push(crossed_cell(&js));
        if emit_excluded {
            cells.push(reasons_cell(&group, |c| format!("J={}", c.ja)));
        }
        out.rows.push(cells);
    }
    Ok(out)
}

pub fn survivor_table(cls: &Classification, emit_excluded: bool) -> Table {
    let mut out = Table::new(TableName::Table2, &[]);
    let mut headers = vec!["c1^3", "B_X", "r_X", "c2c1", "q", "q_hat", "J_A"];
    if emit_excluded {
        headers.push("status");
    }
    out.headers = headers.iter().map(|s| s.to_string()).collect();
    for fin in &cls.rows {
        let row = &fin.row;
        let mut cells = vec![
            Cell::Value(row.degree),
            Cell::text(row.basket.to_string()),
            Cell::Int(row.r_x),
            Cell::Value(row.c2c1),
            Cell::Int(row.q),
            Cell::Int(row.q_hat),
            Cell::text(join(row.ja_values())),
        ];
        if emit_excluded {
            cells.push(Cell::text(match fin.status {
                Status::Survivor => "SURVIVOR".to_string(),
                Status::Excluded(r) => format!("EXCLUDED:{r}"),
            }));
        }
        out.rows.push(cells);
    }
    out
}

pub fn corollary_table(cls: &Classification) -> Table {
    let c = &cls.corollary;
    let mut out = Table::new(TableName::Corollary, &["item", "value"]);
    let max = c.max_degree.map(|d| d.to_string()).unwrap_or_else(|| "None".into());
    out.rows.push(vec![Cell::text("max_degree"), Cell::text(max)]);
    out.rows.push(vec![Cell::text("q_set"), Cell::text(join(c.q_set.iter().copied()))]);
    out.rows.push(vec![Cell::text("candidates"), Cell::Int(c.candidates as u64)]);
    out.rows.push(vec![Cell::text("excluded"), Cell::Int(c.excluded as u64)]);
    out.rows.push(vec![Cell::text("survivors"), Cell::Int(c.survivors as u64)]);
    out
}

/// The three regime tables.
pub fn cmd_tables(config: &RunConfig) -> Result<Vec<Table>> {
    config.constants.validate()?;
    let w = config.window;
    Ok(vec![
        regime_table(TableName::Table3, &crate::sieve::build_case_table(QRegime::Low, w)?),
        regime_table(TableName::Table4, &crate::sieve::build_case_table(QRegime::Six, w)?),
        grouped_table(TableName::Table5, &crate::sieve::build_case_table(QRegime::High, w)?),
    ])
}

/// The appendix tables, the survivor table and the corollary summary.
pub fn cmd_classify(config: &RunConfig) -> Result<(Classification, Vec<Table>)> {
    let cls = classify(config.window, config.constants)?;
    let e = config.emit_excluded;
    let tables = vec![
        appendix_a1(&cls, e),
        appendix_a2(&cls, e),
        appendix_a3(&cls, e),
        appendix_a4(&cls, e)?,
        appendix_a5(&cls, e)?,
        survivor_table(&cls, e),
        corollary_table(&cls),
    ];
    Ok((cls, tables))
}

/// Every artifact, in [`TableName::ALL`] order.
pub fn all_tables(config: &RunConfig) -> Result<Vec<Table>> {
    let mut tables = cmd_tables(config)?;
    tables.extend(cmd_classify(config)?.1);
    tables.sort_by_key(|t| t.name);
    Ok(tables)
}

pub fn render(tables: &[Table], format: Format) -> Result<String> {
    match format {
        Format::Md => Ok(tables
            .iter()
            .map(Table::to_markdown)
            .collect::<Vec<_>>()
            .join("\n")),
        Format::Csv => {
            let parts = tables
                .iter()
                .map(|t| Ok(format!("# {}\n{}", t.name, t.to_csv()?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(parts.join("\n"))
        }
        Format::Json => serde_json::to_string_pretty(tables)
            .map(|s| s + "\n")
            .map_err(|e| Error::InvalidInput(e.to_string())),
    }
}

/// Writes one CSV file per table into `dir`.
pub fn write_csv_files(tables: &[Table], dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(t.name.file_name());
        let body = t.to_csv().map_err(|e| std::io::Error::other(e.to_string()))?;
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffOutcome {
    pub table: TableName,
    pub passed: bool,
    pub detail: String,
}

/// First differing cell between two CSV texts, as `(line, column, expected, actual)`.
fn first_mismatch(expected: &str, actual: &str) -> Option<(usize, usize, String, String)> {
    let parse = |s: &str| -> Vec<Vec<String>> {
        csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(s.as_bytes())
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()).unwrap_or_default())
            .collect()
    };
    let (e, a) = (parse(expected), parse(actual));
    for line in 0..e.len().max(a.len()) {
        let er = e.get(line).cloned().unwrap_or_default();
        let ar = a.get(line).cloned().unwrap_or_default();
        for col in 0..er.len().max(ar.len()) {
            let ec = er.get(col).cloned().unwrap_or_else(|| "<missing>".into());
            let ac = ar.get(col).cloned().unwrap_or_else(|| "<missing>".into());
            if ec != ac {
                return Some((line + 1, col + 1, ec, ac));
            }
        }
    }
    None
}

/// Compares each table's CSV with `<dir>/<NAME>.csv` byte for byte.
pub fn cmd_diff(tables: &[Table], golden_dir: &Path) -> Result<Vec<DiffOutcome>> {
    let mut out = Vec::new();
    for t in tables {
        let path = golden_dir.join(t.name.file_name());
        let actual = t.to_csv()?;
        let outcome = match fs::read_to_string(&path) {
            Err(e) => DiffOutcome {
                table: t.name,
                passed: false,
                detail: format!("missing golden file {}: {e}", path.display()),
            },
            Ok(expected) if expected == actual => DiffOutcome {
                table: t.name,
                passed: true,
                detail: "identical".into(),
            },
            Ok(expected) => {
                let detail = match first_mismatch(&expected, &actual) {
                    Some((line, col, e, a)) => {
                        format!("line {line}, column {col}: expected {e:?}, got {a:?}")
                    }
                    None => "bytes differ outside cell contents (line endings or quoting)".into(),
                };
                DiffOutcome {
                    table: t.name,
                    passed: false,
                    detail,
                }
            }
        };
        out.push(outcome);
    }
    Ok(out)
}
