//! ±1 spreadsheets with optional holes, and their strict CSV format.

use std::fmt;
use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{IneqError, Result};

/// A single ±1 outcome. Integer-valued by construction; never a float.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn from_i64(v: i64) -> Result<Self> {
        match v {
            -1 => Ok(Sign::Minus),
            1 => Ok(Sign::Plus),
            other => Err(IneqError::InvalidCell(other)),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl TryFrom<i64> for Sign {
    type Error = IneqError;
    fn try_from(v: i64) -> Result<Self> {
        Sign::from_i64(v)
    }
}

impl From<Sign> for i64 {
    fn from(s: Sign) -> i64 {
        s.value()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// A spreadsheet cell: an outcome or a hole (counterfactual never filled in).
pub type Cell = Option<Sign>;

/// One complete row of the four columns (A, A′, B, B′).
pub type Row = [Sign; 4];

/// The four column labels.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Observable {
    A,
    Ap,
    B,
    Bp,
}

impl Observable {
    pub const ALL: [Observable; 4] = [Observable::A, Observable::Ap, Observable::B, Observable::Bp];

    pub fn column(self) -> usize {
        match self {
            Observable::A => 0,
            Observable::Ap => 1,
            Observable::B => 2,
            Observable::Bp => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Observable::A => "A",
            Observable::Ap => "Ap",
            Observable::B => "B",
            Observable::Bp => "Bp",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One of the four jointly measurable column pairs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum SettingPair {
    AB,
    ABp,
    ApB,
    ApBp,
}

impl SettingPair {
    pub const ALL: [SettingPair; 4] =
        [SettingPair::AB, SettingPair::ABp, SettingPair::ApB, SettingPair::ApBp];

    pub fn index(self) -> usize {
        match self {
            SettingPair::AB => 0,
            SettingPair::ABp => 1,
            SettingPair::ApB => 2,
            SettingPair::ApBp => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<SettingPair> {
        SettingPair::ALL.get(i).copied()
    }

    pub fn observables(self) -> (Observable, Observable) {
        match self {
            SettingPair::AB => (Observable::A, Observable::B),
            SettingPair::ABp => (Observable::A, Observable::Bp),
            SettingPair::ApB => (Observable::Ap, Observable::B),
            SettingPair::ApBp => (Observable::Ap, Observable::Bp),
        }
    }

    pub fn columns(self) -> (usize, usize) {
        let (a, b) = self.observables();
        (a.column(), b.column())
    }

    pub fn label(self) -> &'static str {
        match self {
            SettingPair::AB => "AB",
            SettingPair::ABp => "ABp",
            SettingPair::ApB => "ApB",
            SettingPair::ApBp => "ApBp",
        }
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// N×4 table of cells over the fixed columns (A, A′, B, B′).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Spreadsheet {
    rows: Vec<[Cell; 4]>,
}

pub(super) const COLUMN_LABELS: [&str; 4] = ["A", "Ap", "B", "Bp"];

impl Spreadsheet {
    pub fn new(rows: Vec<[Cell; 4]>) -> Self {
        Spreadsheet { rows }
    }

    pub fn from_complete_rows(rows: Vec<Row>) -> Self {
        Spreadsheet {
            rows: rows
                .into_iter()
                .map(|r| [Some(r[0]), Some(r[1]), Some(r[2]), Some(r[3])])
                .collect(),
        }
    }

    /// Uniform random complete sheet: 4N independent fair ±1 entries.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Spreadsheet {
            rows: (0..n)
                .map(|_| std::array::from_fn(|_| Some(Sign::random(rng))))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[[Cell; 4]] {
        &self.rows
    }

    pub fn push(&mut self, row: [Cell; 4]) {
        self.rows.push(row);
    }

    /// The row with all holes filled, or the first hole found.
    pub fn complete_row(&self, index: usize) -> Result<Row> {
        let cells = &self.rows[index];
        let mut out = [Sign::Plus; 4];
        for (c, slot) in cells.iter().zip(out.iter_mut()) {
            match c {
                Some(s) => *slot = *s,
                None => {
                    let column = COLUMN_LABELS
                        [cells.iter().position(|x| x.is_none()).unwrap_or(0)];
                    return Err(IneqError::IncompleteRow { row: index, column });
                }
            }
        }
        Ok(out)
    }

    /// All rows, failing on the first hole.
    pub fn complete_rows(&self) -> Result<Vec<Row>> {
        (0..self.rows.len()).map(|i| self.complete_row(i)).collect()
    }

    pub fn has_holes(&self) -> bool {
        self.rows.iter().any(|r| r.iter().any(|c| c.is_none()))
    }

    /// Strict CSV reader. Header must be exactly `A,Ap,B,Bp`; cells must be
    /// `-1`, `1` or empty (a hole). Anything else is rejected with its line.
    pub fn read_csv<R: Read>(reader: R, path: &str) -> Result<Spreadsheet> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(reader);
        {
            let headers = rdr.headers()?;
            let expected = &COLUMN_LABELS[..];
            let found: Vec<&str> = headers.iter().collect();
            if found != expected {
                return Err(IneqError::CsvFormat {
                    path: path.to_string(),
                    line: 1,
                    message: format!("header must be `A,Ap,B,Bp`, got `{}`", found.join(",")),
                });
            }
        }
        let mut rows = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let line = i + 2; // 1-based, after the header
            let record = record?;
            if record.len() != 4 {
                return Err(IneqError::CsvFormat {
                    path: path.to_string(),
                    line,
                    message: format!("expected 4 cells, got {}", record.len()),
                });
            }
            let mut row: [Cell; 4] = [None; 4];
            for (j, field) in record.iter().enumerate() {
                let field = field.trim();
                row[j] = match field {
                    "" => None,
                    "1" => Some(Sign::Plus),
                    "-1" => Some(Sign::Minus),
                    other => {
                        return Err(IneqError::CsvFormat {
                            path: path.to_string(),
                            line,
                            message: format!(
                                "column {}: value `{other}` not in {{-1, 1, empty}}",
                                COLUMN_LABELS[j]
                            ),
                        })
                    }
                };
            }
            rows.push(row);
        }
        Ok(Spreadsheet { rows })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(COLUMN_LABELS)?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| c.map(|s| s.value().to_string()).unwrap_or_default())
                .collect();
            wtr.write_record(&fields)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// N×3 table (columns A, B, C) for the three-variable inequalities.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TripleSheet {
    rows: Vec<[Sign; 3]>,
}

impl TripleSheet {
    pub fn new(rows: Vec<[Sign; 3]>) -> Self {
        TripleSheet { rows }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        TripleSheet {
            rows: (0..n)
                .map(|_| std::array::from_fn(|_| Sign::random(rng)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[[Sign; 3]] {
        &self.rows
    }
}
