//! Tabular reports written as CSV with a `#`-prefixed metadata header.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.into())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Pass,
    Fail(String),
    Error(String),
}

impl Status {
    pub fn is_pass(&self) -> bool {
        matches!(self, Status::Pass)
    }

    /// Pass when every `(label, ok)` holds, else a failure naming the rest.
    pub fn from_checks(checks: &[(&str, bool)]) -> Self {
        let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(l, _)| *l).collect();
        if failed.is_empty() {
            Status::Pass
        } else {
            Status::Fail(failed.join(" "))
        }
    }

    fn render(&self) -> String {
        match self {
            Status::Pass => "pass".into(),
            Status::Fail(why) => format!("fail: {why}"),
            Status::Error(why) => format!("error: {why}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub status: Status,
}

impl Row {
    pub fn new(cells: Vec<Cell>, status: Status) -> Self {
        Self { cells, status }
    }

    /// A row whose computation failed; coordinates kept, values left empty.
    pub fn error(mut coords: Vec<Cell>, width: usize, err: impl std::fmt::Display) -> Self {
        coords.resize(width, Cell::Empty);
        Self {
            cells: coords,
            status: Status::Error(err.to_string()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

/// `%.12e`: twelve mantissa digits, signed exponent of at least two digits.
pub fn sci(v: f64) -> String {
    let s = format!("{v:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Self {
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.to_string(), value.into()));
    }

    /// Appends a row. Non-finite numbers become empty cells and flag the row.
    pub fn push(&mut self, mut row: Row) {
        assert_eq!(row.cells.len(), self.columns.len(), "row width");
        let mut bad = Vec::new();
        for (cell, name) in row.cells.iter_mut().zip(&self.columns) {
            if matches!(cell, Cell::Num(v) if !v.is_finite()) {
                *cell = Cell::Empty;
                bad.push(name.as_str());
            }
        }
        if !bad.is_empty() && row.status.is_pass() {
            row.status = Status::Fail(format!("non-finite {}", bad.join(" ")));
        }
        self.rows.push(row);
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.status.is_pass()).count()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column, `None` for non-numeric cells.
    pub fn numbers(&self, name: &str) -> Vec<Option<f64>> {
        let Some(k) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .map(|r| match r.cells[k] {
                Cell::Num(v) => Some(v),
                Cell::Int(v) => Some(v as f64),
                _ => None,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        let mut header: Vec<String> = self.columns.iter().map(|c| quote(c)).collect();
        header.push("status".into());
        writeln!(out, "{}", header.join(",")).unwrap();
        for row in &self.rows {
            let mut cells: Vec<String> = row
                .cells
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => sci(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => quote(s),
                    Cell::Empty => String::new(),
                })
                .collect();
            cells.push(quote(&row.status.render()));
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    /// Writes to `path`, or to stdout when `None`.
    pub fn write(&self, path: Option<&Path>) -> CliResult<()> {
        let csv = self.to_csv();
        match path {
            Some(p) => std::fs::write(p, csv).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(csv.as_bytes()).map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(sci(1.0), "1.000000000000e+00");
        assert_eq!(sci(-0.00123), "-1.230000000000e-03");
        assert_eq!(sci(6.02e23), "6.020000000000e+23");
        assert_eq!(sci(1e-300), "1.000000000000e-300");
        assert_eq!(sci(0.0), "0.000000000000e+00");
    }

    #[test]
    fn non_finite_cells_flag_the_row() {
        let mut r = Report::new(&["a", "b"]);
        r.push(Row::new(vec![1.0.into(), f64::NAN.into()], Status::Pass));
        assert_eq!(r.failures(), 1);
        assert!(!r.to_csv().contains("NaN"));
        assert!(r.to_csv().ends_with("1.000000000000e+00,,fail: non-finite b\n"));
    }

    #[test]
    fn header_and_quoting() {
        let mut r = Report::new(&["x"]);
        r.meta("seed", "7");
        r.push(Row::new(vec!["a,b".into()], Status::Fail("x y".into())));
        assert_eq!(r.to_csv(), "# seed: 7\nx,status\n\"a,b\",fail: x y\n");
    }
}
