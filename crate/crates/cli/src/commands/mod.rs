use cqfi_core::charop::CharOperatorBundle;

use crate::context::TOL;
use crate::report::{Cell, Report};

pub mod altqfi;
pub mod audit;
pub mod charop;
pub mod qfi;
pub mod sweep;
pub mod thermal;
pub mod verify;

/// A finished command: its report and whether every check passed.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub pass: bool,
    pub summary: String,
}

impl Outcome {
    /// Passes when no row is flagged.
    pub fn from_report(name: &str, report: Report) -> Self {
        let failures = report.failures();
        let summary = format!("{name}: {} rows, {failures} flagged", report.rows.len());
        Self {
            pass: failures == 0,
            report,
            summary,
        }
    }
}

pub const DEVIATION_COLUMNS: [&str; 4] = ["series_terms", "series_closed", "series_exact", "closed_exact"];

/// Deviation cells of a three-route bundle and the checks they pass.
pub fn deviation_cells(b: &CharOperatorBundle) -> (Vec<Cell>, Vec<(&'static str, bool)>) {
    let d = &b.deviations;
    let rel = |x: Option<cqfi_core::charop::Deviation>| x.map(|d| d.rel);
    let cells = vec![
        b.series_terms.into(),
        rel(d.series_closed).into(),
        rel(d.series_exact).into(),
        rel(d.closed_exact).into(),
    ];
    let within = |x: Option<f64>, tol: f64| x.is_some_and(|v| v <= tol);
    let checks = vec![
        ("series_closed", within(rel(d.series_closed), TOL.series_closed)),
        ("series_exact", within(rel(d.series_exact), TOL.exact)),
        ("closed_exact", within(rel(d.closed_exact), TOL.exact)),
    ];
    (cells, checks)
}

pub fn columns(prefix: Vec<String>, rest: &[&str]) -> Vec<String> {
    prefix.into_iter().chain(rest.iter().map(|s| s.to_string())).collect()
}
