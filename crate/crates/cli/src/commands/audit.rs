use cqfi_core::audit::{full_audit, AuditEntry, STABILITY_TOL};

use super::Outcome;
use crate::args::AuditArgs;
use crate::error::CliResult;
use crate::report::{Report, Row, Status};

pub fn audit_report(entries: &[AuditEntry]) -> Report {
    let mut report = Report::new(&[
        "id",
        "point",
        "stated",
        "oracle",
        "ratio",
        "mean_ratio",
        "ratio_spread",
        "stable",
        "expected_ratio",
    ]);
    report.meta("stability_tolerance", format!("{STABILITY_TOL:e}"));
    for e in entries {
        let status = if e.matches_expected() {
            Status::Pass
        } else if !e.stable() {
            Status::Fail("ratio not constant".into())
        } else {
            Status::Fail("constant ratio differs from expected".into())
        };
        for r in &e.rows {
            report.push(Row::new(
                vec![
                    e.id.into(),
                    r.point.as_str().into(),
                    r.stated.into(),
                    r.oracle.into(),
                    r.ratio.into(),
                    e.mean_ratio().into(),
                    e.ratio_spread().into(),
                    e.stable().into(),
                    e.expected.into(),
                ],
                status.clone(),
            ));
        }
    }
    report
}

/// The audit is a report: it passes unless `--strict` and some entry misses.
pub fn run(args: &AuditArgs) -> CliResult<Outcome> {
    let entries = full_audit()?;
    let report = audit_report(&entries);
    let mut lines = Vec::new();
    for e in &entries {
        let mark = if e.matches_expected() {
            "ok"
        } else if e.stable() {
            "STABLE, OFF EXPECTED"
        } else {
            "UNSTABLE"
        };
        let expected = e.expected.map_or("-".to_string(), |x| format!("{x}"));
        lines.push(format!(
            "  {:<24} ratio {:>14.8} spread {:>9.2e} expected {:>4}  {mark}",
            e.id,
            e.mean_ratio(),
            e.ratio_spread(),
            expected
        ));
    }
    let missing = entries.iter().filter(|e| !e.matches_expected()).count();
    let summary = format!("audit: {} formulas, {missing} off expected\n{}", entries.len(), lines.join("\n"));
    Ok(Outcome {
        report,
        pass: !args.strict || missing == 0,
        summary,
    })
}
