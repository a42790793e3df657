use cqfi_core::charop::char_longtime;
use cqfi_core::models::{h1, h2, h3};
use cqfi_core::{HermitianOperator, ModelBundle};

use super::{columns, deviation_cells, Outcome, DEVIATION_COLUMNS};
use crate::args::CharopArgs;
use crate::context::{times, ModelGrid, TOL};
use crate::error::CliResult;
use crate::pool::par_map;
use crate::report::{Cell, Report, Row, Status};

/// Model-specific closed form of `ℋ`.
pub fn analytic_charop(bundle: &ModelBundle, which: &str, t: f64) -> cqfi_core::Result<HermitianOperator> {
    Ok(match bundle {
        ModelBundle::H1(p) => h1::charop_analytic(p.b, t),
        ModelBundle::H2(p) if which == "Bp" => h2::charop_plus(p.gamma, p.bp, t),
        ModelBundle::H2(p) => h2::charop_minus(p.bm, t),
        ModelBundle::H3(p) => h3::charop_closed(p.chi, p.b, t),
        ModelBundle::Optomech(p) => p.with_param(which)?.charop_full(t),
    })
}

/// The characteristic operator exactly as stated, where it differs in form.
pub fn stated_charop(bundle: &ModelBundle, t: f64) -> Option<HermitianOperator> {
    match bundle {
        ModelBundle::H3(p) => Some(h3::charop_stated(p.chi, p.b, t)),
        _ => None,
    }
}

struct Task<'a> {
    point: &'a [f64],
    param: &'a str,
    t: f64,
}

fn evaluate(grid: &ModelGrid, task: &Task) -> cqfi_core::Result<(Vec<Cell>, Status)> {
    let bundle = grid.bundle(task.point)?;
    let which = task.param;
    let s = bundle.structure(which)?;
    let b = bundle.char_routes(which, task.t)?;
    let omega = bundle.analytic_omega(which)?;
    let wt = omega * task.t;
    let (dev, mut checks) = deviation_cells(&b);
    let w = &b.window;
    let (mut longtime, mut bound, mut analytic_dev, mut stated_dev) = (None, None, None, None);
    if let Some(closed) = &b.h_closed {
        if !s.commuting && omega > 0.0 {
            let lt = char_longtime(&s.v, omega, task.t)?;
            longtime = Some(w.relative_distance(closed.matrix(), lt.matrix()));
            bound = (wt > 0.0).then(|| 3.0 / wt);
        }
        let a = analytic_charop(&bundle, which, task.t)?;
        let d = w.relative_distance(closed.matrix(), a.matrix());
        checks.push(("analytic", d <= TOL.series_closed));
        analytic_dev = Some(d);
        stated_dev = stated_charop(&bundle, task.t).map(|p| w.relative_distance(closed.matrix(), p.matrix()));
    }
    let mut cells = vec![which.into(), task.t.into(), wt.into()];
    cells.extend(dev);
    cells.extend([longtime.into(), bound.into(), analytic_dev.into(), stated_dev.into()]);
    Ok((cells, Status::from_checks(&checks)))
}

pub fn run(args: &CharopArgs) -> CliResult<Outcome> {
    let grid = ModelGrid::new(&args.model, &args.common)?;
    let params = grid.params(args.common.param.as_deref())?;
    let ts = times(args.common.t.as_deref(), "0.5,1,2,5")?;
    let mut tasks = Vec::new();
    for point in &grid.points {
        for param in &params {
            for &t in &ts {
                tasks.push(Task { point, param, t });
            }
        }
    }
    let mut rest = vec!["param", "t", "omega_t"];
    rest.extend(DEVIATION_COLUMNS);
    rest.extend(["longtime_dev", "longtime_bound", "analytic_dev", "stated_dev"]);
    let mut report = Report::with_columns(columns(grid.names(), &rest));
    let width = report.columns.len();
    let rows = par_map(&tasks, |task| match evaluate(&grid, task) {
        Ok((cells, status)) => {
            let mut all = ModelGrid::cells(task.point);
            all.extend(cells);
            Row::new(all, status)
        }
        Err(e) => Row::error(ModelGrid::cells(task.point), width, e),
    })?;
    for row in rows {
        report.push(row);
    }
    Ok(Outcome::from_report(&format!("charop {}", args.model), report))
}
