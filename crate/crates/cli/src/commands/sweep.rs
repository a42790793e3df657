use cqfi_core::charop::char_longtime;
use cqfi_core::models::scan::{optimal_state_scan, random_state_scan, AmplitudeFamily, ScanGrid};
use cqfi_core::models::h1;
use cqfi_core::ModelBundle;

use super::qfi::{closed_charop, qfi_rows, QFI_COLUMNS};
use super::thermal::thermal_report;
use super::{columns, Outcome};
use crate::args::SweepArgs;
use crate::context::{select_states, temperatures, times, ModelGrid, TOL};
use crate::error::{CliError, CliResult};
use crate::pool::par_map;
use crate::report::{Cell, Report, Row, Status};

pub const DEFAULT_SAMPLES: usize = 10_000;

fn single_param(grid: &ModelGrid, args: &SweepArgs) -> CliResult<Vec<String>> {
    match args.common.param.as_deref() {
        Some(p) => grid.params(Some(p)),
        None => Ok(vec![grid.bundle(&[])?.default_param().to_string()]),
    }
}

fn h1_fields(grid: &ModelGrid, what: &str) -> CliResult<Vec<f64>> {
    if grid.model != "h1" {
        return Err(CliError::usage(format!("--{what} is available for h1 only")));
    }
    Ok(grid.axes.first().map_or_else(|| vec![1.0], |a| a.values.clone()))
}

fn optimal_points(grid: &ModelGrid, args: &SweepArgs) -> CliResult<Report> {
    let fields = h1_fields(grid, "optimal-points")?;
    let ts = if args.longtime { vec![f64::NAN] } else { times(args.common.t.as_deref(), "1")? };
    let samples = args.samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = args.common.seed.unwrap_or(0);
    let tasks: Vec<(f64, f64)> = fields.iter().flat_map(|&b| ts.iter().map(move |&t| (b, t))).collect();
    let mut report = Report::new(&[
        "B", "t", "ratio", "phi", "qfi", "residual", "global_max", "family_gap", "random_best", "random_excess",
    ]);
    let width = report.columns.len();
    let rows = par_map(&tasks, |&(b, t)| {
        let eval = || -> cqfi_core::Result<(Vec<Cell>, Status)> {
            let (h, scan) = if args.longtime {
                let h = char_longtime(&h1::analytic_v(b), h1::omega(b), 1.0)?;
                let scan = optimal_state_scan(&AmplitudeFamily::PSI, &h, &ScanGrid::default(), |r, p| {
                    h1::longtime_residual(b, r, p)
                })?;
                (h, scan)
            } else {
                let h = closed_charop(&ModelBundle::H1(h1::H1 { b }), "B", t)?;
                let scan = optimal_state_scan(&AmplitudeFamily::PSI, &h, &ScanGrid::default(), |r, p| {
                    h1::optimality_residual(b, t, r, p)
                })?;
                (h, scan)
            };
            let random = random_state_scan(&h, samples, seed);
            let gap = (scan.global_max - scan.qfi) / scan.global_max.max(1e-300);
            let excess = (random.best - scan.qfi) / scan.qfi.max(1e-300);
            let status = Status::from_checks(&[
                ("residual", scan.residual.abs() <= TOL.scan),
                ("random", excess <= TOL.scan),
            ]);
            let t_cell = if args.longtime { Cell::Empty } else { t.into() };
            Ok((
                vec![
                    b.into(),
                    t_cell,
                    scan.ratio.into(),
                    scan.phi.into(),
                    scan.qfi.into(),
                    scan.residual.into(),
                    scan.global_max.into(),
                    gap.into(),
                    random.best.into(),
                    excess.into(),
                ],
                status,
            ))
        };
        match eval() {
            Ok((cells, status)) => Row::new(cells, status),
            Err(e) => Row::error(vec![b.into()], width, e),
        }
    })?;
    for row in rows {
        report.push(row);
    }
    Ok(report)
}

fn phi_opt(grid: &ModelGrid, args: &SweepArgs) -> CliResult<Report> {
    let fields = h1_fields(grid, "phi-opt")?;
    let ts = times(args.common.t.as_deref(), "0:10:101")?;
    let mut report = Report::new(&["B", "t", "omega_t", "phi_opt", "phi_opt_over_Bt"]);
    for &b in &fields {
        for &t in &ts {
            let p = h1::phi_opt(b, t);
            let slope = (b * t != 0.0).then(|| p / (b * t));
            report.push(Row::new(
                vec![b.into(), t.into(), (h1::omega(b) * t).into(), p.into(), slope.into()],
                Status::Pass,
            ));
        }
    }
    Ok(report)
}

fn qfi_curve(grid: &ModelGrid, args: &SweepArgs) -> CliResult<Report> {
    let params = single_param(grid, args)?;
    let ts = times(args.common.t.as_deref(), "0:12.566370614359172:41")?;
    let seed = args.common.seed.unwrap_or(0);
    let tasks: Vec<(&[f64], f64)> = grid
        .points
        .iter()
        .flat_map(|p| ts.iter().map(move |&t| (p.as_slice(), t)))
        .collect();
    let mut report = Report::with_columns(columns(grid.names(), &QFI_COLUMNS));
    let width = report.columns.len();
    let which = params[0].as_str();
    let rows = par_map(&tasks, |&(point, t)| -> Vec<Row> {
        let coords = ModelGrid::cells(point);
        let result = grid.bundle(point).map_err(CliError::from).and_then(|b| {
            let mut states = select_states(&b, &args.state, seed)?;
            if args.state.state.is_none() && args.state.random.is_none() {
                states.truncate(1);
            }
            Ok(qfi_rows(&b, which, t, &states)?)
        });
        match result {
            Ok(rows) => rows
                .into_iter()
                .map(|(cells, status)| {
                    let mut all = coords.clone();
                    all.extend(cells);
                    Row::new(all, status)
                })
                .collect(),
            Err(e) => vec![Row::error(coords, width, e)],
        }
    })?;
    for row in rows.into_iter().flatten() {
        report.push(row);
    }
    Ok(report)
}

pub fn run(args: &SweepArgs) -> CliResult<Outcome> {
    let grid = ModelGrid::new(&args.model, &args.common)?;
    let modes = [args.thermal, args.optimal_points, args.phi_opt].iter().filter(|&&m| m).count();
    if modes > 1 {
        return Err(CliError::usage("choose at most one of --thermal, --optimal-points, --phi-opt"));
    }
    let (kind, report) = if args.thermal {
        let temps = temperatures(args.temperature.as_deref(), "0.5,1.0,1.5")?;
        ("thermal", thermal_report(&grid, &single_param(&grid, args)?, &temps)?)
    } else if args.optimal_points {
        ("optimal-points", optimal_points(&grid, args)?)
    } else if args.phi_opt {
        ("phi-opt", phi_opt(&grid, args)?)
    } else {
        ("qfi", qfi_curve(&grid, args)?)
    };
    Ok(Outcome::from_report(&format!("sweep {} {kind}", args.model), report))
}
