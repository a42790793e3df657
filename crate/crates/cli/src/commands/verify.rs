use cqfi_core::charop::CharOperatorBundle;
use cqfi_core::random::{random_hermitian, rng};
use cqfi_core::{analyze, HermitianOperator, Truncation};

use super::{columns, deviation_cells, Outcome, DEVIATION_COLUMNS};
use crate::args::VerifyArgs;
use crate::context::{times, ModelGrid, TOL};
use crate::error::{CliError, CliResult};
use crate::pool::par_map;
use crate::report::{Cell, Report, Row, Status};

const STRUCTURE_COLUMNS: [&str; 7] = [
    "param",
    "t",
    "omega_sq",
    "omega_sq_analytic",
    "conservation",
    "eigenop",
    "v_analytic_dev",
];

fn header(prefix: Vec<String>) -> Vec<String> {
    let mut rest: Vec<&str> = STRUCTURE_COLUMNS.to_vec();
    rest.extend(DEVIATION_COLUMNS);
    columns(prefix, &rest)
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
    let w = bundle.analytic_omega(which)?;
    let v = bundle.analytic_v(which)?;
    let v_dev = s.window.relative_distance(s.v.matrix(), v.matrix());
    let b = bundle.char_routes(which, task.t)?;
    let (dev, mut checks) = deviation_cells(&b);
    let omega_gap = (s.omega_sq - w * w).abs() / (w * w).max(1e-300);
    checks.extend([
        ("conservation", s.conservation_residual <= TOL.conservation),
        ("eigenop", s.eigenop_residual <= TOL.eigenop),
        ("omega", s.commuting || omega_gap <= TOL.conservation),
        ("v_analytic", v_dev <= TOL.conservation),
    ]);
    let mut cells = vec![
        which.into(),
        task.t.into(),
        s.omega_sq.into(),
        (w * w).into(),
        s.conservation_residual.into(),
        s.eigenop_residual.into(),
        v_dev.into(),
    ];
    cells.extend(dev);
    Ok((cells, Status::from_checks(&checks)))
}

fn random_control(args: &VerifyArgs) -> CliResult<Report> {
    let dim = args.dim.unwrap_or(4);
    if dim < 2 {
        return Err(CliError::usage("--dim must be at least 2"));
    }
    let seed = args.common.seed.unwrap_or(0);
    let ts = times(args.common.t.as_deref(), "1")?;
    let mut r = rng(seed);
    let h0 = random_hermitian(dim, &mut r);
    let dh = random_hermitian(dim, &mut r);
    let provider = |theta: f64| -> cqfi_core::Result<HermitianOperator> { Ok(&h0 + &dh.scaled(theta)) };
    let s = analyze(&h0, &dh)?;
    let mut report = Report::with_columns(header(vec!["dim".into()]));
    let rows = par_map(&ts, |&t| -> Row {
        let coords = vec![Cell::from(dim)];
        let width = report.columns.len();
        match CharOperatorBundle::build_with(&provider, Some(&dh), 0.0, t, &Truncation::none()) {
            Ok(b) => {
                let (dev, mut checks) = deviation_cells(&b);
                checks.extend([
                    ("conservation", s.conservation_residual <= TOL.conservation),
                    ("eigenop", s.eigenop_residual <= TOL.eigenop),
                ]);
                let mut cells = coords;
                cells.extend([
                    Cell::from("theta"),
                    t.into(),
                    s.omega_sq.into(),
                    Cell::Empty,
                    s.conservation_residual.into(),
                    s.eigenop_residual.into(),
                    Cell::Empty,
                ]);
                cells.extend(dev);
                Row::new(cells, Status::from_checks(&checks))
            }
            Err(e) => Row::error(coords, width, e),
        }
    })?;
    for row in rows {
        report.push(row);
    }
    Ok(report)
}

pub fn run(args: &VerifyArgs) -> CliResult<Outcome> {
    if args.model == "random" {
        return Ok(Outcome::from_report("verify random", random_control(args)?));
    }
    let grid = ModelGrid::new(&args.model, &args.common)?;
    let params = grid.params(args.common.param.as_deref())?;
    let ts = times(args.common.t.as_deref(), "1")?;
    let mut tasks = Vec::new();
    for point in &grid.points {
        for param in &params {
            for &t in &ts {
                tasks.push(Task { point, param, t });
            }
        }
    }
    let mut report = Report::with_columns(header(grid.names()));
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
    Ok(Outcome::from_report(&format!("verify {}", args.model), report))
}
