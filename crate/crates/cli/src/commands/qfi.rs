use cqfi_core::charop::{char_closed, char_exact, FD_STEP};
use cqfi_core::models::{h1, h2, h3};
use cqfi_core::qfi::{qfi_fd_oracle_pure, qfi_pure, qfim_pure, saturation_check};
use cqfi_core::state::PureState;
use cqfi_core::{HermitianOperator, ModelBundle};

use super::{columns, Outcome};
use crate::args::QfiArgs;
use crate::context::{select_states, times, ModelGrid, TOL};
use crate::error::{CliError, CliResult};
use crate::pool::par_map;
use crate::report::{Cell, Report, Row, Status};

/// `ℋ` from the conserved-structure closed form, `−t∂H` when commuting.
pub fn closed_charop(bundle: &ModelBundle, which: &str, t: f64) -> cqfi_core::Result<HermitianOperator> {
    let s = bundle.structure(which)?;
    let dh = bundle.dh(which)?;
    if s.commuting {
        return Ok(dh.scaled(-t));
    }
    char_closed(&bundle.hamiltonian(), &dh, &s, t)
}

/// Pure-state QFI as stated in closed form for the model, where one exists.
pub fn stated_qfi(bundle: &ModelBundle, which: &str, label: &str, t: f64, state: &PureState) -> Option<f64> {
    match bundle {
        ModelBundle::H1(p) => Some(h1::qfi_stated(p.b, t, state)),
        ModelBundle::H3(p) => Some(h3::qfi_stated(p.chi, p.b, t, state)),
        ModelBundle::Optomech(p) if label == "vacuum" => p.with_param(which).ok().map(|q| q.vacuum_qfi_stated(t)),
        _ => None,
    }
}

pub const QFI_COLUMNS: [&str; 8] = ["param", "t", "state", "qfi", "oracle", "abs_diff", "stated", "ratio_oracle_stated"];

/// One row per state: `4⟨Δ²ℋ⟩` against the fidelity oracle and the stated form.
pub fn qfi_rows(
    bundle: &ModelBundle,
    which: &str,
    t: f64,
    states: &[(String, PureState)],
) -> cqfi_core::Result<Vec<(Vec<Cell>, Status)>> {
    let h = closed_charop(bundle, which, t)?;
    let provider = bundle.provider(which)?;
    let theta = bundle.get(which)?;
    let mut out = Vec::new();
    for (label, psi) in states {
        let f = qfi_pure(psi, &h)?;
        let oracle = qfi_fd_oracle_pure(&provider, theta, t, psi, FD_STEP)?;
        let stated = stated_qfi(bundle, which, label, t, psi);
        let ratio = stated.and_then(|s| (s != 0.0).then(|| oracle / s));
        let diff = (f - oracle).abs();
        let status = Status::from_checks(&[("oracle", diff <= TOL.qfi * (1.0 + f))]);
        out.push((
            vec![which.into(), t.into(), label.as_str().into(), f.into(), oracle.into(), diff.into(), stated.into(), ratio.into()],
            status,
        ));
    }
    Ok(out)
}

struct Task<'a> {
    point: &'a [f64],
    param: &'a str,
    t: f64,
}

pub fn run(args: &QfiArgs) -> CliResult<Outcome> {
    let grid = ModelGrid::new(&args.model, &args.common)?;
    let params = grid.params(args.common.param.as_deref())?;
    let ts = times(args.common.t.as_deref(), "1")?;
    let seed = args.common.seed.unwrap_or(0);
    let template = grid.bundle(grid.points.first().map_or(&[][..], |p| p))?;
    select_states(&template, &args.state, seed)?;
    let mut tasks = Vec::new();
    for point in &grid.points {
        for param in &params {
            for &t in &ts {
                tasks.push(Task { point, param, t });
            }
        }
    }
    let mut report = Report::with_columns(columns(grid.names(), &QFI_COLUMNS));
    let width = report.columns.len();
    let rows = par_map(&tasks, |task| -> Vec<Row> {
        let coords = ModelGrid::cells(task.point);
        let result = grid.bundle(task.point).map_err(CliError::from).and_then(|b| {
            let states = select_states(&b, &args.state, seed)?;
            Ok(qfi_rows(&b, task.param, task.t, &states)?)
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
    Ok(Outcome::from_report(&format!("qfi {}", args.model), report))
}

struct MatrixTask<'a> {
    point: &'a [f64],
    t: f64,
}

fn qfim_rows(
    bundle: &ModelBundle,
    params: &[String],
    t: f64,
    states: &[(String, PureState)],
) -> cqfi_core::Result<Vec<(Vec<Cell>, Status)>> {
    let mut closed = Vec::new();
    let mut exact = Vec::new();
    for which in params {
        closed.push(closed_charop(bundle, which, t)?);
        let provider = bundle.provider(which)?;
        exact.push(char_exact(&provider, bundle.get(which)?, t, FD_STEP)?.op);
    }
    let n = params.len();
    let mut out = Vec::new();
    for (label, psi) in states {
        let f = qfim_pure(psi, &closed)?;
        let g = qfim_pure(psi, &exact)?;
        let mut cells: Vec<Cell> = vec![t.into(), label.as_str().into()];
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..n {
            for j in i..n {
                cells.push(f.get(i, j).into());
                worst = worst.max((f.get(i, j) - g.get(i, j)).abs());
                scale = scale.max(f.get(i, j).abs());
            }
        }
        let comm = (n >= 2).then(|| saturation_check(psi, &closed[0], &closed[1])).transpose()?;
        let stated = match bundle {
            ModelBundle::H2(_) if n == 2 => Some(h2::offdiag_stated(psi, &closed[0], &closed[1])),
            _ => None,
        };
        let ratio = stated.and_then(|s| (s.abs() > 1e-300).then(|| f.get(0, 1) / s));
        cells.extend([f.min_eigenvalue().into(), worst.into(), comm.into(), stated.into(), ratio.into()]);
        let status = Status::from_checks(&[
            ("oracle", worst <= TOL.qfi * (1.0 + scale)),
            ("psd", f.is_psd()),
        ]);
        out.push((cells, status));
    }
    Ok(out)
}

pub fn run_matrix(args: &QfiArgs) -> CliResult<Outcome> {
    let grid = ModelGrid::new(&args.model, &args.common)?;
    let params = match args.common.param.as_deref() {
        None => grid.params(None)?,
        Some(list) => {
            let mut out = Vec::new();
            for p in list.split(',') {
                out.extend(grid.params(Some(p.trim()))?);
            }
            out
        }
    };
    let ts = times(args.common.t.as_deref(), "1")?;
    let seed = args.common.seed.unwrap_or(0);
    let template = grid.bundle(grid.points.first().map_or(&[][..], |p| p))?;
    select_states(&template, &args.state, seed)?;
    let mut rest: Vec<String> = vec!["t".into(), "state".into()];
    for i in 0..params.len() {
        for j in i..params.len() {
            rest.push(format!("F_{}_{}", params[i], params[j]));
        }
    }
    rest.extend(["min_eigenvalue", "oracle_max_dev", "commutator_expect", "offdiag_stated", "ratio_offdiag_stated"].map(String::from));
    let rest: Vec<&str> = rest.iter().map(String::as_str).collect();
    let mut report = Report::with_columns(columns(grid.names(), &rest));
    let width = report.columns.len();
    let tasks: Vec<MatrixTask> = grid
        .points
        .iter()
        .flat_map(|point| ts.iter().map(move |&t| MatrixTask { point, t }))
        .collect();
    let rows = par_map(&tasks, |task| -> Vec<Row> {
        let coords = ModelGrid::cells(task.point);
        let result = grid.bundle(task.point).map_err(CliError::from).and_then(|b| {
            let states = select_states(&b, &args.state, seed)?;
            Ok(qfim_rows(&b, &params, task.t, &states)?)
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
    Ok(Outcome::from_report(&format!("qfim {}", args.model), report))
}
