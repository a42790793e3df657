use cqfi_core::audit::thermal_oracle;
use cqfi_core::charop::FD_STEP;
use cqfi_core::models::{h1, h2, two_spin};
use cqfi_core::operator::relative_distance;
use cqfi_core::qfi::{density_derivative, sld_residual};
use cqfi_core::state::{expectation, SpectralState};
use cqfi_core::thermal::{
    qfi_thermal, qfi_thermal_stated, sld_bernoulli_series, sld_thermal_closed, thermal_state, BERNOULLI_N_MAX,
};
use cqfi_core::ModelBundle;

use super::{columns, Outcome};
use crate::args::ThermalArgs;
use crate::context::{temperatures, ModelGrid, TOL};
use crate::error::CliResult;
use crate::pool::par_map;
use crate::report::{Cell, Report, Row, Status};

pub const THERMAL_COLUMNS: [&str; 16] = [
    "param",
    "T",
    "beta",
    "qfi",
    "oracle",
    "rel_diff",
    "stated_generic",
    "stated",
    "ratio_oracle_stated",
    "lowT_stated",
    "sld_residual",
    "bernoulli_dev",
    "beta_spread",
    "within_radius",
    "zz_corr",
    "zz_corr_stated",
];

/// Stated thermal QFI, low-temperature form and `⟨σᶻσᶻ⟩` of the model.
fn stated(bundle: &ModelBundle, which: &str, beta: f64) -> (Option<f64>, Option<f64>, Option<f64>) {
    let temp = 1.0 / beta;
    match bundle {
        ModelBundle::H1(p) => (
            Some(h1::f_t_stated(p.b, beta)),
            Some(h1::f_t_lowt_stated(p.b, temp)),
            Some(h1::correlation_zz(p.b, beta)),
        ),
        ModelBundle::H2(p) => {
            let low = h2::f_t_lowt_stated(p.gamma, p.bp, p.bm, temp);
            let corr = Some(h2::correlation_zz(p.gamma, p.bp, p.bm, beta));
            if which == "Bp" {
                (Some(h2::f_t_plus_stated(p.gamma, p.bp, p.bm, beta)), Some(low.0), corr)
            } else {
                (Some(h2::f_t_minus_stated(p.gamma, p.bp, p.bm, beta)), Some(low.1), corr)
            }
        }
        _ => (None, None, None),
    }
}

pub fn thermal_row(bundle: &ModelBundle, which: &str, temp: f64) -> cqfi_core::Result<(Vec<Cell>, Status)> {
    let beta = 1.0 / temp;
    let h = bundle.hamiltonian();
    let dh = bundle.dh(which)?;
    let s = bundle.structure(which)?;
    let omega = s.require_verified()?;
    let rho = thermal_state(&h, beta)?;
    let f = qfi_thermal(&dh, &s, beta, &rho)?;
    let oracle = thermal_oracle(bundle, which, beta)?;
    let generic = qfi_thermal_stated(&dh, &s.v, omega, beta, &rho)?;
    let (model, low, corr_stated) = stated(bundle, which, beta);
    let ratio = model.and_then(|m| (m != 0.0).then(|| oracle / m));

    let l = sld_thermal_closed(&dh, &s, beta, &rho)?;
    let theta = bundle.get(which)?;
    let family = |th: f64| -> cqfi_core::Result<SpectralState> { thermal_state(&bundle.with(which, th)?.hamiltonian(), beta) };
    let drho = density_derivative(&family, theta, FD_STEP)?;
    let residual = sld_residual(&rho.density(), &drho, &l);

    let series = sld_bernoulli_series(&h, &dh, beta, BERNOULLI_N_MAX).ok();
    let bernoulli_dev = series.as_ref().map(|b| relative_distance(b.l.matrix(), l.matrix()));
    let spread = cqfi_core::operator::spectral(&h)?.spread();
    let within = series.as_ref().map_or(beta * spread < std::f64::consts::PI, |b| b.within_radius);

    let corr = (bundle.dim() == 4).then(|| expectation(&rho, &two_spin::zz()).map(|z| z.re)).transpose()?;
    let rel = (f - oracle).abs() / oracle.abs().max(1e-300);
    let mut checks = vec![
        ("oracle", rel <= TOL.thermal || (f - oracle).abs() <= 1e-12),
        ("sld_residual", residual <= TOL.sld_residual),
    ];
    if within {
        checks.push(("bernoulli", bernoulli_dev.is_some_and(|d| d <= TOL.bernoulli)));
    }
    let cells = vec![
        which.into(),
        temp.into(),
        beta.into(),
        f.into(),
        oracle.into(),
        rel.into(),
        generic.into(),
        model.into(),
        ratio.into(),
        low.into(),
        residual.into(),
        bernoulli_dev.into(),
        (beta * spread).into(),
        within.into(),
        corr.into(),
        corr_stated.into(),
    ];
    Ok((cells, Status::from_checks(&checks)))
}

struct Task<'a> {
    point: &'a [f64],
    param: &'a str,
    temp: f64,
}

pub fn thermal_report(grid: &ModelGrid, params: &[String], temps: &[f64]) -> CliResult<Report> {
    let mut tasks = Vec::new();
    for point in &grid.points {
        for param in params {
            for &temp in temps {
                tasks.push(Task { point, param, temp });
            }
        }
    }
    let mut report = Report::with_columns(columns(grid.names(), &THERMAL_COLUMNS));
    let width = report.columns.len();
    let rows = par_map(&tasks, |task| {
        let coords = ModelGrid::cells(task.point);
        match grid.bundle(task.point).and_then(|b| thermal_row(&b, task.param, task.temp)) {
            Ok((cells, status)) => {
                let mut all = coords;
                all.extend(cells);
                Row::new(all, status)
            }
            Err(e) => Row::error(coords, width, e),
        }
    })?;
    for row in rows {
        report.push(row);
    }
    Ok(report)
}

pub fn run(args: &ThermalArgs) -> CliResult<Outcome> {
    let grid = ModelGrid::new(&args.model, &args.common)?;
    let params = grid.params(args.common.param.as_deref())?;
    let temps = temperatures(args.temperature.as_deref(), "0.5,1.0,1.5")?;
    let report = thermal_report(&grid, &params, &temps)?;
    Ok(Outcome::from_report(&format!("thermal {}", args.model), report))
}
