use cqfi_core::altqfi::{
    alt_qfi_direct_oracle, alt_qfi_thermal, alt_qfi_unitary, gamma_series, gamma_thermal_closed, GAMMA_N_MAX,
};
use cqfi_core::charop::FD_STEP;
use cqfi_core::operator::{c, evolve};
use cqfi_core::qfi::qfi_mixed;
use cqfi_core::state::{PureState, SpectralState};
use cqfi_core::thermal::thermal_state;
use cqfi_core::{CMatrix, ModelBundle};

use super::qfi::closed_charop;
use super::{columns, Outcome};
use crate::args::AltArgs;
use crate::context::{select_states, temperatures, times, ModelGrid, TOL};
use crate::error::{CliError, CliResult};
use crate::pool::par_map;
use crate::report::{Cell, Report, Row, Status};

const UNITARY_COLUMNS: [&str; 11] = [
    "param",
    "t",
    "state",
    "mix",
    "alt_qfi",
    "trace_form",
    "forms_dev",
    "oracle",
    "abs_diff",
    "sld_qfi",
    "ratio_alt_sld",
];

const THERMAL_COLUMNS: [&str; 10] = [
    "param",
    "T",
    "alt_qfi",
    "oracle",
    "abs_diff",
    "plus_minus_raw",
    "minus_plus_raw",
    "plus_minus_centred",
    "gamma_series_dev",
    "oracle_min_gap",
];

/// `(1 − p)|ψ⟩⟨ψ| + p·I/d`.
pub fn mixed_with_identity(psi: &PureState, p: f64) -> cqfi_core::Result<SpectralState> {
    let d = psi.dim();
    let rho = psi.projector() * c(1.0 - p) + CMatrix::identity(d, d) * c(p / d as f64);
    SpectralState::from_density(&rho)
}

fn unitary_rows(
    bundle: &ModelBundle,
    which: &str,
    t: f64,
    mix: f64,
    states: &[(String, PureState)],
) -> cqfi_core::Result<Vec<(Vec<Cell>, Status)>> {
    let h = closed_charop(bundle, which, t)?;
    let provider = bundle.provider(which)?;
    let theta = bundle.get(which)?;
    let mut out = Vec::new();
    for (label, psi) in states {
        let rho0 = mixed_with_identity(psi, mix)?;
        let alt = alt_qfi_unitary(&rho0, &h)?;
        let family = |th: f64| -> cqfi_core::Result<SpectralState> { rho0.transformed(&evolve(&provider(th)?, t)?) };
        let oracle = alt_qfi_direct_oracle(&family, theta, FD_STEP)?;
        let sld = qfi_mixed(&rho0, &h)?;
        let diff = (alt.value() - oracle.value).abs();
        let status = Status::from_checks(&[
            ("forms", alt.discrepancy() <= TOL.alt_forms * (1.0 + alt.value())),
            ("oracle", diff <= TOL.alt_oracle * (1.0 + alt.value())),
        ]);
        let ratio = (sld != 0.0).then(|| alt.value() / sld);
        out.push((
            vec![
                which.into(),
                t.into(),
                label.as_str().into(),
                mix.into(),
                alt.value().into(),
                alt.trace_form.into(),
                alt.discrepancy().into(),
                oracle.value.into(),
                diff.into(),
                sld.into(),
                ratio.into(),
            ],
            status,
        ));
    }
    Ok(out)
}

fn thermal_row(bundle: &ModelBundle, which: &str, temp: f64) -> cqfi_core::Result<(Vec<Cell>, Status)> {
    let beta = 1.0 / temp;
    let h = bundle.hamiltonian();
    let dh = bundle.dh(which)?;
    let s = bundle.structure(which)?;
    let report = alt_qfi_thermal(&h, &dh, &s, beta)?;
    let theta = bundle.get(which)?;
    let family = |th: f64| -> cqfi_core::Result<SpectralState> { thermal_state(&bundle.with(which, th)?.hamiltonian(), beta) };
    let oracle = alt_qfi_direct_oracle(&family, theta, FD_STEP)?;
    // The full-matrix series is not exact at a Fock cutoff.
    let gamma_dev = if bundle.truncation().is_exact() {
        let closed = gamma_thermal_closed(&h, &dh, &s, beta)?;
        let series = gamma_series(&h.scaled(-beta), &dh.scaled(-beta), GAMMA_N_MAX)?;
        Some(series.distance(&closed) / closed.norm().max(1e-300))
    } else {
        None
    };
    let diff = (report.value() - oracle.value).abs();
    let status = Status::from_checks(&[
        ("oracle", diff <= TOL.alt_oracle * (1.0 + report.value())),
        ("gamma_series", gamma_dev.map_or(true, |d| d <= TOL.gamma)),
    ]);
    Ok((
        vec![
            which.into(),
            temp.into(),
            report.value().into(),
            oracle.value.into(),
            diff.into(),
            report.plus_minus_raw.into(),
            report.minus_plus_raw.into(),
            report.plus_minus_centred.into(),
            gamma_dev.into(),
            oracle.min_gap.into(),
        ],
        status,
    ))
}

enum Task<'a> {
    Unitary { point: &'a [f64], param: &'a str, t: f64 },
    Thermal { point: &'a [f64], param: &'a str, temp: f64 },
}

pub fn run(args: &AltArgs) -> CliResult<Outcome> {
    let grid = ModelGrid::new(&args.model, &args.common)?;
    let params = grid.params(args.common.param.as_deref())?;
    let seed = args.common.seed.unwrap_or(0);
    let mix = args.mix.unwrap_or(0.2);
    if !(0.0..=1.0).contains(&mix) {
        return Err(CliError::usage("--mix must lie in [0, 1]"));
    }
    let thermal = args.temperature.is_some();
    let mut tasks = Vec::new();
    let rest: &[&str] = if thermal {
        let temps = temperatures(args.temperature.as_deref(), "1")?;
        for point in &grid.points {
            for param in &params {
                for &temp in &temps {
                    tasks.push(Task::Thermal { point, param, temp });
                }
            }
        }
        &THERMAL_COLUMNS
    } else {
        let template = grid.bundle(grid.points.first().map_or(&[][..], |p| p))?;
        select_states(&template, &args.state, seed)?;
        for point in &grid.points {
            for param in &params {
                for &t in &times(args.common.t.as_deref(), "1")? {
                    tasks.push(Task::Unitary { point, param, t });
                }
            }
        }
        &UNITARY_COLUMNS
    };
    let mut report = Report::with_columns(columns(grid.names(), rest));
    let width = report.columns.len();
    let rows = par_map(&tasks, |task| -> Vec<Row> {
        let point = match task {
            Task::Unitary { point, .. } | Task::Thermal { point, .. } => *point,
        };
        let coords = ModelGrid::cells(point);
        let result: CliResult<Vec<(Vec<Cell>, Status)>> = grid.bundle(point).map_err(CliError::from).and_then(|b| match task {
            Task::Unitary { param, t, .. } => {
                let states = select_states(&b, &args.state, seed)?;
                Ok(unitary_rows(&b, param, *t, mix, &states)?)
            }
            Task::Thermal { param, temp, .. } => Ok(vec![thermal_row(&b, param, *temp)?]),
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
    Ok(Outcome::from_report(&format!("altqfi {}", args.model), report))
}
