//! Model grids, state selection and the tolerances every command checks.

use cqfi_core::models::{h1, h2, MODEL_NAMES};
use cqfi_core::random::{random_pure, rng};
use cqfi_core::state::PureState;
use cqfi_core::{ModelBundle, Params};

use crate::args::{Common, Family, StateArgs};
use crate::error::{CliError, CliResult};
use crate::grid::{parse_axis, product, Axis};
use crate::report::{Cell, Report};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub conservation: f64,
    pub eigenop: f64,
    pub series_closed: f64,
    pub exact: f64,
    pub qfi: f64,
    pub thermal: f64,
    pub sld_residual: f64,
    pub bernoulli: f64,
    pub alt_forms: f64,
    pub alt_oracle: f64,
    pub gamma: f64,
    pub scan: f64,
}

pub const TOL: Tolerances = Tolerances {
    conservation: 1e-10,
    eigenop: 1e-10,
    series_closed: 1e-9,
    exact: 1e-6,
    qfi: 1e-5,
    thermal: 1e-6,
    sld_residual: 1e-7,
    bernoulli: 1e-7,
    alt_forms: 1e-9,
    alt_oracle: 1e-5,
    gamma: 1e-8,
    scan: 1e-6,
};

impl Tolerances {
    pub fn describe(&self) -> String {
        format!(
            "conservation={:e} eigenop={:e} series_closed={:e} exact={:e} qfi={:e} thermal={:e} \
             sld_residual={:e} bernoulli={:e} alt_forms={:e} alt_oracle={:e} gamma={:e} scan={:e}",
            self.conservation,
            self.eigenop,
            self.series_closed,
            self.exact,
            self.qfi,
            self.thermal,
            self.sld_residual,
            self.bernoulli,
            self.alt_forms,
            self.alt_oracle,
            self.gamma,
            self.scan
        )
    }
}

pub fn check_model(name: &str) -> CliResult<()> {
    if MODEL_NAMES.contains(&name) {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "unknown model '{name}' (expected one of {})",
            MODEL_NAMES.join(", ")
        )))
    }
}

/// Parameter axes of a model and their Cartesian product.
#[derive(Clone, Debug)]
pub struct ModelGrid {
    pub model: String,
    pub axes: Vec<Axis>,
    pub points: Vec<Vec<f64>>,
}

impl ModelGrid {
    pub fn new(model: &str, common: &Common) -> CliResult<Self> {
        check_model(model)?;
        let template = ModelBundle::from_params(model, &Params::new())?;
        let mut axes = Vec::new();
        for (name, spec) in common.params.given() {
            if !template.param_names().contains(&name) {
                return Err(CliError::usage(format!("model {model} has no parameter --{name}")));
            }
            axes.push(parse_axis(name, spec)?);
        }
        let order = template.param_names();
        axes.sort_by_key(|a| order.iter().position(|n| *n == a.name));
        let points = product(&axes);
        Ok(Self {
            model: model.to_string(),
            axes,
            points,
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.axes.iter().map(|a| a.name.clone()).collect()
    }

    pub fn bundle(&self, point: &[f64]) -> cqfi_core::Result<ModelBundle> {
        let params: Params = self.axes.iter().map(|a| a.name.clone()).zip(point.iter().copied()).collect();
        ModelBundle::from_params(&self.model, &params)
    }

    pub fn cells(point: &[f64]) -> Vec<Cell> {
        point.iter().map(|&v| Cell::Num(v)).collect()
    }

    /// The estimated parameters selected by `--param`, or every estimable one.
    pub fn params(&self, param: Option<&str>) -> CliResult<Vec<String>> {
        let template = ModelBundle::from_params(&self.model, &Params::new())?;
        match param {
            None => Ok(template.estimable().iter().map(|s| s.to_string()).collect()),
            Some(p) if template.estimable().contains(&p) => Ok(vec![p.to_string()]),
            Some(p) => Err(CliError::usage(format!(
                "{} cannot estimate '{p}' (estimable: {})",
                self.model,
                template.estimable().join(", ")
            ))),
        }
    }
}

pub fn axis_or(name: &str, spec: Option<&str>, default: &str) -> CliResult<Vec<f64>> {
    Ok(parse_axis(name, spec.unwrap_or(default))?.values)
}

/// Temperatures from `--T`, all positive.
pub fn temperatures(spec: Option<&str>, default: &str) -> CliResult<Vec<f64>> {
    let ts = axis_or("T", spec, default)?;
    if ts.iter().any(|&t| t <= 0.0) {
        return Err(CliError::usage("temperatures must be positive"));
    }
    Ok(ts)
}

pub fn times(spec: Option<&str>, default: &str) -> CliResult<Vec<f64>> {
    let ts = axis_or("t", spec, default)?;
    if ts.iter().any(|&t| t < 0.0) {
        return Err(CliError::usage("times must be non-negative"));
    }
    Ok(ts)
}

/// Resolved pure states as `(label, state)`, in a fixed order.
pub fn select_states(bundle: &ModelBundle, sel: &StateArgs, seed: u64) -> CliResult<Vec<(String, PureState)>> {
    if let Some(n) = sel.random {
        let mut r = rng(seed);
        return Ok((0..n).map(|k| (format!("random{k}"), random_pure(bundle.dim(), &mut r))).collect());
    }
    if sel.ratio.is_some() || sel.phi.is_some() || sel.family.is_some() {
        if bundle.dim() != 4 {
            return Err(CliError::usage("amplitude families need a two-spin model"));
        }
        let ratio = sel.ratio.unwrap_or(1.0);
        let phi = sel.phi.unwrap_or(0.0);
        if !(ratio > 0.0 && ratio.is_finite() && phi.is_finite()) {
            return Err(CliError::usage("--ratio must be positive and --phi finite"));
        }
        let (label, state) = match sel.family.unwrap_or(Family::Psi) {
            Family::Psi => ("psi", h1::psi_opt(ratio, 1.0, phi)),
            Family::Phi => ("phi", h2::phi_opt_state(ratio, 1.0, phi)),
        };
        return Ok(vec![(format!("{label}(r={ratio},phi={phi})"), state)]);
    }
    match &sel.state {
        Some(name) => Ok(vec![(name.clone(), bundle.reference_state(name).map_err(|e| CliError::usage(e.to_string()))?)]),
        None => Ok(bundle.reference_states()),
    }
}

/// Metadata shared by every report.
pub fn stamp(report: &mut Report, command_line: &str, seed: Option<u64>, config: &str) {
    report.meta("cqfi", crate::report::VERSION);
    report.meta("command", command_line);
    report.meta("seed", seed.map_or("none".to_string(), |s| s.to_string()));
    report.meta("tolerances", TOL.describe());
    report.meta("config", config);
}
