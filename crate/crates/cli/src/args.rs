//! Command-line definitions. Every option can also come from a JSON object
//! passed with `--config`; flags given on the command line win.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::{self, DeserializeOwned, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "cqfi", version, about = "Characteristic-operator QFI toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the conserved structure and the three characteristic-operator routes.
    Verify(VerifyArgs),
    /// Characteristic-operator deviations and long-time behaviour.
    Charop(CharopArgs),
    /// Pure-state QFI against the fidelity oracle.
    Qfi(QfiArgs),
    /// Multiparameter QFI matrix.
    Qfim(QfiArgs),
    /// Thermal-state QFI against the SLD oracle.
    Thermal(ThermalArgs),
    /// Alternative QFI 4Tr(∂√ρ)² for unitary and thermal families.
    Altqfi(AltArgs),
    /// Figure data: QFI curves, thermal curves, optimal states, phases.
    Sweep(SweepArgs),
    /// Stated closed forms against oracle values.
    Audit(AuditArgs),
}

fn de_axis<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    let v = Option::<Value>::deserialize(d)?;
    let text = |v: &Value| -> Result<String, D::Error> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(de::Error::custom(format!("expected a number or axis string, got {other}"))),
        }
    };
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Array(items)) => {
            let parts = items.iter().map(text).collect::<Result<Vec<_>, _>>()?;
            Ok(Some(parts.join(",")))
        }
        Some(other) => text(&other).map(Some),
    }
}

/// Model parameters, each a single value, a comma list or `start:stop:points`.
#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct ParamArgs {
    #[arg(long = "B", value_name = "AXIS")]
    #[serde(rename = "B", deserialize_with = "de_axis")]
    pub b: Option<String>,
    #[arg(long, value_name = "AXIS")]
    #[serde(deserialize_with = "de_axis")]
    pub gamma: Option<String>,
    #[arg(long = "Bp", value_name = "AXIS")]
    #[serde(rename = "Bp", deserialize_with = "de_axis")]
    pub bp: Option<String>,
    #[arg(long = "Bm", value_name = "AXIS")]
    #[serde(rename = "Bm", deserialize_with = "de_axis")]
    pub bm: Option<String>,
    #[arg(long, value_name = "AXIS")]
    #[serde(deserialize_with = "de_axis")]
    pub chi: Option<String>,
    #[arg(long, value_name = "AXIS")]
    #[serde(deserialize_with = "de_axis")]
    pub wa: Option<String>,
    #[arg(long, value_name = "AXIS")]
    #[serde(deserialize_with = "de_axis")]
    pub wb: Option<String>,
    #[arg(long, value_name = "AXIS")]
    #[serde(deserialize_with = "de_axis")]
    pub m: Option<String>,
    #[arg(long, value_name = "AXIS")]
    #[serde(deserialize_with = "de_axis")]
    pub l: Option<String>,
    #[arg(long, value_name = "AXIS")]
    #[serde(deserialize_with = "de_axis")]
    pub na: Option<String>,
    #[arg(long, value_name = "AXIS")]
    #[serde(deserialize_with = "de_axis")]
    pub ncut: Option<String>,
}

impl ParamArgs {
    /// `(flag name, axis spec)` for every parameter given.
    pub fn given(&self) -> Vec<(&'static str, &str)> {
        [
            ("B", &self.b),
            ("gamma", &self.gamma),
            ("Bp", &self.bp),
            ("Bm", &self.bm),
            ("chi", &self.chi),
            ("wa", &self.wa),
            ("wb", &self.wb),
            ("m", &self.m),
            ("l", &self.l),
            ("na", &self.na),
            ("ncut", &self.ncut),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

/// Options shared by the model commands.
#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct Common {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Estimated parameter (defaults to every estimable one).
    #[arg(long)]
    pub param: Option<String>,
    /// Time axis.
    #[arg(long, value_name = "AXIS")]
    #[serde(deserialize_with = "de_axis")]
    pub t: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with default values for any option.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct VerifyArgs {
    /// Model: h1, h2, h3 or optomech.
    #[arg(value_name = "MODEL")]
    #[serde(skip)]
    pub model: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Dimension of the random negative control.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct CharopArgs {
    /// Model: h1, h2, h3 or optomech.
    #[arg(value_name = "MODEL")]
    #[serde(skip)]
    pub model: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// a₁|00⟩ + a₂e^{iφ}|11⟩
    Psi,
    /// b₁|01⟩ + b₂e^{iφ}|10⟩
    Phi,
}

/// State selection for pure-state commands.
#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct StateArgs {
    /// Named reference state of the model.
    #[arg(long)]
    pub state: Option<String>,
    /// Two-amplitude family for `--ratio`/`--phi`.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Amplitude ratio a₁/a₂ of the family state.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Relative phase of the family state.
    #[arg(long)]
    pub phi: Option<f64>,
    /// Number of seeded random pure states.
    #[arg(long)]
    pub random: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct QfiArgs {
    /// Model: h1, h2, h3 or optomech.
    #[arg(value_name = "MODEL")]
    #[serde(skip)]
    pub model: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct ThermalArgs {
    /// Model: h1, h2, h3 or optomech.
    #[arg(value_name = "MODEL")]
    #[serde(skip)]
    pub model: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Temperature axis.
    #[arg(long = "T", value_name = "AXIS")]
    #[serde(rename = "T", deserialize_with = "de_axis")]
    pub temperature: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct AltArgs {
    /// Model: h1, h2, h3 or optomech.
    #[arg(value_name = "MODEL")]
    #[serde(skip)]
    pub model: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Temperature axis; selects the thermal family.
    #[arg(long = "T", value_name = "AXIS")]
    #[serde(rename = "T", deserialize_with = "de_axis")]
    pub temperature: Option<String>,
    /// Weight of the maximally mixed state in the initial state.
    #[arg(long)]
    pub mix: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct SweepArgs {
    /// Model: h1, h2, h3 or optomech.
    #[arg(value_name = "MODEL")]
    #[serde(skip)]
    pub model: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Thermal QFI over `--T`.
    #[arg(long)]
    pub thermal: bool,
    /// Temperature axis.
    #[arg(long = "T", value_name = "AXIS")]
    #[serde(rename = "T", deserialize_with = "de_axis")]
    pub temperature: Option<String>,
    /// Optimal two-amplitude states by exhaustive scan.
    #[arg(long)]
    pub optimal_points: bool,
    /// Use the long-time characteristic operator.
    #[arg(long)]
    pub longtime: bool,
    /// Random-state samples compared against the scan.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Optimal phase over the field and time axes.
    #[arg(long)]
    pub phi_opt: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
pub struct AuditArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 1 when a ratio is unstable or off its expected value.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn is_unset(v: &Value) -> bool {
    matches!(v, Value::Null | Value::Bool(false))
}

/// Fills options missing from `cli` with values from the JSON object in `path`.
pub fn merge_config<T: Serialize + DeserializeOwned>(cli: &T, path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(serde_json::from_value(serde_json::to_value(cli).expect("serializable"))
            .expect("round trip"));
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config: Map<String, Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let Value::Object(flags) = serde_json::to_value(cli).expect("serializable") else {
        unreachable!("argument structs serialize to objects")
    };
    let mut merged = Map::new();
    for (k, v) in config {
        if !flags.contains_key(&k) {
            return Err(CliError::usage(format!("{}: unknown option '{k}'", path.display())));
        }
        merged.insert(k, v);
    }
    for (k, v) in flags {
        if !is_unset(&v) || !merged.contains_key(&k) {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}
