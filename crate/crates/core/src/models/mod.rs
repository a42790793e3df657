//! The four model systems: two ferromagnetic spin pairs, a spin-one twisting
//! model and a cavity optomechanical mirror.

pub mod h1;
pub mod h2;
pub mod h3;
pub mod optomech;
pub mod scan;

use std::collections::BTreeMap;

use crate::conserved::{analyze_truncated, ConservedStructure};
use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::state::PureState;
use crate::charop::{char_series_stepped, CharOperatorBundle, SERIES_N_MAX, SERIES_TAIL_TOL};
use crate::window::{ExactWindow, Truncation};

pub mod pauli {
    use crate::operator::{c, CMatrix, HermitianOperator, I};

    fn op(m: [[num_complex::Complex64; 2]; 2]) -> HermitianOperator {
        HermitianOperator::new(CMatrix::from_fn(2, 2, |i, j| m[i][j])).expect("Pauli matrix")
    }

    pub fn x() -> HermitianOperator {
        op([[c(0.0), c(1.0)], [c(1.0), c(0.0)]])
    }

    pub fn y() -> HermitianOperator {
        op([[c(0.0), -I], [I, c(0.0)]])
    }

    pub fn z() -> HermitianOperator {
        op([[c(1.0), c(0.0)], [c(0.0), c(-1.0)]])
    }

    pub fn identity() -> HermitianOperator {
        HermitianOperator::identity(2)
    }
}

/// Two-qubit operators in the basis `|00⟩, |01⟩, |10⟩, |11⟩` with
/// `σᶻ|0⟩ = |0⟩`.
pub mod two_spin {
    use super::pauli;
    use crate::operator::{c, kron, HermitianOperator};

    fn h(m: crate::operator::CMatrix) -> HermitianOperator {
        HermitianOperator::new(m).expect("two-spin operator is Hermitian")
    }

    pub fn pair(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
        h(kron(a.matrix(), b.matrix()))
    }

    pub fn first(a: &HermitianOperator) -> HermitianOperator {
        pair(a, &pauli::identity())
    }

    pub fn second(a: &HermitianOperator) -> HermitianOperator {
        pair(&pauli::identity(), a)
    }

    fn combo(terms: &[(f64, HermitianOperator)]) -> HermitianOperator {
        let mut m = crate::operator::CMatrix::zeros(4, 4);
        for (w, t) in terms {
            m += t.matrix() * c(*w);
        }
        h(m)
    }

    pub fn xx() -> HermitianOperator {
        pair(&pauli::x(), &pauli::x())
    }

    pub fn yy() -> HermitianOperator {
        pair(&pauli::y(), &pauli::y())
    }

    pub fn zz() -> HermitianOperator {
        pair(&pauli::z(), &pauli::z())
    }

    pub fn z_sum() -> HermitianOperator {
        &first(&pauli::z()) + &second(&pauli::z())
    }

    pub fn z_diff() -> HermitianOperator {
        &first(&pauli::z()) - &second(&pauli::z())
    }

    /// `(J_x, J_y, J_z)`, acting on `span{|00⟩, |11⟩}`.
    pub fn j() -> [HermitianOperator; 3] {
        let xy = pair(&pauli::x(), &pauli::y());
        let yx = pair(&pauli::y(), &pauli::x());
        [
            combo(&[(0.25, xx()), (-0.25, yy())]),
            combo(&[(0.25, xy), (0.25, yx)]),
            z_sum().scaled(0.25),
        ]
    }

    /// `(S_x, S_y, S_z)`, acting on `span{|01⟩, |10⟩}`.
    pub fn s() -> [HermitianOperator; 3] {
        let xy = pair(&pauli::x(), &pauli::y());
        let yx = pair(&pauli::y(), &pauli::x());
        [
            combo(&[(0.25, xy), (-0.25, yx)]),
            combo(&[(0.25, xx()), (0.25, yy())]),
            z_diff().scaled(0.25),
        ]
    }

    pub fn dot(x: [f64; 3], ops: &[HermitianOperator; 3]) -> HermitianOperator {
        combo(&[
            (x[0], ops[0].clone()),
            (x[1], ops[1].clone()),
            (x[2], ops[2].clone()),
        ])
    }

    pub fn squared(ops: &[HermitianOperator; 3]) -> HermitianOperator {
        let m = ops.iter().fold(crate::operator::CMatrix::zeros(4, 4), |acc, o| {
            acc + o.matrix() * o.matrix()
        });
        h(m)
    }
}

/// Model parameters by name.
pub type Params = BTreeMap<String, f64>;

/// A model with its current parameter values.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelBundle {
    H1(h1::H1),
    H2(h2::H2),
    H3(h3::H3),
    Optomech(optomech::Optomech),
}

pub fn h1_bundle(b: f64) -> ModelBundle {
    ModelBundle::H1(h1::H1 { b })
}

pub fn h2_bundle(gamma: f64, bp: f64, bm: f64) -> ModelBundle {
    ModelBundle::H2(h2::H2 { gamma, bp, bm })
}

pub fn h3_bundle(chi: f64, b: f64) -> Result<ModelBundle> {
    Ok(ModelBundle::H3(h3::H3::new(chi, b)?))
}

pub fn optomech_bundle(p: optomech::Optomech) -> Result<ModelBundle> {
    p.validate()?;
    Ok(ModelBundle::Optomech(p))
}

/// Extra levels used to probe convergence in a Fock cutoff.
pub const CUTOFF_PROBE: usize = 4;
/// Per-row tolerance, relative to `‖ℋ‖`, for a level to count as converged.
pub const CUTOFF_ROW_TOL: f64 = 1e-11;

pub const MODEL_NAMES: [&str; 4] = ["h1", "h2", "h3", "optomech"];

impl ModelBundle {
    /// Builds a model from its name, taking defaults for missing parameters.
    pub fn from_params(name: &str, params: &Params) -> Result<Self> {
        let mut bundle = match name {
            "h1" => h1_bundle(1.0),
            "h2" => h2_bundle(0.5, 0.3, 0.7),
            "h3" => h3_bundle(1.0, 1.0)?,
            "optomech" => ModelBundle::Optomech(optomech::Optomech::default()),
            other => return Err(Error::InvalidArgument(format!("unknown model '{other}'"))),
        };
        for (k, &v) in params {
            bundle = bundle.with(k, v)?;
        }
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::H1(_) => "h1",
            Self::H2(_) => "h2",
            Self::H3(_) => "h3",
            Self::Optomech(_) => "optomech",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::H1(_) | Self::H2(_) => 4,
            Self::H3(_) => 3,
            Self::Optomech(o) => o.ncut,
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Self::H1(_) => &["B"],
            Self::H2(_) => &["gamma", "Bp", "Bm"],
            Self::H3(_) => &["chi", "B"],
            Self::Optomech(_) => &["wa", "wb", "m", "l", "na", "ncut"],
        }
    }

    /// Parameters that can be estimated.
    pub fn estimable(&self) -> &'static [&'static str] {
        match self {
            Self::H1(_) | Self::H3(_) => &["B"],
            Self::H2(_) => &["Bp", "Bm"],
            Self::Optomech(_) => &["m", "l"],
        }
    }

    /// The estimated parameter used when none is named.
    pub fn default_param(&self) -> &'static str {
        match self {
            Self::Optomech(o) => o.param.name(),
            other => other.estimable()[0],
        }
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        let v = match (self, name) {
            (Self::H1(p), "B") => p.b,
            (Self::H2(p), "gamma") => p.gamma,
            (Self::H2(p), "Bp") => p.bp,
            (Self::H2(p), "Bm") => p.bm,
            (Self::H3(p), "chi") => p.chi,
            (Self::H3(p), "B") => p.b,
            (Self::Optomech(p), "wa") => p.wa,
            (Self::Optomech(p), "wb") => p.wb,
            (Self::Optomech(p), "m") => p.m,
            (Self::Optomech(p), "l") => p.l,
            (Self::Optomech(p), "na") => p.na,
            (Self::Optomech(p), "ncut") => p.ncut as f64,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        };
        Ok(v)
    }

    /// Copy with one parameter replaced. Not validated.
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be finite")));
        }
        let mut out = self.clone();
        match (&mut out, name) {
            (Self::H1(p), "B") => p.b = value,
            (Self::H2(p), "gamma") => p.gamma = value,
            (Self::H2(p), "Bp") => p.bp = value,
            (Self::H2(p), "Bm") => p.bm = value,
            (Self::H3(p), "chi") => p.chi = value,
            (Self::H3(p), "B") => p.b = value,
            (Self::Optomech(p), "wa") => p.wa = value,
            (Self::Optomech(p), "wb") => p.wb = value,
            (Self::Optomech(p), "m") => p.m = value,
            (Self::Optomech(p), "l") => p.l = value,
            (Self::Optomech(p), "na") => p.na = value,
            (Self::Optomech(p), "ncut") => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidArgument(format!("ncut must be a whole number, got {value}")));
                }
                p.ncut = value as usize
            }
            _ => return Err(Error::UnknownParameter(name.to_string())),
        }
        Ok(out)
    }

    /// Selects the estimated parameter where the model fixes one.
    pub fn estimating(&self, which: &str) -> Result<Self> {
        self.check_param(which)?;
        Ok(match self {
            Self::Optomech(p) => Self::Optomech(p.with_param(which)?),
            other => other.clone(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::H3(p) => h3::H3::new(p.chi, p.b).map(|_| ()),
            Self::Optomech(p) => p.validate(),
            _ => Ok(()),
        }
    }

    fn check_param(&self, which: &str) -> Result<()> {
        if self.estimable().contains(&which) {
            Ok(())
        } else {
            Err(Error::UnknownParameter(which.to_string()))
        }
    }

    pub fn hamiltonian(&self) -> HermitianOperator {
        match self {
            Self::H1(p) => h1::hamiltonian(p.b),
            Self::H2(p) => h2::hamiltonian(p.gamma, p.bp, p.bm),
            Self::H3(p) => h3::hamiltonian(p.chi, p.b),
            Self::Optomech(p) => p.hamiltonian(),
        }
    }

    /// `∂H/∂θ` for the named parameter.
    pub fn dh(&self, which: &str) -> Result<HermitianOperator> {
        self.check_param(which)?;
        Ok(match self {
            Self::H1(_) => h1::dh(),
            Self::H2(_) => {
                if which == "Bp" {
                    h2::dh_plus()
                } else {
                    h2::dh_minus()
                }
            }
            Self::H3(_) => h3::dh(),
            Self::Optomech(p) => p.with_param(which)?.dh(),
        })
    }

    pub fn analytic_omega(&self, which: &str) -> Result<f64> {
        self.check_param(which)?;
        Ok(match self {
            Self::H1(p) => h1::omega(p.b),
            Self::H2(p) => {
                if which == "Bp" {
                    h2::omega_plus(p.gamma, p.bp)
                } else {
                    h2::omega_minus(p.bm)
                }
            }
            Self::H3(p) => h3::omega(p.chi, p.b),
            Self::Optomech(p) => p.wb,
        })
    }

    pub fn analytic_v(&self, which: &str) -> Result<HermitianOperator> {
        self.check_param(which)?;
        Ok(match self {
            Self::H1(p) => h1::analytic_v(p.b),
            Self::H2(p) => {
                if which == "Bp" {
                    h2::v_plus_op(p.gamma, p.bp)
                } else {
                    h2::v_minus_op(p.bm)
                }
            }
            Self::H3(p) => h3::analytic_v(p.chi, p.b),
            Self::Optomech(p) => p.with_param(which)?.analytic_v(),
        })
    }

    pub fn truncation(&self) -> Truncation {
        match self {
            Self::Optomech(p) => p.truncation(),
            _ => Truncation::none(),
        }
    }

    /// The three routes to `ℋ` for the named parameter at time `t`. For a
    /// Fock-truncated model the comparison keeps only the levels that have
    /// converged in the cutoff, see [`converged_window`](Self::converged_window).
    pub fn char_routes(&self, which: &str, t: f64) -> Result<CharOperatorBundle> {
        let provider = self.provider(which)?;
        let dh = self.dh(which)?;
        let mut b = CharOperatorBundle::build_with(&provider, Some(&dh), self.get(which)?, t, &self.truncation())?;
        if let Some(w) = self.converged_window_from(which, t, b.h_series.as_ref())? {
            b.restrict(&w);
        }
        Ok(b)
    }

    /// Lowest levels whose rows of the truncated `ℋ` move by at most
    /// `CUTOFF_ROW_TOL·‖ℋ‖` when the cutoff grows by `CUTOFF_PROBE` levels.
    /// `None` for models without a cutoff.
    pub fn converged_window(&self, which: &str, t: f64) -> Result<Option<ExactWindow>> {
        self.converged_window_from(which, t, None)
    }

    fn converged_window_from(
        &self,
        which: &str,
        t: f64,
        known: Option<&HermitianOperator>,
    ) -> Result<Option<ExactWindow>> {
        let Self::Optomech(p) = self else {
            return Ok(None);
        };
        let series = |m: &Self| -> Result<HermitianOperator> {
            Ok(char_series_stepped(&m.hamiltonian(), &m.dh(which)?, t, SERIES_N_MAX, SERIES_TAIL_TOL)?.op)
        };
        let a = match known {
            Some(a) => a.clone(),
            None => series(self)?,
        };
        let b = series(&Self::Optomech(p.with_ncut(p.ncut + CUTOFF_PROBE)))?;
        let (a, b) = (a.matrix(), b.matrix());
        let n = p.ncut;
        let scale = a.norm().max(f64::MIN_POSITIVE);
        let converged = (0..n)
            .take_while(|&i| {
                let d: f64 = (0..n + CUTOFF_PROBE)
                    .map(|j| {
                        let x = if j < n { a[(i, j)] } else { 0.0.into() };
                        (x - b[(i, j)]).norm_sqr()
                    })
                    .sum();
                d.sqrt() <= CUTOFF_ROW_TOL * scale
            })
            .count();
        Ok(Some(ExactWindow::full(n).leading(converged)))
    }

    /// Numerically estimated conserved structure for the named parameter.
    pub fn structure(&self, which: &str) -> Result<ConservedStructure> {
        analyze_truncated(&self.hamiltonian(), &self.dh(which)?, &self.truncation())
    }

    /// `θ ↦ H(θ)` with every other parameter held fixed.
    pub fn provider(&self, which: &str) -> Result<impl Fn(f64) -> Result<HermitianOperator> + Send + Sync + '_> {
        self.check_param(which)?;
        let which = which.to_string();
        Ok(move |theta: f64| Ok(self.with(&which, theta)?.hamiltonian()))
    }

    pub fn reference_states(&self) -> Vec<(String, PureState)> {
        match self {
            Self::H1(_) => vec![
                ("psi_opt".into(), h1::psi_opt(1.0, 1.0, std::f64::consts::FRAC_PI_2)),
                ("up_up".into(), PureState::basis(4, 0).expect("basis state")),
            ],
            Self::H2(_) => vec![
                ("psi_opt".into(), h1::psi_opt(1.0, 1.0, std::f64::consts::FRAC_PI_2)),
                ("phi_opt".into(), h2::phi_opt_state(1.0, 1.0, std::f64::consts::FRAC_PI_2)),
            ],
            Self::H3(_) => vec![
                ("noon".into(), h3::noon()),
                ("middle".into(), PureState::basis(3, 1).expect("basis state")),
            ],
            Self::Optomech(p) => vec![("vacuum".into(), p.vacuum())],
        }
    }

    pub fn reference_state(&self, name: &str) -> Result<PureState> {
        self.reference_states()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown state '{name}' for {}", self.name())))
    }

    /// Named closed-form scalars at time `t` (and `β` where thermal).
    pub fn formulas(&self, t: f64, beta: Option<f64>) -> Vec<(&'static str, f64)> {
        match self {
            Self::H1(p) => p.formulas(t, beta),
            Self::H2(p) => p.formulas(t, beta),
            Self::H3(p) => p.formulas(t),
            Self::Optomech(p) => p.formulas(t),
        }
    }
}
