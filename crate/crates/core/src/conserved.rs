//! Conserved-quantity structure of a `(H, ∂H)` pair: the eigenvalue `Ω²` of
//! `(H^×)²` on `H^×∂H`, the operator `𝒱 = [(H^×)² − Ω²]∂H`, and residuals
//! certifying both.

use crate::error::{Error, Result};
use crate::operator::{c, commutator, AsMatrix, CMatrix, HermitianOperator};
use crate::window::{ExactWindow, Truncation};

/// Residual threshold for a verified structure.
pub const PASS_TOL: f64 = 1e-8;
/// `‖[H, ∂H]‖` below this (relative to `‖H‖‖∂H‖`) means the parameter commutes.
pub const COMMUTING_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OmegaSq {
    Estimated(f64),
    /// `[H, ∂H] = 0`; the characteristic operator is exactly `−t∂H`.
    ParameterCommuting,
}

/// `[(H^×)^k A]` for `k = 0..=n`, each paired with the window on which it is
/// exact. Entries outside the window are zeroed.
pub fn adjoint_ladder(
    h: &HermitianOperator,
    a: &impl AsMatrix,
    n: usize,
    truncation: &Truncation,
) -> Result<Vec<(CMatrix, ExactWindow)>> {
    let mut out = Vec::with_capacity(n + 1);
    let mut x = a.as_matrix().clone();
    let mut w = ExactWindow::full(h.dim());
    if x.nrows() != h.dim() || x.ncols() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: x.nrows(),
        });
    }
    out.push((x.clone(), w.clone()));
    for _ in 0..n {
        w = w.after_commutator(h, truncation);
        x = commutator(h, &x)?;
        w.mask(&mut x);
        out.push((x.clone(), w.clone()));
    }
    Ok(out)
}

pub fn estimate_omega_sq(h: &HermitianOperator, dh: &HermitianOperator) -> Result<OmegaSq> {
    estimate_omega_sq_truncated(h, dh, &Truncation::none())
}

/// Hilbert–Schmidt Rayleigh quotient `⟨A, (H^×)²A⟩ / ⟨A, A⟩` with
/// `A = H^×∂H`, evaluated on the exact window.
pub fn estimate_omega_sq_truncated(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    truncation: &Truncation,
) -> Result<OmegaSq> {
    let ladder = adjoint_ladder(h, dh, 3, truncation)?;
    let w = &ladder[3].1;
    if w.is_empty() {
        return Err(Error::InvalidArgument(
            "truncated space too small for a third-order commutator".into(),
        ));
    }
    let a = &ladder[1].0;
    let scale = (h.norm() * dh.norm()).max(1.0);
    let a_norm_sq = w.inner(a, a).re;
    if a_norm_sq.sqrt() <= COMMUTING_TOL * scale {
        return Ok(OmegaSq::ParameterCommuting);
    }
    Ok(OmegaSq::Estimated(w.inner(a, &ladder[3].0).re / a_norm_sq))
}

pub fn build_v(h: &HermitianOperator, dh: &HermitianOperator, omega_sq: f64) -> Result<HermitianOperator> {
    build_v_truncated(h, dh, omega_sq, &Truncation::none())
}

/// `𝒱 = (H^×)²∂H − Ω²∂H`, masked to its exact window.
pub fn build_v_truncated(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    omega_sq: f64,
    truncation: &Truncation,
) -> Result<HermitianOperator> {
    let ladder = adjoint_ladder(h, dh, 2, truncation)?;
    let w = &ladder[2].1;
    let v = &ladder[2].0 - w.masked(dh.matrix()) * c(omega_sq);
    Ok(HermitianOperator::hermitize(&v)?.0)
}

/// Residuals of a candidate `(Ω², 𝒱)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    /// `‖[𝒱, H]‖ / (‖𝒱‖‖H‖)`, zero when `𝒱 = 0`.
    pub conservation: f64,
    /// `‖(H^×)³∂H − Ω² H^×∂H‖` relative to the larger of the two terms.
    pub eigenop: f64,
}

impl Residuals {
    pub fn pass(&self) -> bool {
        self.conservation <= PASS_TOL && self.eigenop <= PASS_TOL
    }
}

#[derive(Clone, Debug)]
pub struct ConservedStructure {
    pub omega_sq: f64,
    pub v: HermitianOperator,
    pub conservation_residual: f64,
    pub eigenop_residual: f64,
    pub commuting: bool,
    /// Basis indices on which `𝒱` and the residuals are exact.
    pub window: ExactWindow,
}

impl ConservedStructure {
    pub fn passes(&self) -> bool {
        self.conservation_residual <= PASS_TOL && self.eigenop_residual <= PASS_TOL
    }

    /// Positive root of `Ω²`.
    pub fn omega(&self) -> Result<f64> {
        if self.omega_sq > 0.0 && self.omega_sq.is_finite() {
            Ok(self.omega_sq.sqrt())
        } else {
            Err(Error::NonPositiveOmega(self.omega_sq))
        }
    }

    /// Fails unless the residuals pass and `Ω² > 0`; returns `Ω`.
    pub fn require_verified(&self) -> Result<f64> {
        if !self.passes() {
            return Err(Error::Unverified {
                residual: self.eigenop_residual.max(self.conservation_residual),
            });
        }
        self.omega()
    }
}

pub fn verify(
    omega_sq: f64,
    v: &HermitianOperator,
    h: &HermitianOperator,
    dh: &HermitianOperator,
) -> Result<Residuals> {
    verify_truncated(omega_sq, v, h, dh, &Truncation::none())
}

pub fn verify_truncated(
    omega_sq: f64,
    v: &HermitianOperator,
    h: &HermitianOperator,
    dh: &HermitianOperator,
    truncation: &Truncation,
) -> Result<Residuals> {
    let ladder = adjoint_ladder(h, dh, 3, truncation)?;
    let w3 = &ladder[3].1;
    let vh = commutator(v, h)?;
    let v_norm = w3.norm(v.matrix());
    let h_norm = w3.norm(h.matrix());
    let conservation = if v_norm == 0.0 || h_norm == 0.0 {
        0.0
    } else {
        w3.norm(&vh) / (v_norm * h_norm)
    };
    let lhs = &ladder[3].0;
    let rhs = &ladder[1].0 * c(omega_sq);
    let eigenop = w3.relative_distance(lhs, &rhs);
    Ok(Residuals {
        conservation,
        eigenop,
    })
}

pub fn analyze(h: &HermitianOperator, dh: &HermitianOperator) -> Result<ConservedStructure> {
    analyze_truncated(h, dh, &Truncation::none())
}

/// Estimates `Ω²`, builds `𝒱` and verifies both.
pub fn analyze_truncated(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    truncation: &Truncation,
) -> Result<ConservedStructure> {
    let window = ExactWindow::after(3, h, truncation);
    match estimate_omega_sq_truncated(h, dh, truncation)? {
        OmegaSq::ParameterCommuting => Ok(ConservedStructure {
            omega_sq: 0.0,
            v: HermitianOperator::zeros(h.dim()),
            conservation_residual: 0.0,
            eigenop_residual: 0.0,
            commuting: true,
            window,
        }),
        OmegaSq::Estimated(omega_sq) => {
            let v = build_v_truncated(h, dh, omega_sq, truncation)?;
            let r = verify_truncated(omega_sq, &v, h, dh, truncation)?;
            Ok(ConservedStructure {
                omega_sq,
                v,
                conservation_residual: r.conservation,
                eigenop_residual: r.eigenop,
                commuting: false,
                window,
            })
        }
    }
}

/// `‖(H^×)^{2n}A − Ω^{2n}A‖ / ‖Ω^{2n}A‖` with `A = H^×∂H`.
pub fn eigen_power_residual(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    omega_sq: f64,
    n: usize,
    truncation: &Truncation,
) -> Result<f64> {
    let ladder = adjoint_ladder(h, dh, 2 * n + 1, truncation)?;
    let w = &ladder[2 * n + 1].1;
    let expect = &ladder[1].0 * c(omega_sq.powi(n as i32));
    Ok(w.relative_distance(&ladder[2 * n + 1].0, &expect))
}

/// `𝒱₁ = (H^× − Ω)∂H` and the normalized norms of `[𝒱₁, H]` and `[𝒱, H]`.
pub fn v1_conservation(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    omega: f64,
) -> Result<(f64, f64)> {
    let a = commutator(h, dh)?;
    let v1 = &a - dh.matrix() * c(omega);
    let v = commutator(h, &a)? - dh.matrix() * c(omega * omega);
    let scale = |m: &CMatrix| (m.norm() * h.norm()).max(f64::MIN_POSITIVE);
    let r1 = commutator(&v1, h)?.norm() / scale(&v1);
    let r = commutator(&v, h)?.norm() / scale(&v);
    Ok((r1, r))
}
