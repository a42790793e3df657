//! The alternative QFI `I_θ = 4Tr(∂_θ√ρ)²`: the unitary-family formula, a
//! direct finite-difference oracle, and the `Γ±` operators of exponential
//! states `ρ = e^G`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::conserved::ConservedStructure;
use crate::error::{Error, Result};
use crate::operator::{c, commutator, spectral, CMatrix, HermitianOperator};
use crate::state::{psd_sqrt, QuantumState, SpectralState};
use crate::thermal::thermal_state;

pub const GAMMA_N_MAX: usize = 60;
pub const GAMMA_TAIL_TOL: f64 = 1e-12;
pub const QUADRATURE_NODES: usize = 32;
/// Eigenvalue gaps below this make the finite-difference oracle less accurate.
pub const GAP_WARNING: f64 = 1e-8;
const CLAMP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AltQfi {
    /// `8Tr[ℋ²ρ₀ − (ℋ√ρ₀)²]`.
    pub trace_form: f64,
    /// `8Σ_i(p_i⟨Δ²ℋ⟩_i − 2Σ_{j>i}√(p_ip_j)|ℋ_ij|²)`.
    pub spectral_form: f64,
}

impl AltQfi {
    pub fn value(&self) -> f64 {
        self.spectral_form
    }

    pub fn discrepancy(&self) -> f64 {
        (self.trace_form - self.spectral_form).abs()
    }
}

fn clamp(x: f64) -> f64 {
    if x < 0.0 && x > -CLAMP {
        0.0
    } else {
        x
    }
}

pub fn alt_qfi_unitary(rho0: &SpectralState, h: &HermitianOperator) -> Result<AltQfi> {
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            found: h.dim(),
        });
    }
    let hm = h.matrix();
    let rho = rho0.density();
    let sq = psd_sqrt(rho0);
    let hs = hm * sq.matrix();
    let trace_form = 8.0 * ((hm * hm * &rho).trace().re - (&hs * &hs).trace().re);

    let m = rho0.in_eigenbasis(hm);
    let p = rho0.probs();
    let support = rho0.support();
    let d = rho0.dim();
    let mut acc = 0.0;
    for (a, &i) in support.iter().enumerate() {
        let var: f64 = (0..d).filter(|&k| k != i).map(|k| m[(i, k)].norm_sqr()).sum();
        let mut cross = 0.0;
        for &j in &support[a + 1..] {
            cross += (p[i] * p[j]).sqrt() * m[(i, j)].norm_sqr();
        }
        acc += p[i] * var - 2.0 * cross;
    }
    Ok(AltQfi {
        trace_form: clamp(trace_form),
        spectral_form: clamp(8.0 * acc),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AltOracle {
    pub value: f64,
    /// Smallest gap between distinct eigenvalues of `ρ(θ)`.
    pub min_gap: f64,
    /// Set when `min_gap` is below [`GAP_WARNING`].
    pub gap_warning: bool,
}

/// `4Tr[(∂√ρ)²]` with `∂√ρ` by central differences and one Richardson level.
pub fn alt_qfi_direct_oracle<F>(family: &F, theta: f64, fd_step: f64) -> Result<AltOracle>
where
    F: Fn(f64) -> Result<SpectralState>,
{
    if !(fd_step > 0.0) {
        return Err(Error::InvalidArgument(format!("fd_step must be positive, got {fd_step}")));
    }
    let diff = |e: f64| -> Result<CMatrix> {
        let up = psd_sqrt(&family(theta + e)?);
        let down = psd_sqrt(&family(theta - e)?);
        Ok((up.matrix() - down.matrix()) * c(0.5 / e))
    };
    let coarse = diff(fd_step)?;
    let fine = diff(0.5 * fd_step)?;
    let ds = (fine * c(4.0) - coarse) * c(1.0 / 3.0);
    let value = clamp(4.0 * (&ds * &ds).trace().re);
    let mut probs = family(theta)?.probs().to_vec();
    probs.sort_by(f64::total_cmp);
    let min_gap = probs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(AltOracle {
        value,
        min_gap,
        gap_warning: min_gap < GAP_WARNING,
    })
}

/// `Γ± = ∫₀¹ e^{±sG^×/2}∂G ds`. The pair satisfies `Γ₊† = Γ₋`.
#[derive(Clone, Debug)]
pub struct GammaPair {
    pub plus: CMatrix,
    pub minus: CMatrix,
}

impl GammaPair {
    /// `max(‖Γ₊ − a₊‖, ‖Γ₋ − a₋‖)`.
    pub fn distance(&self, other: &GammaPair) -> f64 {
        (&self.plus - &other.plus)
            .norm()
            .max((&self.minus - &other.minus).norm())
    }

    pub fn norm(&self) -> f64 {
        self.plus.norm().max(self.minus.norm())
    }

    /// Both operators shifted by `s·I`.
    pub fn shifted(&self, s: f64) -> GammaPair {
        let d = self.plus.nrows();
        let id = CMatrix::identity(d, d) * c(s);
        GammaPair {
            plus: &self.plus + &id,
            minus: &self.minus + &id,
        }
    }

    /// `⟨Γ_a Γ_b⟩` for the two orderings: `(⟨Γ₊Γ₋⟩, ⟨Γ₋Γ₊⟩)`, real parts.
    pub fn correlations(&self, rho: &SpectralState) -> (f64, f64) {
        let pm = rho.expect_matrix(&(&self.plus * &self.minus)).re;
        let mp = rho.expect_matrix(&(&self.minus * &self.plus)).re;
        (pm, mp)
    }
}

/// `Γ± = Σ (±½)ⁿ/(n+1)! (G^×)ⁿ∂G`.
pub fn gamma_series(g: &HermitianOperator, dg: &HermitianOperator, n_max: usize) -> Result<GammaPair> {
    let mut x = dg.matrix().clone();
    let mut plus = x.clone();
    let mut minus = x.clone();
    let mut coef = 1.0;
    let mut quiet = 0;
    for n in 1..=n_max {
        x = commutator(g, &x)?;
        coef *= 0.5 / (n as f64 + 1.0);
        let term = &x * c(coef);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        plus += &term;
        minus += &term * c(sign);
        let tn = term.norm();
        if tn == 0.0 || tn <= GAMMA_TAIL_TOL * plus.norm().max(minus.norm()) {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 2 || tn == 0.0 {
            break;
        }
    }
    Ok(GammaPair { plus, minus })
}

/// `Γ±` by Gauss–Legendre quadrature of `e^{±sG/2} ∂G e^{∓sG/2}`.
pub fn gamma_integral(g: &HermitianOperator, dg: &HermitianOperator) -> Result<GammaPair> {
    let s = spectral(g)?;
    let dge = s.to_eigenbasis(dg.matrix());
    let d = g.dim();
    let rule = GaussLegendre::new(NonZeroUsize::new(QUADRATURE_NODES).expect("nonzero"));
    let mut plus = CMatrix::zeros(d, d);
    let mut minus = CMatrix::zeros(d, d);
    for &(x, w) in rule.as_node_weight_pairs() {
        let sv = 0.5 * (x + 1.0);
        let wt = 0.5 * w;
        for i in 0..d {
            for j in 0..d {
                let gap = 0.5 * sv * (s.values[i] - s.values[j]);
                plus[(i, j)] += dge[(i, j)] * (wt * gap.exp());
                minus[(i, j)] += dge[(i, j)] * (wt * (-gap).exp());
            }
        }
    }
    Ok(GammaPair {
        plus: s.from_eigenbasis(&plus),
        minus: s.from_eigenbasis(&minus),
    })
}

/// `f_I = 2Ω⁻³[βΩ/2 − sinh(βΩ/2)]`.
pub fn f_i(omega: f64, beta: f64) -> f64 {
    let x = 0.5 * beta * omega;
    let bracket = if x.abs() < 0.1 {
        let x2 = x * x;
        -x * x2 * (1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (1.0 / 5040.0 + x2 * (1.0 / 362880.0 + x2 / 39916800.0))))
    } else {
        x - x.sinh()
    };
    2.0 * bracket / omega.powi(3)
}

/// `∂_β f_I = Ω⁻²[1 − cosh(βΩ/2)]`.
pub fn df_i_dbeta(omega: f64, beta: f64) -> f64 {
    let h = (0.25 * beta * omega).sinh();
    -2.0 * h * h / (omega * omega)
}

/// `Γ± = f_I𝒱 + (f_IΩ² − β)∂H ∓ 2(∂_βf_I)[H, ∂H]` for `G = −βH`.
pub fn gamma_thermal_closed(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    structure: &ConservedStructure,
    beta: f64,
) -> Result<GammaPair> {
    let omega = structure.require_verified()?;
    gamma_thermal_closed_unchecked(h, dh, &structure.v, omega, beta)
}

pub fn gamma_thermal_closed_unchecked(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    v: &HermitianOperator,
    omega: f64,
    beta: f64,
) -> Result<GammaPair> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveOmega(omega));
    }
    let fi = f_i(omega, beta);
    let base = v.matrix() * c(fi) + dh.matrix() * c(fi * omega * omega - beta);
    let a = commutator(h, dh)? * c(2.0 * df_i_dbeta(omega, beta));
    Ok(GammaPair {
        plus: &base - &a,
        minus: base + a,
    })
}

/// The alternative QFI of the thermal family `θ ↦ e^{−βH(θ)}/Z` in every
/// ordering and centring of `Γ±`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalAltReport {
    /// `⟨Γ₋Γ₊⟩` with `Γ±` shifted by the `∂ ln Z` term; equals `4Tr(∂√ρ)²`.
    pub minus_plus_centred: f64,
    pub plus_minus_centred: f64,
    pub minus_plus_raw: f64,
    /// `⟨Γ₊Γ₋⟩` without the `∂ ln Z` shift, the literal correlation.
    pub plus_minus_raw: f64,
}

impl ThermalAltReport {
    pub fn value(&self) -> f64 {
        self.minus_plus_centred
    }
}

pub fn alt_qfi_thermal(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    structure: &ConservedStructure,
    beta: f64,
) -> Result<ThermalAltReport> {
    let raw = gamma_thermal_closed(h, dh, structure, beta)?;
    let rho = thermal_state(h, beta)?;
    Ok(alt_report(&raw, &rho, beta * rho.expect_matrix(dh.matrix()).re))
}

/// Report from a raw pair and the `∂ ln Z` shift `β⟨∂H⟩`.
pub fn alt_report(raw: &GammaPair, rho: &SpectralState, shift: f64) -> ThermalAltReport {
    let centred = raw.shifted(shift);
    let (pm_c, mp_c) = centred.correlations(rho);
    let (pm_r, mp_r) = raw.correlations(rho);
    ThermalAltReport {
        minus_plus_centred: clamp(mp_c),
        plus_minus_centred: pm_c,
        minus_plus_raw: mp_r,
        plus_minus_raw: pm_r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::pauli;
    use crate::state::PureState;

    #[test]
    fn maximally_mixed_gives_zero() {
        let mm = SpectralState::maximally_mixed(2).unwrap();
        let r = alt_qfi_unitary(&mm, &pauli::x()).unwrap();
        assert!(r.trace_form.abs() < 1e-15 && r.spectral_form.abs() < 1e-15);
    }

    #[test]
    fn pure_state_doubles_qfi() {
        let s = PureState::from_slice(&[c(0.6), c(0.8)]).unwrap();
        let r = alt_qfi_unitary(&s.to_spectral(), &pauli::z()).unwrap();
        let f = crate::qfi::qfi_pure(&s, &pauli::z()).unwrap();
        assert!((r.spectral_form - 2.0 * f).abs() < 1e-14);
        assert!(r.discrepancy() < 1e-14);
    }

    #[test]
    fn commuting_gamma_is_dg() {
        let g = pauli::z();
        let dg = pauli::z().scaled(0.3);
        let pair = gamma_series(&g, &dg, GAMMA_N_MAX).unwrap();
        assert!((&pair.plus - dg.matrix()).norm() < 1e-16);
        assert!((&pair.minus - dg.matrix()).norm() < 1e-16);
        let zero = gamma_series(&g, &pauli::x(), 0).unwrap();
        assert_eq!(zero.plus, *pauli::x().matrix());
    }

    #[test]
    fn series_matches_quadrature() {
        let g = HermitianOperator::new(pauli::z().matrix() * c(-0.8) + pauli::x().matrix() * c(0.3)).unwrap();
        let dg = pauli::y();
        let a = gamma_series(&g, &dg, GAMMA_N_MAX).unwrap();
        let b = gamma_integral(&g, &dg).unwrap();
        assert!(a.distance(&b) < 1e-13);
        assert!((a.plus.adjoint() - &a.minus).norm() < 1e-14);
    }

    #[test]
    fn f_i_branches_and_derivative() {
        let w = 1.7;
        for &b in &[1e-3, 0.05, 0.1 / 0.85, 0.3, 2.0] {
            let e = 1e-5;
            let fd = (f_i(w, b + e) - f_i(w, b - e)) / (2.0 * e);
            assert!((fd - df_i_dbeta(w, b)).abs() < 1e-8 * (1.0 + fd.abs()));
        }
        let x = 0.1;
        let b = 2.0 * x / w;
        assert!((f_i(w, b * (1.0 - 1e-12)) - f_i(w, b * (1.0 + 1e-12))).abs() < 1e-12);
    }
}
