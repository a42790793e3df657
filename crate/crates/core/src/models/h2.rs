//! Anisotropic XY two-spin system with an inhomogeneous field; `B₊` and `B₋`
//! estimated jointly.

use num_complex::Complex64;

use super::h1::cosh_ratio;
use super::two_spin::{dot, j, s, xx, yy, z_diff, z_sum};
use crate::charop::{df_dt_limit, f_limit};
use crate::operator::{c, HermitianOperator};
use crate::state::{PureState, QuantumState};
use crate::thermal::r_function;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H2 {
    pub gamma: f64,
    pub bp: f64,
    pub bm: f64,
}

pub fn hamiltonian(gamma: f64, bp: f64, bm: f64) -> HermitianOperator {
    let m = xx().matrix() * c(-0.5 * (1.0 + gamma)) + yy().matrix() * c(-0.5 * (1.0 - gamma))
        - z_sum().matrix() * c(bp)
        - z_diff().matrix() * c(bm);
    HermitianOperator::new(m).expect("real symmetric")
}

pub fn dh_plus() -> HermitianOperator {
    z_sum().scaled(-1.0)
}

pub fn dh_minus() -> HermitianOperator {
    z_diff().scaled(-1.0)
}

/// `v₊ = √(γ² + 4B₊²)`.
pub fn v_plus(gamma: f64, bp: f64) -> f64 {
    (gamma * gamma + 4.0 * bp * bp).sqrt()
}

/// `v₋ = √(1 + 4B₋²)`.
pub fn v_minus(bm: f64) -> f64 {
    (1.0 + 4.0 * bm * bm).sqrt()
}

pub fn omega_plus(gamma: f64, bp: f64) -> f64 {
    2.0 * v_plus(gamma, bp)
}

pub fn omega_minus(bm: f64) -> f64 {
    2.0 * v_minus(bm)
}

/// `𝒱₊ = 32B₊(γJ_x + 2B₊J_z)`.
pub fn v_plus_op(gamma: f64, bp: f64) -> HermitianOperator {
    dot([32.0 * bp * gamma, 0.0, 64.0 * bp * bp], &j())
}

/// `𝒱₋ = 32B₋(S_y + 2B₋S_z)`.
pub fn v_minus_op(bm: f64) -> HermitianOperator {
    dot([0.0, 32.0 * bm, 64.0 * bm * bm], &s())
}

/// `x⃗₊ = (8γB₊f₊, −2γ∂_tf₊, t − 4γ²f₊)`; finite as `Ω₊ → 0`.
pub fn x_plus(gamma: f64, bp: f64, t: f64) -> [f64; 3] {
    let w = omega_plus(gamma, bp);
    let f = f_limit(w, t);
    [8.0 * gamma * bp * f, -2.0 * gamma * df_dt_limit(w, t), t - 4.0 * gamma * gamma * f]
}

/// `x⃗₋ = (2∂_tf₋, 8B₋f₋, t − 4f₋)`.
pub fn x_minus(bm: f64, t: f64) -> [f64; 3] {
    let w = omega_minus(bm);
    let f = f_limit(w, t);
    [2.0 * df_dt_limit(w, t), 8.0 * bm * f, t - 4.0 * f]
}

fn times4(x: [f64; 3]) -> [f64; 3] {
    [4.0 * x[0], 4.0 * x[1], 4.0 * x[2]]
}

/// `ℋ₊ = 4x⃗₊·J⃗`.
pub fn charop_plus(gamma: f64, bp: f64, t: f64) -> HermitianOperator {
    dot(times4(x_plus(gamma, bp, t)), &j())
}

/// `ℋ₋ = 4x⃗₋·S⃗`.
pub fn charop_minus(bm: f64, t: f64) -> HermitianOperator {
    dot(times4(x_minus(bm, t)), &s())
}

/// `b₁|01⟩ + b₂e^{iφ}|10⟩`, normalized.
pub fn phi_opt_state(b1: f64, b2: f64, phi: f64) -> PureState {
    let z = c(0.0);
    PureState::from_slice(&[z, c(b1), Complex64::from_polar(b2, phi), z]).expect("nonzero amplitudes")
}

/// Off-diagonal QFIM entry `−⟨ℋ₊⟩⟨ℋ₋⟩` as stated, without a prefactor.
pub fn offdiag_stated(state: &impl QuantumState, hp: &HermitianOperator, hm: &HermitianOperator) -> f64 {
    -state.expect_matrix(hp.matrix()).re * state.expect_matrix(hm.matrix()).re
}

/// `4γB₊cosφ + (v₊² − γ²)(a₁/a₂ − a₂/a₁)`.
pub fn longtime_residual_plus(gamma: f64, bp: f64, ratio: f64, phi: f64) -> f64 {
    let v = v_plus(gamma, bp);
    4.0 * gamma * bp * phi.cos() + (v * v - gamma * gamma) * (ratio - 1.0 / ratio)
}

/// `4B₋[cosφ + B₋(b₁/b₂ − b₂/b₁)]`.
pub fn longtime_residual_minus(bm: f64, ratio: f64, phi: f64) -> f64 {
    4.0 * bm * (phi.cos() + bm * (ratio - 1.0 / ratio))
}

/// `⟨σ₁ᶻσ₂ᶻ⟩_T = −1 + 2cosh(βv₊)/(cosh(βv₊) + cosh(βv₋))`.
pub fn correlation_zz(gamma: f64, bp: f64, bm: f64, beta: f64) -> f64 {
    let (vp, vm) = (v_plus(gamma, bp), v_minus(bm));
    -1.0 + 2.0 / (1.0 + cosh_ratio(beta * vm, beta * vp))
}

/// `F_{T+} = 2β²(16γ²v₊²r₊² − 8γ²r₊ + 1)(1 + ⟨σ₁ᶻσ₂ᶻ⟩)` as stated.
pub fn f_t_plus_stated(gamma: f64, bp: f64, bm: f64, beta: f64) -> f64 {
    let vp = v_plus(gamma, bp);
    let r = r_function(beta, 2.0 * vp).expect("positive omega");
    let g2 = gamma * gamma;
    2.0 * beta * beta * (16.0 * g2 * vp * vp * r * r - 8.0 * g2 * r + 1.0)
        * (1.0 + correlation_zz(gamma, bp, bm, beta))
}

/// `F_{T−} = 2β²(16v₋²r₋² − 8r₋ + 1)(1 − ⟨σ₁ᶻσ₂ᶻ⟩)` as stated.
pub fn f_t_minus_stated(gamma: f64, bp: f64, bm: f64, beta: f64) -> f64 {
    let vm = v_minus(bm);
    let r = r_function(beta, 2.0 * vm).expect("positive omega");
    2.0 * beta * beta * (16.0 * vm * vm * r * r - 8.0 * r + 1.0)
        * (1.0 - correlation_zz(gamma, bp, bm, beta))
}

/// Stated low-temperature asymptotics `(F_{T,+}, F_{T,−})` in the regime
/// selected by the ordering of `v₊` and `v₋`.
pub fn f_t_lowt_stated(gamma: f64, bp: f64, bm: f64, temperature: f64) -> (f64, f64) {
    let (vp, vm) = (v_plus(gamma, bp), v_minus(bm));
    let t2 = temperature * temperature;
    let plus = 1.0 - gamma * gamma / (vp * vp);
    let minus = 1.0 - 1.0 / (vm * vm);
    if vp == vm {
        (2.0 / t2 * plus, 2.0 / t2 * minus)
    } else if vp < vm {
        (0.0, 4.0 / t2 * minus)
    } else {
        (4.0 / t2 * plus, 0.0)
    }
}

impl H2 {
    pub fn formulas(&self, t: f64, beta: Option<f64>) -> Vec<(&'static str, f64)> {
        let (g, bp, bm) = (self.gamma, self.bp, self.bm);
        let xp = x_plus(g, bp, t);
        let xm = x_minus(bm, t);
        let mut out = vec![
            ("omega_plus", omega_plus(g, bp)),
            ("omega_minus", omega_minus(bm)),
            ("x_plus_x", xp[0]),
            ("x_plus_y", xp[1]),
            ("x_plus_z", xp[2]),
            ("x_minus_x", xm[0]),
            ("x_minus_y", xm[1]),
            ("x_minus_z", xm[2]),
        ];
        if let Some(beta) = beta {
            out.push(("zz_corr_stated", correlation_zz(g, bp, bm, beta)));
            out.push(("F_T_plus_stated", f_t_plus_stated(g, bp, bm, beta)));
            out.push(("F_T_minus_stated", f_t_minus_stated(g, bp, bm, beta)));
            let (lp, lm) = f_t_lowt_stated(g, bp, bm, 1.0 / beta);
            out.push(("F_T_plus_lowT_stated", lp));
            out.push(("F_T_minus_lowT_stated", lm));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charop::char_closed;
    use crate::conserved::analyze;
    use crate::models::h1;
    use crate::operator::commutator;

    #[test]
    fn reduces_to_h1() {
        let d = (hamiltonian(1.0, 0.7, 0.0).matrix() - h1::hamiltonian(0.7).matrix()).norm();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn split_into_commuting_halves() {
        let (g, bp, bm) = (0.4, 0.9, -0.3);
        let [jx, _, jz] = j();
        let [_, sy, sz] = s();
        let hp = &jx.scaled(-g) - &jz.scaled(2.0 * bp);
        let hm = &sy.scaled(-1.0) - &sz.scaled(2.0 * bm);
        let sum = (&hp + &hm).scaled(2.0);
        assert!((sum.matrix() - hamiltonian(g, bp, bm).matrix()).norm() < 1e-14);
        assert!(commutator(&hp, &hm).unwrap().norm() < 1e-15);
    }

    #[test]
    fn structures_and_charops() {
        let (g, bp, bm, t) = (0.5, 0.3, 0.7, 2.3);
        let h = hamiltonian(g, bp, bm);
        let sp = analyze(&h, &dh_plus()).unwrap();
        let sm = analyze(&h, &dh_minus()).unwrap();
        assert!((sp.omega_sq - omega_plus(g, bp).powi(2)).abs() < 1e-12);
        assert!((sm.omega_sq - omega_minus(bm).powi(2)).abs() < 1e-12);
        assert!((sp.v.matrix() - v_plus_op(g, bp).matrix()).norm() < 1e-12);
        assert!((sm.v.matrix() - v_minus_op(bm).matrix()).norm() < 1e-12);
        let cp = char_closed(&h, &dh_plus(), &sp, t).unwrap();
        let cm = char_closed(&h, &dh_minus(), &sm, t).unwrap();
        assert!((cp.matrix() - charop_plus(g, bp, t).matrix()).norm() < 1e-12);
        assert!((cm.matrix() - charop_minus(bm, t).matrix()).norm() < 1e-12);
    }

    #[test]
    fn degenerate_plus_sector_is_finite() {
        let x = x_plus(0.0, 0.0, 3.0);
        assert!(x.iter().all(|v| v.is_finite()));
        assert_eq!(x[2], 3.0);
    }

    #[test]
    fn optimal_families_orthogonal() {
        let a = h1::psi_opt(0.3, 0.8, 1.2);
        let b = phi_opt_state(0.9, 0.1, 4.0);
        assert_eq!(a.inner(&b).norm(), 0.0);
    }
}
