//! Ferromagnetic two-spin system `H₁ = −σ₁ˣσ₂ˣ − B(σ₁ᶻ + σ₂ᶻ)`, field `B`
//! estimated.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::two_spin::{dot, j, xx, z_sum};
use crate::charop::{df_dt_limit, f_limit};
use crate::operator::{c, HermitianOperator};
use crate::state::{expectation, PureState, QuantumState};
use crate::thermal::r_function;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H1 {
    pub b: f64,
}

/// `v = √(1 + 4B²)`.
pub fn v_len(b: f64) -> f64 {
    (1.0 + 4.0 * b * b).sqrt()
}

pub fn omega(b: f64) -> f64 {
    2.0 * v_len(b)
}

pub fn hamiltonian(b: f64) -> HermitianOperator {
    &xx().scaled(-1.0) - &z_sum().scaled(b)
}

pub fn dh() -> HermitianOperator {
    z_sum().scaled(-1.0)
}

/// `𝒱 = 32B(J_x + 2BJ_z)`.
pub fn analytic_v(b: f64) -> HermitianOperator {
    dot([32.0 * b, 0.0, 64.0 * b * b], &j())
}

/// `x⃗ = (8Bf, −2∂_tf, t − 4f)`.
pub fn x_vector(b: f64, t: f64) -> [f64; 3] {
    let w = omega(b);
    let f = f_limit(w, t);
    [8.0 * b * f, -2.0 * df_dt_limit(w, t), t - 4.0 * f]
}

fn norm_sq(x: [f64; 3]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `ℋ_B = 4x⃗·J⃗`.
pub fn charop_analytic(b: f64, t: f64) -> HermitianOperator {
    let x = x_vector(b, t);
    dot([4.0 * x[0], 4.0 * x[1], 4.0 * x[2]], &j())
}

/// Maximum QFI as stated in closed form, `4|x⃗|²`.
pub fn f_max_stated(b: f64, t: f64) -> f64 {
    4.0 * norm_sq(x_vector(b, t))
}

/// `(16/3)[|x⃗|²⟨|J⃗|²⟩ − 3(x⃗·⟨J⃗⟩)²]` as stated in closed form.
pub fn qfi_stated(b: f64, t: f64, state: &impl QuantumState) -> f64 {
    let x = x_vector(b, t);
    let ops = j();
    let jsq = super::two_spin::squared(&ops);
    let mean: Vec<f64> = ops.iter().map(|o| state.expect_matrix(o.matrix()).re).collect();
    let xj: f64 = x.iter().zip(&mean).map(|(a, b)| a * b).sum();
    16.0 / 3.0 * (norm_sq(x) * state.expect_matrix(jsq.matrix()).re - 3.0 * xj * xj)
}

/// `a₁|00⟩ + a₂e^{iφ}|11⟩`, normalized.
pub fn psi_opt(a1: f64, a2: f64, phi: f64) -> PureState {
    let z = c(0.0);
    PureState::from_slice(&[c(a1), z, z, Complex64::from_polar(a2, phi)])
        .expect("nonzero amplitudes")
}

/// `x_x cosφ + x_y sinφ + ½x_z(a₁/a₂ − a₂/a₁)`.
pub fn optimality_residual(b: f64, t: f64, ratio: f64, phi: f64) -> f64 {
    let x = x_vector(b, t);
    x[0] * phi.cos() + x[1] * phi.sin() + 0.5 * x[2] * (ratio - 1.0 / ratio)
}

/// `4B[cosφ + B(a₁/a₂ − a₂/a₁)]`.
pub fn longtime_residual(b: f64, ratio: f64, phi: f64) -> f64 {
    4.0 * b * (phi.cos() + b * (ratio - 1.0 / ratio))
}

/// Positive root `a₁/a₂` of the long-time optimality equation at phase `φ`.
pub fn longtime_locus(b: f64, phi: f64) -> Option<f64> {
    if b == 0.0 {
        return None;
    }
    let cp = phi.cos();
    let r = (-cp + (cp * cp + 4.0 * b * b).sqrt()) / (2.0 * b);
    (r > 0.0).then_some(r)
}

/// `φ_opt = arctan(4Bf/∂_tf)`, on the branch `[0, π]` continuous in `t`.
pub fn phi_opt(b: f64, t: f64) -> f64 {
    let w = omega(b);
    let phi = (4.0 * b * f_limit(w, t)).atan2(df_dt_limit(w, t));
    if phi < 0.0 {
        phi + PI
    } else {
        phi
    }
}

/// `cosh a / cosh b` without overflow.
pub(crate) fn cosh_ratio(a: f64, b: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    (a - b).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp())
}

/// `⟨σ₁ᶻσ₂ᶻ⟩_T = −1 + 2cosh(vβ)/(cosh(vβ) + coshβ)`.
pub fn correlation_zz(b: f64, beta: f64) -> f64 {
    -1.0 + 2.0 / (1.0 + cosh_ratio(beta, v_len(b) * beta))
}

/// `r = (4v²)⁻¹[1 − tanh(2βv)/(2βv)]`.
pub fn r_coeff(b: f64, beta: f64) -> f64 {
    r_function(beta, omega(b)).expect("omega is positive")
}

/// `F_T = (16v²r² − 8r + 1)·4β²cosh(vβ)/(cosh(vβ) + coshβ)` as stated.
pub fn f_t_stated(b: f64, beta: f64) -> f64 {
    let v = v_len(b);
    let r = r_coeff(b, beta);
    (16.0 * v * v * r * r - 8.0 * r + 1.0) * 2.0 * beta * beta * (1.0 + correlation_zz(b, beta))
}

/// Low-temperature form `(4/T²)(1 − 1/v²)` as stated.
pub fn f_t_lowt_stated(b: f64, temperature: f64) -> f64 {
    let v = v_len(b);
    4.0 / (temperature * temperature) * (1.0 - 1.0 / (v * v))
}

impl H1 {
    pub fn formulas(&self, t: f64, beta: Option<f64>) -> Vec<(&'static str, f64)> {
        let b = self.b;
        let w = omega(b);
        let x = x_vector(b, t);
        let mut out = vec![
            ("omega", w),
            ("f", f_limit(w, t)),
            ("df_dt", df_dt_limit(w, t)),
            ("x_x", x[0]),
            ("x_y", x[1]),
            ("x_z", x[2]),
            ("F_max_stated", f_max_stated(b, t)),
            ("phi_opt", phi_opt(b, t)),
        ];
        if let Some(beta) = beta {
            out.push(("zz_corr_stated", correlation_zz(b, beta)));
            out.push(("F_T_stated", f_t_stated(b, beta)));
            out.push(("F_T_lowT_stated", f_t_lowt_stated(b, 1.0 / beta)));
        }
        out
    }
}

/// `⟨σ₁ᶻσ₂ᶻ⟩` by direct trace.
pub fn zz_expectation(state: &impl QuantumState) -> f64 {
    expectation(state, &super::two_spin::zz()).expect("two-spin state").re
}
