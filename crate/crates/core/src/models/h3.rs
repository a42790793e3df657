//! Spin-one one-axis twisting model `H₃ = χJ_x² + BJ_z` in the two-boson
//! basis `{|02⟩, |11⟩, |20⟩}`, field `B` estimated.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::charop::{df_dt_limit, f_limit};
use crate::error::{Error, Result};
use crate::operator::{c, commutator, CMatrix, HermitianOperator, I};
use crate::state::{PureState, QuantumState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H3 {
    pub chi: f64,
    pub b: f64,
}

impl H3 {
    pub fn new(chi: f64, b: f64) -> Result<Self> {
        if chi == 0.0 && b == 0.0 {
            return Err(Error::InvalidArgument("chi and B cannot both vanish".into()));
        }
        Ok(Self { chi, b })
    }

    pub fn formulas(&self, t: f64) -> Vec<(&'static str, f64)> {
        let w = omega(self.chi, self.b);
        vec![
            ("omega", w),
            ("f", f_limit(w, t)),
            ("df_dt", df_dt_limit(w, t)),
            ("F_max_stated", f_max_stated(self.chi, self.b, t)),
            ("chi_sq_landmark_stated", chi_landmark_sq(self.b, t)),
        ]
    }
}

fn herm(m: CMatrix) -> HermitianOperator {
    HermitianOperator::new(m).expect("spin-one operator is Hermitian")
}

pub fn jx() -> HermitianOperator {
    let s = c(FRAC_1_SQRT_2);
    let z = c(0.0);
    herm(CMatrix::from_row_slice(3, 3, &[z, s, z, s, z, s, z, s, z]))
}

pub fn jy() -> HermitianOperator {
    let s = I * FRAC_1_SQRT_2;
    let z = c(0.0);
    herm(CMatrix::from_row_slice(3, 3, &[z, s, z, -s, z, s, z, -s, z]))
}

pub fn jz() -> HermitianOperator {
    HermitianOperator::from_diagonal(&[-1.0, 0.0, 1.0]).expect("diagonal")
}

/// `𝓘 = |02⟩⟨20| + |20⟩⟨02|`.
pub fn iota() -> HermitianOperator {
    let mut m = CMatrix::zeros(3, 3);
    m[(0, 2)] = c(1.0);
    m[(2, 0)] = c(1.0);
    herm(m)
}

pub fn hamiltonian(chi: f64, b: f64) -> HermitianOperator {
    let x = jx();
    herm(x.matrix() * x.matrix() * c(chi) + jz().matrix() * c(b))
}

pub fn dh() -> HermitianOperator {
    jz()
}

/// `Ω = √(χ² + 4B²)`.
pub fn omega(chi: f64, b: f64) -> f64 {
    (chi * chi + 4.0 * b * b).sqrt()
}

/// `𝒱 = (χ² − Ω²)J_z − 2Bχ𝓘`.
pub fn analytic_v(chi: f64, b: f64) -> HermitianOperator {
    let w2 = chi * chi + 4.0 * b * b;
    &jz().scaled(chi * chi - w2) - &iota().scaled(2.0 * b * chi)
}

/// `i J_z𝓘`, Hermitian since `{J_z, 𝓘} = 0`.
pub fn i_jz_iota() -> HermitianOperator {
    herm(jz().matrix() * iota().matrix() * I)
}

/// `ℋ_B = (χ²f − t)J_z − 2Bχf𝓘 + (2χ/Ω²)sin²(Ωt/2)·iJ_z𝓘`.
pub fn charop_closed(chi: f64, b: f64, t: f64) -> HermitianOperator {
    let w = omega(chi, b);
    let f = f_limit(w, t);
    let k = chi * df_dt_limit(w, t);
    let m = jz().matrix() * c(chi * chi * f - t) - iota().matrix() * c(2.0 * b * chi * f)
        + i_jz_iota().matrix() * c(k);
    herm(m)
}

/// `ℋ_B = (χ²f − t)J_z − 2Bχ𝓘 + (2i/Ω²)sin²(Ωt/2)J_z𝓘` as stated.
pub fn charop_stated(chi: f64, b: f64, t: f64) -> HermitianOperator {
    let w = omega(chi, b);
    let f = f_limit(w, t);
    let m = jz().matrix() * c(chi * chi * f - t) - iota().matrix() * c(2.0 * b * chi)
        + i_jz_iota().matrix() * c(df_dt_limit(w, t));
    herm(m)
}

/// Stated long-time form `−4B²t/(χ² + 4B²)·J_z − 2Bχ𝓘`.
pub fn charop_longtime_stated(chi: f64, b: f64, t: f64) -> HermitianOperator {
    let w2 = chi * chi + 4.0 * b * b;
    &jz().scaled(-4.0 * b * b * t / w2) - &iota().scaled(2.0 * b * chi)
}

/// Stated pure-state QFI for the long-time form,
/// `[(4B²t/Ω²)² + 4B²χ²]⟨J_z²⟩ − (4B²t/Ω²)²⟨J_z⟩² − 4B²χ²⟨𝓘⟩²`.
pub fn qfi_stated(chi: f64, b: f64, t: f64, state: &impl QuantumState) -> f64 {
    let w2 = chi * chi + 4.0 * b * b;
    let a = (4.0 * b * b * t / w2).powi(2);
    let k = 4.0 * b * b * chi * chi;
    let z = jz();
    let jz2 = state.expect_matrix(&(z.matrix() * z.matrix())).re;
    let jz1 = state.expect_matrix(z.matrix()).re;
    let io = state.expect_matrix(iota().matrix()).re;
    (a + k) * jz2 - a * jz1 * jz1 - k * io * io
}

/// `4B²[4B²t²/(χ² + 4B²)² + χ²]` as stated.
pub fn f_max_stated(chi: f64, b: f64, t: f64) -> f64 {
    let w2 = chi * chi + 4.0 * b * b;
    4.0 * b * b * (4.0 * b * b * t * t / (w2 * w2) + chi * chi)
}

/// Stated location of the minimum over `χ`, `χ² = 4(Bt)^{2/3} − 4B²`.
pub fn chi_landmark_sq(b: f64, t: f64) -> f64 {
    4.0 * (b * t).abs().powf(2.0 / 3.0) - 4.0 * b * b
}

/// `(|02⟩ + i|20⟩)/√2`.
pub fn noon() -> PureState {
    PureState::from_slice(&[c(1.0), c(0.0), I]).expect("nonzero")
}

/// `[H₃, J_z] = −χJ_z𝓘`.
pub fn commutator_h_dh(chi: f64) -> CMatrix {
    jz().matrix() * iota().matrix() * c(-chi)
}

pub fn check_commutator(chi: f64, b: f64) -> f64 {
    let a = commutator(&hamiltonian(chi, b), &dh()).expect("same dimension");
    (a - commutator_h_dh(chi)).norm()
}
