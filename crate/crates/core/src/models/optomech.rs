//! Cavity optomechanics `H = ω_aN_a + ω_bN_b − gN_ax_b` in a fixed photon
//! sector `N_a = n_a`, mirror Fock space truncated at `ncut` levels. The mass
//! `m` or the cavity length `l` is estimated through `g = ω_a/(l√(mω_b))`.

use crate::charop::f_limit;
use crate::error::{Error, Result};
use crate::operator::{c, kron, CMatrix, HermitianOperator, I};
use crate::state::PureState;
use crate::window::Truncation;

pub const MIN_NCUT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    M,
    L,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::M => "m",
            Param::L => "l",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(Param::M),
            "l" => Ok(Param::L),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Optomech {
    pub wa: f64,
    pub wb: f64,
    pub m: f64,
    pub l: f64,
    pub na: f64,
    pub ncut: usize,
    pub param: Param,
}

impl Default for Optomech {
    fn default() -> Self {
        Self {
            wa: 1.0,
            wb: 1.0,
            m: 1.0,
            l: 10.0,
            na: 2.0,
            ncut: 24,
            param: Param::M,
        }
    }
}

/// Truncated annihilation operator `b` on `n` levels.
pub fn annihilation(n: usize) -> CMatrix {
    let mut b = CMatrix::zeros(n, n);
    for k in 1..n {
        b[(k - 1, k)] = c((k as f64).sqrt());
    }
    b
}

pub fn number(n: usize) -> HermitianOperator {
    let d: Vec<f64> = (0..n).map(|k| k as f64).collect();
    HermitianOperator::from_diagonal(&d).expect("dimension at least 2")
}

/// `x = (b + b†)/√2`.
pub fn position(n: usize) -> HermitianOperator {
    let b = annihilation(n);
    HermitianOperator::new((&b + b.adjoint()) * c(std::f64::consts::FRAC_1_SQRT_2)).expect("Hermitian")
}

/// `p = (b − b†)/(i√2)`.
pub fn momentum(n: usize) -> HermitianOperator {
    let b = annihilation(n);
    HermitianOperator::new((&b - b.adjoint()) * (-I * std::f64::consts::FRAC_1_SQRT_2)).expect("Hermitian")
}

impl Optomech {
    pub fn validate(&self) -> Result<()> {
        if self.ncut < MIN_NCUT {
            return Err(Error::InvalidArgument(format!(
                "ncut must be at least {MIN_NCUT}, got {}",
                self.ncut
            )));
        }
        for (name, v) in [("wb", self.wb), ("m", self.m), ("l", self.l)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.wa.is_finite() || !(self.na >= 0.0 && self.na.is_finite()) {
            return Err(Error::InvalidArgument("wa and na must be finite, na >= 0".into()));
        }
        Ok(())
    }

    pub fn with_param(&self, which: &str) -> Result<Self> {
        Ok(Self {
            param: Param::parse(which)?,
            ..*self
        })
    }

    pub fn with_ncut(&self, ncut: usize) -> Self {
        Self { ncut, ..*self }
    }

    /// `g = √2ḡ = ω_a/(l√(mω_b))`.
    pub fn g(&self) -> f64 {
        self.wa / (self.l * (self.m * self.wb).sqrt())
    }

    /// `g′ = ∂g` with respect to the estimated parameter.
    pub fn dg(&self) -> f64 {
        match self.param {
            Param::M => -self.g() / (2.0 * self.m),
            Param::L => -self.g() / self.l,
        }
    }

    pub fn hamiltonian(&self) -> HermitianOperator {
        let n = self.ncut;
        let m = CMatrix::identity(n, n) * c(self.wa * self.na) + number(n).matrix() * c(self.wb)
            - position(n).matrix() * c(self.g() * self.na);
        HermitianOperator::new(m).expect("Hermitian")
    }

    pub fn dh(&self) -> HermitianOperator {
        position(self.ncut).scaled(-self.dg() * self.na)
    }

    /// `𝒱 = ω_b g g′ n_a²·I`.
    pub fn analytic_v(&self) -> HermitianOperator {
        HermitianOperator::identity(self.ncut).scaled(self.wb * self.g() * self.dg() * self.na * self.na)
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::at(vec![self.ncut - 1])
    }

    /// `(n_ag′/ω_b){sin(ω_bt)x + [1 − cos(ω_bt)]p}`.
    pub fn charop_sector(&self, t: f64) -> HermitianOperator {
        let k = self.na * self.dg() / self.wb;
        let wt = self.wb * t;
        &position(self.ncut).scaled(k * wt.sin()) + &momentum(self.ncut).scaled(k * (1.0 - wt.cos()))
    }

    /// `charop_sector` plus the scalar `f𝒱`.
    pub fn charop_full(&self, t: f64) -> HermitianOperator {
        let s = f_limit(self.wb, t) * self.wb * self.g() * self.dg() * self.na * self.na;
        self.charop_sector(t).shifted(s)
    }

    pub fn vacuum(&self) -> PureState {
        PureState::basis(self.ncut, 0).expect("ncut >= 2")
    }

    /// Truncated, renormalized coherent state `|α⟩`.
    pub fn coherent(&self, alpha: num_complex::Complex64) -> PureState {
        let mut amps = Vec::with_capacity(self.ncut);
        let mut a = num_complex::Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for k in 0..self.ncut {
            if k > 0 {
                a *= alpha / (k as f64).sqrt();
            }
            amps.push(a);
        }
        PureState::from_slice(&amps).expect("nonzero")
    }

    fn prefactor_sq(&self) -> f64 {
        (self.na * self.dg() / self.wb).powi(2)
    }

    /// Vacuum QFI as stated, `(n_ag′/ω_b)²[1 − cos(ω_bt)]`.
    pub fn vacuum_qfi_stated(&self, t: f64) -> f64 {
        self.prefactor_sq() * (1.0 - (self.wb * t).cos())
    }

    /// `4⟨Δ²ℋ⟩` on the vacuum from `⟨Δ²x⟩ = ⟨Δ²p⟩ = ½`, `cov(x, p) = 0`.
    pub fn vacuum_qfi_moments(&self, t: f64) -> f64 {
        let wt = self.wb * t;
        let s = wt.sin();
        let one_c = 1.0 - wt.cos();
        4.0 * self.prefactor_sq() * 0.5 * (s * s + one_c * one_c)
    }

    /// Stated maximum over time, `(n_ag′/ω_b)²`.
    pub fn peak_stated(&self) -> f64 {
        self.prefactor_sq()
    }

    /// `n_a²ω_a²/(4m³l²ω_b⁵)` as stated.
    pub fn f_m_max_stated(&self) -> f64 {
        self.na.powi(2) * self.wa.powi(2) / (4.0 * self.m.powi(3) * self.l.powi(2) * self.wb.powi(5))
    }

    /// `n_a²ω_a²/(ml⁴ω_b³)` as stated.
    pub fn f_l_max_stated(&self) -> f64 {
        self.na.powi(2) * self.wa.powi(2) / (self.m * self.l.powi(4) * self.wb.powi(3))
    }

    /// The stated maximum for the estimated parameter.
    pub fn f_max_stated(&self) -> f64 {
        match self.param {
            Param::M => self.f_m_max_stated(),
            Param::L => self.f_l_max_stated(),
        }
    }

    /// Two-mode Hamiltonian on `na_cut × ncut` levels (cavity first).
    pub fn full_hamiltonian(&self, na_cut: usize) -> HermitianOperator {
        let na = number(na_cut);
        let ib = CMatrix::identity(self.ncut, self.ncut);
        let ia = CMatrix::identity(na_cut, na_cut);
        let m = kron(na.matrix(), &ib) * c(self.wa) + kron(&ia, number(self.ncut).matrix()) * c(self.wb)
            - kron(na.matrix(), position(self.ncut).matrix()) * c(self.g());
        HermitianOperator::new(m).expect("Hermitian")
    }

    pub fn full_dh(&self, na_cut: usize) -> HermitianOperator {
        let m = kron(number(na_cut).matrix(), position(self.ncut).matrix()) * c(-self.dg());
        HermitianOperator::new(m).expect("Hermitian")
    }

    /// `|n_a⟩ ⊗ |0⟩`.
    pub fn full_state(&self, na_cut: usize) -> Result<PureState> {
        let n = self.na;
        if n.fract() != 0.0 || n < 0.0 || n as usize >= na_cut {
            return Err(Error::InvalidArgument(format!(
                "photon number {n} must be a whole number below {na_cut}"
            )));
        }
        PureState::basis(na_cut * self.ncut, n as usize * self.ncut)
    }

    /// Copy with the estimated parameter set to `theta`.
    pub fn at(&self, theta: f64) -> Self {
        match self.param {
            Param::M => Self { m: theta, ..*self },
            Param::L => Self { l: theta, ..*self },
        }
    }

    pub fn theta(&self) -> f64 {
        match self.param {
            Param::M => self.m,
            Param::L => self.l,
        }
    }

    pub fn formulas(&self, t: f64) -> Vec<(&'static str, f64)> {
        vec![
            ("g", self.g()),
            ("dg", self.dg()),
            ("vacuum_qfi_stated", self.vacuum_qfi_stated(t)),
            ("vacuum_qfi_moments", self.vacuum_qfi_moments(t)),
            ("peak_stated", self.peak_stated()),
            ("F_m_max_stated", self.f_m_max_stated()),
            ("F_l_max_stated", self.f_l_max_stated()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charop::char_trivial_v;
    use crate::conserved::analyze_truncated;
    use crate::operator::commutator;
    use crate::qfi::qfi_pure;
    use crate::state::QuantumState;

    #[test]
    fn canonical_commutators_in_window() {
        let n = 12;
        let xp = commutator(&position(n), &momentum(n)).unwrap();
        for k in 0..n - 1 {
            assert!((xp[(k, k)] - I).norm() < 1e-14);
        }
        let nx = commutator(&number(n), &position(n)).unwrap();
        let ip = momentum(n).matrix() * (-I);
        assert!((nx - ip).norm() < 1e-14);
    }

    #[test]
    fn structure_is_scalar() {
        let o = Optomech::default();
        let s = analyze_truncated(&o.hamiltonian(), &o.dh(), &o.truncation()).unwrap();
        assert!((s.omega_sq - o.wb * o.wb).abs() < 1e-10);
        let w = &s.window;
        assert!(w.relative_distance(s.v.matrix(), o.analytic_v().matrix()) < 1e-10);
        let ch = char_trivial_v(&o.hamiltonian(), &o.dh(), &s, 1.3).unwrap();
        assert!(w.relative_distance(ch.matrix(), o.charop_sector(1.3).matrix()) < 1e-12);
    }

    #[test]
    fn vacuum_curve() {
        let o = Optomech::default();
        for &t in &[0.3, 1.0, 2.5, std::f64::consts::PI] {
            let f = qfi_pure(&o.vacuum(), &o.charop_sector(t)).unwrap();
            assert!((f - o.vacuum_qfi_moments(t)).abs() < 1e-14);
            assert!((f - 4.0 * o.vacuum_qfi_stated(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn coherent_matches_vacuum() {
        let o = Optomech { ncut: 40, ..Optomech::default() };
        let s = o.coherent(num_complex::Complex64::new(0.7, -0.4));
        assert!((s.expect_matrix(number(40).matrix()).re - 0.65).abs() < 1e-12);
        let f = qfi_pure(&s, &o.charop_sector(1.7)).unwrap();
        assert!((f - o.vacuum_qfi_moments(1.7)).abs() < 1e-10);
    }

    #[test]
    fn small_ncut_rejected() {
        assert!(Optomech { ncut: 4, ..Optomech::default() }.validate().is_err());
    }
}
