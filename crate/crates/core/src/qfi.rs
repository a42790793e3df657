//! Quantum Fisher information and its matrix for unitary families, with the
//! SLD and fidelity finite-difference oracles.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::charop::unitary_derivative;
use crate::error::{Error, Result};
use crate::operator::{c, commutator, evolve, CMatrix, CVector, HermitianOperator};
use crate::state::{covariance, expectation, variance, PureState, SpectralState};

/// Values above `−CLAMP` are clamped to zero.
pub const CLAMP: f64 = 1e-10;
/// PSD tolerance on the smallest QFIM eigenvalue.
pub const PSD_TOL: f64 = 1e-9;

fn clamp(x: f64) -> f64 {
    if x < 0.0 && x > -CLAMP {
        0.0
    } else {
        x
    }
}

/// Real symmetric QFIM with parameter labels.
#[derive(Clone, Debug, PartialEq)]
pub struct QfimMatrix {
    pub labels: Vec<String>,
    pub entries: DMatrix<f64>,
}

impl QfimMatrix {
    pub fn new(labels: Vec<String>, entries: DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.nrows(),
            });
        }
        let sym = (&entries + entries.transpose()) * 0.5;
        Ok(Self { labels, entries: sym })
    }

    fn default_labels(n: usize) -> Vec<String> {
        (0..n).map(|k| format!("theta{k}")).collect()
    }

    pub fn with_labels(mut self, labels: &[&str]) -> Self {
        if labels.len() == self.labels.len() {
            self.labels = labels.iter().map(|s| s.to_string()).collect();
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Magnitude of the most negative eigenvalue, zero if none.
    pub fn psd_violation(&self) -> f64 {
        (-self.min_eigenvalue()).max(0.0)
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -PSD_TOL
    }
}

/// `4⟨Δ²ℋ⟩`.
pub fn qfi_pure(state: &PureState, h: &HermitianOperator) -> Result<f64> {
    Ok(4.0 * variance(state, h)?)
}

/// `ℱ_mn = 4 cov(ℋ_m, ℋ_n)`.
pub fn qfim_pure(state: &PureState, hs: &[HermitianOperator]) -> Result<QfimMatrix> {
    let n = hs.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = 4.0 * covariance(state, &hs[i], &hs[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    QfimMatrix::new(QfimMatrix::default_labels(n), m)
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Mixed-state entry from the eigenbasis matrices of `ℋ_m` and `ℋ_n`.
fn mixed_entry(rho: &SpectralState, support: &[usize], a: &CMatrix, b: &CMatrix) -> f64 {
    let p = rho.probs();
    let d = rho.dim();
    let mut first = 0.0;
    for &i in support {
        let mut cov = 0.0;
        for k in 0..d {
            if k != i {
                cov += (a[(i, k)] * b[(k, i)]).re;
            }
        }
        first += 4.0 * p[i] * cov;
    }
    let mut cross = 0.0;
    for &i in support {
        for &j in support {
            if i != j {
                cross += 8.0 * p[i] * p[j] / (p[i] + p[j]) * (a[(i, j)] * b[(j, i)]).re;
            }
        }
    }
    first - cross
}

/// `Σ 4p_i⟨Δ²ℋ⟩_i − Σ_{i≠j} 8p_ip_j/(p_i+p_j)|ℋ_ij|²` with both indices in
/// the support.
pub fn qfi_mixed(rho0: &SpectralState, h: &HermitianOperator) -> Result<f64> {
    check_dim(rho0.dim(), h.dim())?;
    let support = rho0.support();
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let m = rho0.in_eigenbasis(h.matrix());
    Ok(clamp(mixed_entry(rho0, &support, &m, &m)))
}

pub fn qfim_mixed(rho0: &SpectralState, hs: &[HermitianOperator]) -> Result<QfimMatrix> {
    let support = rho0.support();
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mats = hs
        .iter()
        .map(|h| {
            check_dim(rho0.dim(), h.dim())?;
            Ok(rho0.in_eigenbasis(h.matrix()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = hs.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut v = mixed_entry(rho0, &support, &mats[i], &mats[j]);
            if i == j {
                v = clamp(v);
            }
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    QfimMatrix::new(QfimMatrix::default_labels(n), m)
}

#[derive(Clone, Debug)]
pub struct SldResult {
    pub l: HermitianOperator,
    pub qfi: f64,
}

/// Eigenbasis matrix of the SLD: `L_ij = 2∂ρ_ij/(p_i+p_j)`.
fn sld_eigenbasis(rho: &SpectralState, drho: &CMatrix) -> Result<CMatrix> {
    check_dim(rho.dim(), drho.nrows())?;
    let p = rho.probs();
    let d = rho.dim();
    let dm = rho.in_eigenbasis(drho);
    let cutoff = rho.cutoff();
    Ok(CMatrix::from_fn(d, d, |i, j| {
        let s = p[i] + p[j];
        if s > cutoff {
            dm[(i, j)] * (2.0 / s)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Solves `∂ρ = (ρL + Lρ)/2` in the eigenbasis of `ρ`; `F = Tr(ρL²)`.
pub fn sld_oracle(rho: &SpectralState, drho: &CMatrix) -> Result<SldResult> {
    let le = sld_eigenbasis(rho, drho)?;
    let p = rho.probs();
    let mut qfi = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        if pi > 0.0 {
            qfi += pi * le.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    }
    let l = rho.vectors() * &le * rho.vectors().adjoint();
    Ok(SldResult {
        l: HermitianOperator::hermitize(&l)?.0,
        qfi,
    })
}

/// `ℱ_mn = ½Tr(ρ{L_m, L_n})` from SLDs of each derivative.
pub fn sld_qfim(rho: &SpectralState, drhos: &[CMatrix]) -> Result<QfimMatrix> {
    let ls = drhos
        .iter()
        .map(|d| sld_eigenbasis(rho, d))
        .collect::<Result<Vec<_>>>()?;
    let p = rho.probs();
    let n = ls.len();
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let prod = &ls[a] * &ls[b];
            let v: f64 = p.iter().enumerate().map(|(i, &pi)| pi * prod[(i, i)].re).sum();
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    QfimMatrix::new(QfimMatrix::default_labels(n), m)
}

/// Residual `‖∂ρ − (ρL + Lρ)/2‖_F`.
pub fn sld_residual(rho: &CMatrix, drho: &CMatrix, l: &HermitianOperator) -> f64 {
    let lm = l.matrix();
    (drho - (rho * lm + lm * rho) * c(0.5)).norm()
}

fn richardson(coarse: CMatrix, fine: CMatrix) -> CMatrix {
    (fine * c(4.0) - coarse) * c(1.0 / 3.0)
}

/// `∂_θρ` by central differences with one Richardson level.
pub fn density_derivative<F>(family: &F, theta: f64, fd_step: f64) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<SpectralState>,
{
    if !(fd_step > 0.0) {
        return Err(Error::InvalidArgument(format!("fd_step must be positive, got {fd_step}")));
    }
    let diff = |e: f64| -> Result<CMatrix> {
        Ok((family(theta + e)?.density() - family(theta - e)?.density()) * c(0.5 / e))
    };
    Ok(richardson(diff(fd_step)?, diff(0.5 * fd_step)?))
}

/// SLD oracle on a general family `θ ↦ ρ(θ)`.
pub fn sld_fd_oracle<F>(family: &F, theta: f64, fd_step: f64) -> Result<SldResult>
where
    F: Fn(f64) -> Result<SpectralState>,
{
    let rho = family(theta)?;
    let drho = density_derivative(family, theta, fd_step)?;
    sld_oracle(&rho, &drho)
}

/// Fidelity oracle `4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²)` for `ψ(θ) = exp(−itH(θ))ψ₀`.
pub fn qfi_fd_oracle_pure<F>(
    provider: &F,
    theta: f64,
    t: f64,
    psi0: &PureState,
    fd_step: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<HermitianOperator>,
{
    let u = evolve(&provider(theta)?, t)?;
    check_dim(u.nrows(), psi0.dim())?;
    let du = unitary_derivative(provider, theta, t, fd_step)?;
    let psi: CVector = &u * psi0.amplitudes();
    let dpsi: CVector = du * psi0.amplitudes();
    let overlap = psi.dotc(&dpsi);
    Ok(clamp(4.0 * (dpsi.norm_squared() - overlap.norm_sqr())))
}

/// SLD oracle on `ρ(θ) = U(θ)ρ₀U†(θ)` with finite-difference `∂ρ`.
pub fn qfi_fd_oracle_mixed<F>(
    provider: &F,
    theta: f64,
    t: f64,
    rho0: &SpectralState,
    fd_step: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<HermitianOperator>,
{
    let family = |th: f64| -> Result<SpectralState> {
        let u = evolve(&provider(th)?, t)?;
        rho0.transformed(&u)
    };
    Ok(sld_fd_oracle(&family, theta, fd_step)?.qfi)
}

/// `|⟨ψ|[ℋ₊, ℋ₋]|ψ⟩|`.
pub fn saturation_check(
    state: &PureState,
    h_plus: &HermitianOperator,
    h_minus: &HermitianOperator,
) -> Result<f64> {
    let comm = commutator(h_plus, h_minus)?;
    Ok(expectation(state, &comm)?.norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CrbBound {
    /// Lower bound on the estimator variance.
    Bound(f64),
    /// Zero information: the parameter cannot be estimated.
    Unestimable,
}

/// `1/(νF)`.
pub fn crb_bound(f: f64, nu: u32) -> Result<CrbBound> {
    if nu == 0 {
        return Err(Error::InvalidArgument("nu must be positive".into()));
    }
    if f.is_nan() {
        return Err(Error::NonFinite);
    }
    if f <= 0.0 {
        return Ok(CrbBound::Unestimable);
    }
    Ok(CrbBound::Bound(1.0 / (nu as f64 * f)))
}

/// Diagonal of `ℱ⁻¹/ν`; singular matrices are unestimable.
pub fn crb_multiparameter(qfim: &QfimMatrix, nu: u32) -> Result<Vec<CrbBound>> {
    if nu == 0 {
        return Err(Error::InvalidArgument("nu must be positive".into()));
    }
    let n = qfim.dim();
    let scale = qfim.entries.amax();
    if scale == 0.0 {
        return Ok(vec![CrbBound::Unestimable; n]);
    }
    let eig = SymmetricEigen::new(qfim.entries.clone());
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo <= 1e-12 * scale {
        return Ok(vec![CrbBound::Unestimable; n]);
    }
    let inv = qfim
        .entries
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("singular QFIM".into()))?;
    Ok((0..n)
        .map(|k| CrbBound::Bound(inv[(k, k)] / nu as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::pauli;

    #[test]
    fn eigenstate_has_zero_qfi() {
        let up = PureState::basis(2, 0).unwrap();
        assert_eq!(qfi_pure(&up, &pauli::z()).unwrap(), 0.0);
    }

    #[test]
    fn maximally_mixed_is_blind() {
        let mm = SpectralState::maximally_mixed(2).unwrap();
        assert!(qfi_mixed(&mm, &pauli::x()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn classical_coin() {
        let rho = SpectralState::new(vec![0.5, 0.5], CMatrix::identity(2, 2)).unwrap();
        let drho = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5), c(-0.5)]));
        let r = sld_oracle(&rho, &drho).unwrap();
        assert!((r.qfi - 1.0).abs() < 1e-15);
        let zero = sld_oracle(&rho, &CMatrix::zeros(2, 2)).unwrap();
        assert_eq!(zero.qfi, 0.0);
    }

    #[test]
    fn crb_values() {
        assert_eq!(crb_bound(4.0, 1).unwrap(), CrbBound::Bound(0.25));
        assert_eq!(crb_bound(0.0, 1).unwrap(), CrbBound::Unestimable);
        assert!(crb_bound(1.0, 0).is_err());
    }

    #[test]
    fn saturation_of_pauli_pair() {
        let up = PureState::basis(2, 0).unwrap();
        let v = saturation_check(&up, &pauli::x(), &pauli::y()).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert_eq!(saturation_check(&up, &pauli::x(), &pauli::x()).unwrap(), 0.0);
    }

    #[test]
    fn rank_one_qfim() {
        let s = PureState::from_slice(&[c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let q = qfim_pure(&s, &[pauli::x(), pauli::x()]).unwrap();
        assert!((q.get(0, 1).powi(2) - q.get(0, 0) * q.get(1, 1)).abs() < 1e-14);
        let single = qfim_pure(&s, &[pauli::x()]).unwrap();
        assert_eq!(single.get(0, 0), qfi_pure(&s, &pauli::x()).unwrap());
    }
}
