//! Dense complex operator algebra: Hermitian operators, commutators,
//! spectral decomposition and matrix functions.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative Hermiticity defect above which construction is rejected.
pub const HERMITICITY_REJECT: f64 = 1e-10;
/// Default cap on `n` in [`adjoint_power`].
pub const MAX_ADJOINT_POWER: usize = 128;
/// Relative reconstruction residual accepted from the eigensolver.
pub const SPECTRAL_TOL: f64 = 1e-10;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Anything that can be viewed as a dense complex matrix.
pub trait AsMatrix {
    fn as_matrix(&self) -> &CMatrix;
}

impl AsMatrix for CMatrix {
    fn as_matrix(&self) -> &CMatrix {
        self
    }
}

/// Dense complex square matrix with certified Hermiticity.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl AsMatrix for HermitianOperator {
    fn as_matrix(&self) -> &CMatrix {
        &self.m
    }
}

impl HermitianOperator {
    /// Certifies `m` as Hermitian. Defects up to [`HERMITICITY_REJECT`]
    /// (relative to the largest entry) are removed by symmetrization.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        if m.nrows() < 2 {
            return Err(Error::DimensionTooSmall(m.nrows()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = hermiticity_defect(&m);
        if defect > HERMITICITY_REJECT {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self { m: symmetrize(&m) })
    }

    pub fn from_real(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(c))
    }

    /// Averages `m` with its adjoint regardless of the defect, returning the
    /// Hermitian part and the relative defect that was removed.
    pub fn hermitize(m: &CMatrix) -> Result<(Self, f64)> {
        check_square(m)?;
        if m.nrows() < 2 {
            return Err(Error::DimensionTooSmall(m.nrows()));
        }
        let defect = hermiticity_defect(m);
        Ok((Self { m: symmetrize(m) }, defect))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 2, "operator dimension must be at least 2");
        Self {
            m: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 2, "operator dimension must be at least 2");
        Self {
            m: CMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        Self::new(CMatrix::from_fn(d, d, |i, j| if i == j { c(diag[i]) } else { c(0.0) }))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { m: &self.m * c(s) }
    }

    /// `self + s * I`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut m = self.m.clone();
        for k in 0..m.nrows() {
            m[(k, k)] += s;
        }
        Self { m }
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator { m: &self.m + &rhs.m }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator { m: &self.m - &rhs.m }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scaled(-1.0)
    }
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn check_same_dim(a: &CMatrix, b: &CMatrix) -> Result<()> {
    check_square(a)?;
    check_square(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// `max|m - m†| / max|m|`, zero for the zero matrix.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    max_abs(&(m - m.adjoint())) / scale
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Hilbert–Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `‖a − b‖_F / max(‖a‖_F, ‖b‖_F)`, zero when both vanish.
pub fn relative_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `AB − BA`.
pub fn commutator(a: &impl AsMatrix, b: &impl AsMatrix) -> Result<CMatrix> {
    let (a, b) = (a.as_matrix(), b.as_matrix());
    check_same_dim(a, b)?;
    Ok(a * b - b * a)
}

/// `AB + BA`.
pub fn anticommutator(a: &impl AsMatrix, b: &impl AsMatrix) -> Result<CMatrix> {
    let (a, b) = (a.as_matrix(), b.as_matrix());
    check_same_dim(a, b)?;
    Ok(a * b + b * a)
}

/// `(H^×)ⁿ A` by iterated commutators, capped at [`MAX_ADJOINT_POWER`].
pub fn adjoint_power(h: &HermitianOperator, a: &impl AsMatrix, n: usize) -> Result<CMatrix> {
    adjoint_power_with_max(h, a, n, MAX_ADJOINT_POWER)
}

pub fn adjoint_power_with_max(
    h: &HermitianOperator,
    a: &impl AsMatrix,
    n: usize,
    max: usize,
) -> Result<CMatrix> {
    if n > max {
        return Err(Error::PowerTooLarge { requested: n, max });
    }
    let mut x = a.as_matrix().clone();
    check_same_dim(h.matrix(), &x)?;
    for _ in 0..n {
        x = commutator(h, &x)?;
    }
    Ok(x)
}

/// Eigendecomposition `H = Q Λ Q†` with eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl Spectrum {
    /// `Q diag(f(λ)) Q†`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let fj = f(lambda);
            for i in 0..d {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `λ_max − λ_min`.
    pub fn spread(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// `Q† A Q`: the matrix of `a` in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * a * &self.vectors
    }

    pub fn from_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        &self.vectors * a * self.vectors.adjoint()
    }
}

pub fn spectral(h: &HermitianOperator) -> Result<Spectrum> {
    let m = h.matrix();
    let d = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::Spectral {
        residual: f64::INFINITY,
    })?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    let spectrum = Spectrum { values, vectors };

    let residual = (spectrum.map(c) - m).norm();
    let scale = m.norm();
    if residual > SPECTRAL_TOL * scale + 1e-14 {
        return Err(Error::Spectral {
            residual: residual / scale.max(f64::MIN_POSITIVE),
        });
    }
    Ok(spectrum)
}

/// `U = exp(−itH)`.
pub fn evolve(h: &HermitianOperator, t: f64) -> Result<CMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite time {t}")));
    }
    let spectrum = spectral(h)?;
    Ok(spectrum.map(|lambda| Complex64::from_polar(1.0, -lambda * t)))
}

/// `‖U†U − I‖_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let d = u.nrows();
    (u.adjoint() * u - CMatrix::identity(d, d)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::pauli;

    #[test]
    fn pauli_commutators() {
        let (x, y, z) = (pauli::x(), pauli::y(), pauli::z());
        let xy = commutator(&x, &y).unwrap();
        assert!((xy - z.matrix() * (I * 2.0)).norm() < 1e-15);
        assert!(commutator(&x, &x).unwrap().norm() == 0.0);
        assert!(anticommutator(&x, &y).unwrap().norm() < 1e-15);
        let id = HermitianOperator::identity(2);
        let b = pauli::y().scaled(0.3);
        assert!((anticommutator(&id, &b).unwrap() - b.matrix() * c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = HermitianOperator::identity(2);
        let b = HermitianOperator::identity(3);
        assert!(matches!(
            commutator(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(anticommutator(&a, &b).is_err());
    }

    #[test]
    fn hermiticity_enforced() {
        let mut m = pauli::x().into_matrix();
        m[(0, 1)] += c(1e-13);
        let h = HermitianOperator::new(m.clone()).unwrap();
        assert_eq!(hermiticity_defect(h.matrix()), 0.0);
        m[(0, 1)] += c(1e-6);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            HermitianOperator::new(CMatrix::zeros(1, 1)),
            Err(Error::DimensionTooSmall(1))
        ));
        assert!(HermitianOperator::new(CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn adjoint_power_zero_and_cap() {
        let h = pauli::z();
        let a = pauli::x();
        assert_eq!(adjoint_power(&h, &a, 0).unwrap(), *a.matrix());
        assert!(matches!(
            adjoint_power(&h, &a, MAX_ADJOINT_POWER + 1),
            Err(Error::PowerTooLarge { .. })
        ));
        assert!(adjoint_power_with_max(&h, &a, 5, 4).is_err());
    }

    #[test]
    fn spectral_sorted_and_reconstructs() {
        let s = spectral(&pauli::z()).unwrap();
        assert_eq!(s.values, vec![-1.0, 1.0]);
        let d = HermitianOperator::from_diagonal(&[3.0, -2.0, 0.5, 7.0]).unwrap();
        let s = spectral(&d).unwrap();
        assert_eq!(s.values, vec![-2.0, 0.5, 3.0, 7.0]);
        assert!((s.map(c) - d.matrix()).norm() < 1e-14);
    }

    #[test]
    fn evolve_diagonal_and_identity() {
        let u = evolve(&pauli::z(), 0.0).unwrap();
        assert!((u - CMatrix::identity(2, 2)).norm() < 1e-15);
        let u = evolve(&pauli::z(), std::f64::consts::FRAC_PI_2).unwrap();
        assert!((u[(0, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(evolve(&pauli::z(), f64::NAN).is_err());
    }
}
