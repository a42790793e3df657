//! Pure and mixed quantum states with expectation statistics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{c, spectral, AsMatrix, CMatrix, CVector, HermitianOperator};

/// Default support cutoff on eigenvalues of a mixed state.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Negative eigenvalues above this are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const GRAM_TOL: f64 = 1e-10;
const SQRT_REJECT: f64 = 1e-10;

/// Unit vector in a finite-dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    /// Accepts a vector whose norm is 1 within 1e-12.
    pub fn new(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Self::normalized(amps)
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalized(amps: CVector) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::DimensionTooSmall(amps.len()));
        }
        let norm = amps.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amps: amps / c(norm),
        })
    }

    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        Self::normalized(CVector::from_column_slice(amps))
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[k] = c(1.0);
        Self::normalized(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    pub fn transformed(&self, u: &CMatrix) -> Result<Self> {
        check_dim(u.nrows(), self.dim())?;
        Self::normalized(u * &self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// Rank-one spectral state whose eigenbasis completes `self`.
    pub fn to_spectral(&self) -> SpectralState {
        let d = self.dim();
        let mut vectors = CMatrix::zeros(d, d);
        vectors.set_column(0, &self.amps);
        let mut filled = 1;
        for k in 0..d {
            if filled == d {
                break;
            }
            let mut e = CVector::zeros(d);
            e[k] = c(1.0);
            for _ in 0..2 {
                for j in 0..filled {
                    let col = vectors.column(j).into_owned();
                    let proj = col.dotc(&e);
                    e -= col * proj;
                }
            }
            let n = e.norm();
            if n > 1e-6 {
                vectors.set_column(filled, &(e / c(n)));
                filled += 1;
            }
        }
        let mut probs = vec![0.0; d];
        probs[0] = 1.0;
        SpectralState {
            probs,
            vectors,
            cutoff: SUPPORT_CUTOFF,
        }
    }
}

/// Mixed state stored as eigenvalue/eigenvector pairs.
#[derive(Clone, Debug)]
pub struct SpectralState {
    probs: Vec<f64>,
    vectors: CMatrix,
    cutoff: f64,
}

impl SpectralState {
    /// `vectors` holds the eigenvectors as columns, in the order of `probs`.
    pub fn new(probs: Vec<f64>, vectors: CMatrix) -> Result<Self> {
        Self::with_cutoff(probs, vectors, SUPPORT_CUTOFF)
    }

    pub fn with_cutoff(mut probs: Vec<f64>, vectors: CMatrix, cutoff: f64) -> Result<Self> {
        let d = probs.len();
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if vectors.nrows() != d || vectors.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: vectors.ncols(),
            });
        }
        for p in probs.iter_mut() {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
            if *p < -CLAMP_TOL {
                return Err(Error::NegativeEigenvalue(*p));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidSpectrum(format!(
                "eigenvalues sum to {total}"
            )));
        }
        let gram = vectors.adjoint() * &vectors - CMatrix::identity(d, d);
        let defect = gram.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        if defect > GRAM_TOL {
            return Err(Error::InvalidSpectrum(format!(
                "eigenvectors not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            probs,
            vectors,
            cutoff,
        })
    }

    /// Diagonalizes a density matrix.
    pub fn from_density(rho: &CMatrix) -> Result<Self> {
        let (h, _) = HermitianOperator::hermitize(rho)?;
        let s = spectral(&h)?;
        let total: f64 = s.values.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidSpectrum(format!("trace {total}")));
        }
        Self::new(s.values, s.vectors)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(vec![1.0 / dim as f64; dim], CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Indices with `p_i > cutoff`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.probs[i] > self.cutoff)
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.support().len()
    }

    pub fn density(&self) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &p) in self.probs.iter().enumerate() {
            scaled.column_mut(j).scale_mut(p);
        }
        scaled * self.vectors.adjoint()
    }

    /// `U ρ U†`.
    pub fn transformed(&self, u: &CMatrix) -> Result<Self> {
        check_dim(u.nrows(), self.dim())?;
        Self::with_cutoff(self.probs.clone(), u * &self.vectors, self.cutoff)
    }

    /// The matrix of `a` in the eigenbasis of the state.
    pub fn in_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * a * &self.vectors
    }
}

/// States that can produce expectation values.
pub trait QuantumState {
    fn dim(&self) -> usize;
    /// `Tr(ρ A)`.
    fn expect_matrix(&self, a: &CMatrix) -> Complex64;
}

impl QuantumState for PureState {
    fn dim(&self) -> usize {
        self.amps.len()
    }

    fn expect_matrix(&self, a: &CMatrix) -> Complex64 {
        self.amps.dotc(&(a * &self.amps))
    }
}

impl QuantumState for SpectralState {
    fn dim(&self) -> usize {
        self.probs.len()
    }

    fn expect_matrix(&self, a: &CMatrix) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let v = self.vectors.column(i);
            acc += v.dotc(&(a * v)) * p;
        }
        acc
    }
}

fn check_dim(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn expectation(state: &impl QuantumState, a: &impl AsMatrix) -> Result<Complex64> {
    let a = a.as_matrix();
    check_dim(a.nrows(), state.dim())?;
    Ok(state.expect_matrix(a))
}

/// `½⟨{A,B}⟩ − ⟨A⟩⟨B⟩`.
pub fn covariance(
    state: &impl QuantumState,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<f64> {
    check_dim(a.dim(), state.dim())?;
    check_dim(b.dim(), state.dim())?;
    let (am, bm) = (a.matrix(), b.matrix());
    let anti = state.expect_matrix(&(am * bm + bm * am)).re * 0.5;
    Ok(anti - state.expect_matrix(am).re * state.expect_matrix(bm).re)
}

/// `⟨A²⟩ − ⟨A⟩²`, clamped at zero when above `−1e-12`.
pub fn variance(state: &impl QuantumState, a: &HermitianOperator) -> Result<f64> {
    let v = covariance(state, a, a)?;
    Ok(if v < 0.0 && v > -CLAMP_TOL { 0.0 } else { v })
}

/// `√ρ = Q diag(√p) Q†`.
pub fn psd_sqrt(rho: &SpectralState) -> HermitianOperator {
    let mut scaled = rho.vectors.clone();
    for (j, &p) in rho.probs.iter().enumerate() {
        let s = if p > rho.cutoff { p.sqrt() } else { 0.0 };
        scaled.column_mut(j).scale_mut(s);
    }
    let m = &scaled * rho.vectors.adjoint();
    HermitianOperator::hermitize(&m)
        .expect("square matrix of dimension at least 2")
        .0
}

/// Square root of a positive semidefinite matrix, rejecting eigenvalues
/// below `−1e-10`.
pub fn psd_sqrt_matrix(m: &CMatrix) -> Result<CMatrix> {
    let (h, _) = HermitianOperator::hermitize(m)?;
    let s = spectral(&h)?;
    if let Some(&lo) = s.values.first() {
        if lo < -SQRT_REJECT {
            return Err(Error::NegativeEigenvalue(lo));
        }
    }
    Ok(s.map(|p| c(p.max(0.0).sqrt())))
}
