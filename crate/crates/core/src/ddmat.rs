//! Complex double-double matrices for long alternating commutator series.

use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::operator::{CMatrix, HermitianOperator};
use crate::window::ExactWindow;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DdComplex {
    pub re: TwoFloat,
    pub im: TwoFloat,
}

impl DdComplex {
    pub const ZERO: Self = Self {
        re: TwoFloat::from_f64(0.0),
        im: TwoFloat::from_f64(0.0),
    };

    pub fn from_c64(z: Complex64) -> Self {
        Self {
            re: TwoFloat::from(z.re),
            im: TwoFloat::from(z.im),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(f64::from(self.re), f64::from(self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.hi() == 0.0 && self.im.hi() == 0.0
    }

    pub fn norm_sqr(&self) -> f64 {
        let (r, i) = (self.re.hi(), self.im.hi());
        r * r + i * i
    }

    /// Multiplication by `i^k`.
    pub fn times_i_pow(self, k: usize) -> Self {
        match k % 4 {
            0 => self,
            1 => Self {
                re: -self.im,
                im: self.re,
            },
            2 => Self {
                re: -self.re,
                im: -self.im,
            },
            _ => Self {
                re: self.im,
                im: -self.re,
            },
        }
    }

    pub fn scale(self, s: TwoFloat) -> Self {
        Self {
            re: self.re * s,
            im: self.im * s,
        }
    }
}

impl Add for DdComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl AddAssign for DdComplex {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for DdComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul<Complex64> for DdComplex {
    type Output = Self;
    fn mul(self, z: Complex64) -> Self {
        if z.im == 0.0 {
            return Self {
                re: self.re * z.re,
                im: self.im * z.re,
            };
        }
        Self {
            re: self.re * z.re - self.im * z.im,
            im: self.re * z.im + self.im * z.re,
        }
    }
}

/// Row-compressed copy of a Hermitian operator's nonzero pattern.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOperator {
    pub fn from_operator(h: &HermitianOperator) -> Self {
        let m = h.matrix();
        let dim = m.nrows();
        let rows = (0..dim)
            .map(|i| {
                (0..dim)
                    .filter(|&j| m[(i, j)] != Complex64::new(0.0, 0.0))
                    .map(|j| (j, m[(i, j)]))
                    .collect()
            })
            .collect();
        Self { dim, rows }
    }
}

/// Dense square matrix of [`DdComplex`] entries, row-major.
#[derive(Clone, Debug)]
pub struct DdMatrix {
    dim: usize,
    data: Vec<DdComplex>,
}

impl DdMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![DdComplex::ZERO; dim * dim],
        }
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                out.data[i * dim + j] = DdComplex::from_c64(m[(i, j)]);
            }
        }
        out
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, self.dim, |i, j| self.data[i * self.dim + j].to_c64())
    }

    /// Frobenius norm at double precision.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(DdComplex::norm_sqr).sum::<f64>().sqrt()
    }

    /// `[H, self]`, skipping exact zeros of `self`.
    pub fn commutator_with(&self, h: &SparseOperator) -> DdMatrix {
        let d = self.dim;
        debug_assert_eq!(d, h.dim);
        let mut out = Self::zeros(d);
        for k in 0..d {
            for j in 0..d {
                let x = self.data[k * d + j];
                if x.is_zero() {
                    continue;
                }
                // (H X)_ij += H_ik X_kj, with H_ik = conj(H_ki)
                for &(i, hki) in &h.rows[k] {
                    out.data[i * d + j] += x * hki.conj();
                }
                // (X H)_kl -= X_kj H_jl
                for &(l, hjl) in &h.rows[j] {
                    let slot = &mut out.data[k * d + l];
                    *slot = *slot - x * hjl;
                }
            }
        }
        out
    }

    /// Zeroes rows and columns outside `window`.
    pub fn mask(&mut self, window: &ExactWindow) {
        if window.is_full() {
            return;
        }
        let d = self.dim;
        for i in 0..d {
            if !window.contains(i) {
                for j in 0..d {
                    self.data[i * d + j] = DdComplex::ZERO;
                    self.data[j * d + i] = DdComplex::ZERO;
                }
            }
        }
    }

    /// `self += s · i^k · other`.
    pub fn add_scaled(&mut self, other: &DdMatrix, s: TwoFloat, k: usize) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += b.scale(s).times_i_pow(k);
            }
        }
    }
}
