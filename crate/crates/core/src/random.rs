//! Seeded random operators and states for oracles and property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{CMatrix, CVector, HermitianOperator};
use crate::state::{PureState, SpectralState};
use num_complex::Complex64;

pub type DefaultRng = ChaCha8Rng;

pub fn rng(seed: u64) -> DefaultRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut impl Rng) -> Complex64 {
    Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

pub fn ginibre(d: usize, r: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| gaussian(r))
}

/// GUE-like Hermitian matrix with unit-variance entries.
pub fn random_hermitian(d: usize, r: &mut impl Rng) -> HermitianOperator {
    let g = ginibre(d, r);
    let m = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    HermitianOperator::new(m).expect("symmetrized matrix is Hermitian")
}

/// Haar unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(d: usize, r: &mut impl Rng) -> CMatrix {
    let qr = ginibre(d, r).qr();
    let (mut q, rr) = qr.unpack();
    for j in 0..d {
        let x = rr[(j, j)];
        let phase = if x.norm() > 0.0 { x / x.norm() } else { Complex64::new(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

pub fn random_pure(d: usize, r: &mut impl Rng) -> PureState {
    let v = CVector::from_fn(d, |_, _| gaussian(r));
    PureState::normalized(v).expect("gaussian vector is nonzero")
}

/// Full-rank state with flat-Dirichlet spectrum in a Haar basis.
pub fn random_spectral(d: usize, r: &mut impl Rng) -> SpectralState {
    let mut p: Vec<f64> = (0..d).map(|_| -r.gen_range(1e-9..1.0f64).ln()).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    SpectralState::new(p, random_unitary(d, r)).expect("valid random spectrum")
}

/// Rank-`k` state with the remaining weight zero.
pub fn random_rank_k(d: usize, k: usize, r: &mut impl Rng) -> SpectralState {
    let mut p: Vec<f64> = (0..d)
        .map(|i| if i < k { -r.gen_range(1e-9..1.0f64).ln() } else { 0.0 })
        .collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    SpectralState::new(p, random_unitary(d, r)).expect("valid random spectrum")
}
