//! Scans over two-amplitude state families `r|a⟩ + e^{iφ}|b⟩` for the
//! QFI-optimal members, plus the unrestricted random-state comparison.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{c, CMatrix, CVector, HermitianOperator};
use crate::random::{random_pure, rng};
use crate::state::{PureState, QuantumState};

/// `r|a⟩ + e^{iφ}|b⟩` (normalized), with `r = a₁/a₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmplitudeFamily {
    pub dim: usize,
    pub a: usize,
    pub b: usize,
}

impl AmplitudeFamily {
    /// `a₁|00⟩ + a₂e^{iφ}|11⟩`.
    pub const PSI: AmplitudeFamily = AmplitudeFamily { dim: 4, a: 0, b: 3 };
    /// `b₁|01⟩ + b₂e^{iφ}|10⟩`.
    pub const PHI: AmplitudeFamily = AmplitudeFamily { dim: 4, a: 1, b: 2 };

    fn raw(&self, ratio: f64, phi: f64) -> CVector {
        let mut u = CVector::zeros(self.dim);
        u[self.a] = c(ratio);
        u[self.b] = Complex64::from_polar(1.0, phi);
        u
    }

    pub fn state(&self, ratio: f64, phi: f64) -> PureState {
        PureState::normalized(self.raw(ratio, phi)).expect("nonzero amplitudes")
    }

    /// `(F, ∂F/∂r)` for `F = 4⟨Δ²ℋ⟩`.
    pub fn qfi_and_slope(&self, h: &CMatrix, h2: &CMatrix, ratio: f64, phi: f64) -> (f64, f64) {
        let u = self.raw(ratio, phi);
        let nn = u.norm_squared();
        let mean = |a: &CMatrix| -> (f64, f64) {
            let au = a * &u;
            let m = u.dotc(&au).re / nn;
            let d = 2.0 * (au[self.a].re - ratio * m) / nn;
            (m, d)
        };
        let (m1, d1) = mean(h);
        let (m2, d2) = mean(h2);
        (4.0 * (m2 - m1 * m1), 4.0 * (d2 - 2.0 * m1 * d1))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanGrid {
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratios: usize,
    pub phases: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            ratio_min: 0.2,
            ratio_max: 1.0,
            ratios: 161,
            phases: 181,
        }
    }
}

impl ScanGrid {
    fn ratio(&self, i: usize) -> f64 {
        self.ratio_min + (self.ratio_max - self.ratio_min) * i as f64 / (self.ratios - 1) as f64
    }

    fn phase(&self, j: usize) -> f64 {
        TAU * j as f64 / self.phases as f64
    }
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub ratio: f64,
    pub phi: f64,
    pub qfi: f64,
    /// The optimality equation evaluated at the refined maximizer.
    pub residual: f64,
    /// `(λ_max − λ_min)²`, the maximum of `4⟨Δ²ℋ⟩` over all pure states.
    pub global_max: f64,
    /// Per-phase maximizers `(φ, r)` found strictly inside the ratio range.
    pub loci: Vec<(f64, f64, f64)>,
}

/// Maximizes `F` over `r` at fixed `φ` by bisecting `∂F/∂r` around `r0`.
fn refine(
    family: &AmplitudeFamily,
    h: &CMatrix,
    h2: &CMatrix,
    grid: &ScanGrid,
    r0: f64,
    phi: f64,
) -> Option<f64> {
    let step = (grid.ratio_max - grid.ratio_min) / (grid.ratios - 1) as f64;
    let mut lo = (r0 - step).max(grid.ratio_min);
    let mut hi = (r0 + step).min(grid.ratio_max);
    let slope = |r| family.qfi_and_slope(h, h2, r, phi).1;
    if !(slope(lo) > 0.0 && slope(hi) < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Exhaustive grid scan of `family` for `4⟨Δ²ℋ⟩`, refined at each phase.
/// `equation(r, φ)` is the optimality condition to be checked.
pub fn optimal_state_scan(
    family: &AmplitudeFamily,
    h: &HermitianOperator,
    grid: &ScanGrid,
    equation: impl Fn(f64, f64) -> f64,
) -> Result<ScanResult> {
    if grid.ratios < 2 || grid.phases < 1 || family.dim != h.dim() {
        return Err(Error::InvalidArgument("invalid scan grid or family".into()));
    }
    let hm = h.matrix();
    let h2 = hm * hm;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut loci = Vec::new();
    for j in 0..grid.phases {
        let phi = grid.phase(j);
        let mut row_best = (f64::NEG_INFINITY, 0.0);
        for i in 0..grid.ratios {
            let r = grid.ratio(i);
            let (f, _) = family.qfi_and_slope(hm, &h2, r, phi);
            if f > row_best.0 {
                row_best = (f, r);
            }
        }
        let (f, r) = match refine(family, hm, &h2, grid, row_best.1, phi) {
            Some(r) => {
                let f = family.qfi_and_slope(hm, &h2, r, phi).0;
                loci.push((phi, r, f));
                (f, r)
            }
            None => row_best,
        };
        if f > best.0 {
            best = (f, r, phi);
        }
    }
    let spec = crate::operator::spectral(h)?;
    let spread = spec.spread();
    Ok(ScanResult {
        ratio: best.1,
        phi: best.2,
        qfi: best.0,
        residual: equation(best.1, best.2),
        global_max: spread * spread,
        loci,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct RandomScan {
    pub samples: usize,
    pub best: f64,
}

/// Largest `4⟨Δ²ℋ⟩` over seeded random pure states.
pub fn random_state_scan(h: &HermitianOperator, samples: usize, seed: u64) -> RandomScan {
    let mut r = rng(seed);
    let hm = h.matrix();
    let h2 = hm * hm;
    let mut best = 0.0f64;
    for _ in 0..samples {
        let s = random_pure(h.dim(), &mut r);
        let m = s.expect_matrix(hm).re;
        best = best.max(4.0 * (s.expect_matrix(&h2).re - m * m));
    }
    RandomScan { samples, best }
}

/// `φ_opt` over a `B × t` grid, rows ordered by `B`.
pub fn phi_opt_surface(b_max: f64, t_max: f64, nb: usize, nt: usize) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(nb * nt);
    for i in 0..nb {
        let b = b_max * i as f64 / (nb - 1) as f64;
        for k in 0..nt {
            let t = t_max * k as f64 / (nt - 1) as f64;
            out.push((b, t, super::h1::phi_opt(b, t)));
        }
    }
    out
}

/// `max − min` of `φ_opt` over `B ∈ (0, b_max]` at time `t`.
pub fn phi_opt_spread(b_max: f64, t: f64, nb: usize) -> f64 {
    let (mut lo, mut hi) = (PI, 0.0f64);
    for i in 1..=nb {
        let p = super::h1::phi_opt(b_max * i as f64 / nb as f64, t);
        lo = lo.min(p);
        hi = hi.max(p);
    }
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charop::char_longtime;
    use crate::models::h1;

    #[test]
    fn slope_matches_difference() {
        let h = h1::charop_analytic(0.9, 3.0);
        let hm = h.matrix();
        let h2 = hm * hm;
        let f = AmplitudeFamily::PSI;
        let (r, phi, e) = (0.55, 0.8, 1e-6);
        let fd = (f.qfi_and_slope(hm, &h2, r + e, phi).0 - f.qfi_and_slope(hm, &h2, r - e, phi).0) / (2.0 * e);
        assert!((fd - f.qfi_and_slope(hm, &h2, r, phi).1).abs() < 1e-6);
    }

    #[test]
    fn longtime_scan_on_locus() {
        let b = 0.8;
        let h = char_longtime(&h1::analytic_v(b), h1::omega(b), 1e3).unwrap();
        let grid = ScanGrid { ratios: 41, phases: 36, ..ScanGrid::default() };
        let s = optimal_state_scan(&AmplitudeFamily::PSI, &h, &grid, |r, p| h1::longtime_residual(b, r, p)).unwrap();
        assert!(s.residual.abs() < 1e-8, "{}", s.residual);
        assert!((s.qfi - s.global_max).abs() < 1e-9 * s.global_max);
    }

    #[test]
    fn surface_shape() {
        let s = phi_opt_surface(3.0, 10.0, 4, 3);
        assert_eq!(s.len(), 12);
        assert_eq!(s[0].2, 0.0);
    }
}
