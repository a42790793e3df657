//! Exact windows for commutator ladders on truncated Hilbert spaces.
//!
//! A truncated bosonic space drops couplings beyond its top level, so a
//! product `H X` computed in the truncated space is wrong in rows whose basis
//! state couples outside. Starting from the boundary indices, each further
//! commutator spreads the corruption along the nonzero pattern of `H`. An
//! [`ExactWindow`] tracks the basis indices whose rows and columns are still
//! exact.

use num_complex::Complex64;

use crate::operator::{CMatrix, HermitianOperator};

/// Basis indices whose neighbours under `H` lie outside the represented space.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Truncation {
    boundary: Vec<usize>,
}

impl Truncation {
    /// A complete (untruncated) space.
    pub fn none() -> Self {
        Self::default()
    }

    pub fn at(boundary: Vec<usize>) -> Self {
        Self { boundary }
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_exact(&self) -> bool {
        self.boundary.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactWindow {
    trusted: Vec<bool>,
}

impl ExactWindow {
    pub fn full(dim: usize) -> Self {
        Self {
            trusted: vec![true; dim],
        }
    }

    /// Window of the result of one commutator `[H, X]` given the window of
    /// `X`: an index stays trusted if it is not on the boundary and all of its
    /// neighbours under `H` are trusted.
    pub fn after_commutator(&self, h: &HermitianOperator, truncation: &Truncation) -> Self {
        if truncation.is_exact() && self.is_full() {
            return self.clone();
        }
        let m = h.matrix();
        let d = self.trusted.len();
        let mut trusted = vec![false; d];
        for (i, slot) in trusted.iter_mut().enumerate() {
            if !self.trusted[i] || truncation.boundary.contains(&i) {
                continue;
            }
            *slot = (0..d).all(|j| self.trusted[j] || m[(i, j)] == Complex64::new(0.0, 0.0));
        }
        Self { trusted }
    }

    /// Window after `n` commutators starting from an exact operand.
    pub fn after(n: usize, h: &HermitianOperator, truncation: &Truncation) -> Self {
        let mut w = Self::full(h.dim());
        for _ in 0..n {
            w = w.after_commutator(h, truncation);
        }
        w
    }

    pub fn dim(&self) -> usize {
        self.trusted.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.trusted[i]
    }

    pub fn len(&self) -> usize {
        self.trusted.iter().filter(|&&t| t).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.trusted.iter().all(|&t| t)
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.trusted[i]).collect()
    }

    /// Zeroes every row and column outside the window.
    pub fn mask(&self, m: &mut CMatrix) {
        if self.is_full() {
            return;
        }
        let zero = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            if !self.trusted[i] {
                m.row_mut(i).fill(zero);
                m.column_mut(i).fill(zero);
            }
        }
    }

    pub fn masked(&self, m: &CMatrix) -> CMatrix {
        let mut out = m.clone();
        self.mask(&mut out);
        out
    }

    /// Hilbert–Schmidt inner product restricted to the window block.
    pub fn inner(&self, a: &CMatrix, b: &CMatrix) -> Complex64 {
        let idx = self.indices();
        let mut acc = Complex64::new(0.0, 0.0);
        for &j in &idx {
            for &i in &idx {
                acc += a[(i, j)].conj() * b[(i, j)];
            }
        }
        acc
    }

    pub fn norm(&self, m: &CMatrix) -> f64 {
        self.inner(m, m).re.max(0.0).sqrt()
    }

    /// `‖a − b‖ / max(‖a‖, ‖b‖)` on the window block.
    pub fn relative_distance(&self, a: &CMatrix, b: &CMatrix) -> f64 {
        let scale = self.norm(a).max(self.norm(b));
        if scale == 0.0 {
            0.0
        } else {
            self.norm(&(a - b)) / scale
        }
    }

    pub fn intersect(&self, other: &ExactWindow) -> ExactWindow {
        ExactWindow {
            trusted: self
                .trusted
                .iter()
                .zip(&other.trusted)
                .map(|(&a, &b)| a && b)
                .collect(),
        }
    }

    /// The window shrunk to its lowest `k` indices.
    pub fn leading(&self, k: usize) -> ExactWindow {
        let mut seen = 0;
        let trusted = self
            .trusted
            .iter()
            .map(|&t| {
                if t && seen < k {
                    seen += 1;
                    true
                } else {
                    false
                }
            })
            .collect();
        ExactWindow { trusted }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::c;

    fn tridiagonal(d: usize) -> HermitianOperator {
        let m = CMatrix::from_fn(d, d, |i, j| {
            if i.abs_diff(j) == 1 {
                c(1.0)
            } else if i == j {
                c(i as f64)
            } else {
                c(0.0)
            }
        });
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn untruncated_window_never_shrinks() {
        let h = tridiagonal(6);
        let w = ExactWindow::after(10, &h, &Truncation::none());
        assert!(w.is_full());
    }

    #[test]
    fn window_shrinks_one_level_per_step() {
        let h = tridiagonal(8);
        let t = Truncation::at(vec![7]);
        assert_eq!(ExactWindow::after(1, &h, &t).len(), 7);
        assert_eq!(ExactWindow::after(3, &h, &t).indices(), vec![0, 1, 2, 3, 4]);
        assert!(ExactWindow::after(9, &h, &t).is_empty());
    }

    #[test]
    fn mask_and_norm() {
        let h = tridiagonal(4);
        let w = ExactWindow::after(2, &h, &Truncation::at(vec![3]));
        let m = CMatrix::from_element(4, 4, c(1.0));
        assert_eq!(w.indices(), vec![0, 1]);
        assert_eq!(w.norm(&m), 2.0);
        let masked = w.masked(&m);
        assert_eq!(masked.norm(), 2.0);
        assert_eq!(w.leading(2).len(), 2);
    }
}
