//! The characteristic operator `ℋ_θ = i(∂_θU†)U` of `U = exp(−itH(θ))`,
//! computed by the commutator series, the conserved-quantity closed form and
//! a finite-difference oracle.

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::conserved::ConservedStructure;
use crate::ddmat::{DdMatrix, SparseOperator};
use crate::error::{Error, Result};
use crate::operator::{c, commutator, evolve, relative_distance, spectral, CMatrix, HermitianOperator, I};
use crate::window::{ExactWindow, Truncation};

/// Below this value of `Ωt` the Taylor branch of `f` is used.
pub const TAYLOR_SWITCH: f64 = 0.1;
pub const SERIES_N_MAX: usize = 160;
pub const SERIES_TAIL_TOL: f64 = 1e-12;
pub const FD_STEP: f64 = 1e-5;
/// Largest `τ·spread(H)` of one step in [`char_series_stepped`].
pub const STEP_PHASE: f64 = 2.0;
/// Relative tolerance for `𝒱` to count as a multiple of the identity.
pub const SCALAR_V_TOL: f64 = 1e-8;

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::NonPositiveOmega(omega));
    }
    Ok(())
}

/// `f = (Ωt − sin Ωt)/Ω³`, defined for `Ω ≥ 0` through its Taylor branch.
pub fn f_limit(omega: f64, t: f64) -> f64 {
    let x = omega * t;
    if x < TAYLOR_SWITCH {
        // t³ Σ (−x²)^k / (2k+3)!
        let x2 = x * x;
        let mut term = 1.0 / 6.0;
        let mut acc = term;
        for k in 1..7 {
            term *= -x2 / ((2 * k + 2) * (2 * k + 3)) as f64;
            acc += term;
        }
        t.powi(3) * acc
    } else {
        (x - x.sin()) / omega.powi(3)
    }
}

/// `∂_t f = 2Ω⁻² sin²(Ωt/2)`, defined for `Ω ≥ 0`.
pub fn df_dt_limit(omega: f64, t: f64) -> f64 {
    let x = 0.5 * omega * t;
    if x == 0.0 {
        return 0.5 * t * t;
    }
    let sinc = x.sin() / x;
    0.5 * t * t * sinc * sinc
}

/// `sin(Ωt)/Ω`, defined for `Ω ≥ 0`.
pub fn sin_over(omega: f64, t: f64) -> f64 {
    let x = omega * t;
    if x == 0.0 {
        t
    } else {
        t * x.sin() / x
    }
}

pub fn f_function(omega: f64, t: f64) -> Result<f64> {
    check_omega(omega)?;
    check_time(t)?;
    Ok(f_limit(omega, t))
}

pub fn df_dt(omega: f64, t: f64) -> Result<f64> {
    check_omega(omega)?;
    check_time(t)?;
    Ok(df_dt_limit(omega, t))
}

#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub op: HermitianOperator,
    pub terms: usize,
    pub last_term_norm: f64,
    /// Basis indices on which every accumulated term is exact.
    pub window: ExactWindow,
}

pub fn char_series(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    t: f64,
    n_max: usize,
    tail_tol: f64,
) -> Result<SeriesResult> {
    char_series_truncated(h, dh, t, n_max, tail_tol, &Truncation::none())
}

/// `i Σ_{n=0}^{N} (it)^{n+1}/(n+1)! (H^×)ⁿ∂H`, accumulated in double-double.
/// Stops after two consecutive terms fall below `tail_tol` times the
/// accumulated norm.
pub fn char_series_truncated(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    t: f64,
    n_max: usize,
    tail_tol: f64,
    truncation: &Truncation,
) -> Result<SeriesResult> {
    check_time(t)?;
    if h.dim() != dh.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: dh.dim(),
        });
    }
    let sparse = SparseOperator::from_operator(h);
    let mut x = DdMatrix::from_matrix(dh.matrix());
    let mut window = ExactWindow::full(h.dim());
    let mut sum = DdMatrix::zeros(h.dim());
    let mut coef = TwoFloat::from(t);
    let mut quiet = 0;
    let mut last = 0.0;
    for n in 0..=n_max {
        let x_norm = x.norm();
        sum.add_scaled(&x, coef, n + 2);
        last = f64::from(coef).abs() * x_norm;
        let total = sum.norm();
        if !total.is_finite() {
            break;
        }
        if last <= tail_tol * total {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if x_norm == 0.0 || quiet >= 2 {
            let (op, _) = HermitianOperator::hermitize(&sum.to_matrix())?;
            return Ok(SeriesResult {
                op,
                terms: n + 1,
                last_term_norm: last,
                window,
            });
        }
        x = x.commutator_with(&sparse);
        window = window.after_commutator(h, truncation);
        if window.is_empty() {
            return Err(Error::WindowExhausted { terms: n + 1 });
        }
        x.mask(&window);
        coef = coef * t / (n as f64 + 2.0);
    }
    Err(Error::SeriesNotConverged {
        terms: n_max + 1,
        last_term_norm: last,
        partial: Box::new(sum.to_matrix()),
    })
}

/// The series on a step `τ = t/2ᵏ` with `τ·spread(H) ≤ STEP_PHASE`, then
/// `k` doublings `ℋ(2a) = ℋ(a) + U(a)†ℋ(a)U(a)`. In a truncated space the
/// commutator series loses every digit once `t‖H^×‖` is large; a short step
/// avoids that. The result is the characteristic operator of the truncated
/// `H` itself.
pub fn char_series_stepped(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    t: f64,
    n_max: usize,
    tail_tol: f64,
) -> Result<SeriesResult> {
    check_time(t)?;
    let spread = spectral(h)?.spread();
    let mut doublings = 0;
    while t * spread / 2f64.powi(doublings) > STEP_PHASE {
        doublings += 1;
    }
    let tau = t / 2f64.powi(doublings);
    let one = char_series(h, dh, tau, n_max, tail_tol)?;
    let mut u = evolve(h, tau)?;
    let mut acc = one.op.matrix().clone();
    for _ in 0..doublings {
        acc = &acc + u.adjoint() * &acc * &u;
        u = &u * &u;
    }
    Ok(SeriesResult {
        op: HermitianOperator::hermitize(&acc)?.0,
        terms: one.terms,
        last_term_norm: one.last_term_norm,
        window: ExactWindow::full(h.dim()),
    })
}

/// Closed form `f𝒱 − (sin Ωt/Ω)∂H − (2i/Ω²)sin²(Ωt/2)[H, ∂H]`, requiring a
/// verified structure.
pub fn char_closed(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    structure: &ConservedStructure,
    t: f64,
) -> Result<HermitianOperator> {
    let omega = structure.require_verified()?;
    char_closed_unchecked(h, dh, &structure.v, omega, t)
}

pub fn char_closed_unchecked(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    v: &HermitianOperator,
    omega: f64,
    t: f64,
) -> Result<HermitianOperator> {
    check_omega(omega)?;
    check_time(t)?;
    let f = f_limit(omega, t);
    let a = commutator(h, dh)?;
    let m = v.matrix() * c(f) - dh.matrix() * c(sin_over(omega, t))
        - a * (I * df_dt_limit(omega, t));
    Ok(HermitianOperator::hermitize(&m)?.0)
}

/// `[−t − i(∂_t f)H^× + f(H^×)²]∂H`, the unsimplified resummation.
pub fn char_resummed(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    omega: f64,
    t: f64,
) -> Result<HermitianOperator> {
    check_omega(omega)?;
    check_time(t)?;
    let a = commutator(h, dh)?;
    let b = commutator(h, &a)?;
    let m = dh.matrix() * c(-t) - &a * (I * df_dt_limit(omega, t)) + b * c(f_limit(omega, t));
    Ok(HermitianOperator::hermitize(&m)?.0)
}

/// `(t/Ω²)𝒱`.
pub fn char_longtime(v: &HermitianOperator, omega: f64, t: f64) -> Result<HermitianOperator> {
    check_omega(omega)?;
    Ok(v.scaled(t / (omega * omega)))
}

/// Relative deviation of `𝒱` from `(Tr𝒱/d)·I` on `window`.
pub fn scalar_deviation(v: &HermitianOperator, window: &ExactWindow) -> f64 {
    let idx = window.indices();
    if idx.is_empty() {
        return 0.0;
    }
    let mean = idx.iter().map(|&i| v.matrix()[(i, i)].re).sum::<f64>() / idx.len() as f64;
    let dev = v.shifted(-mean);
    let norm = window.norm(v.matrix());
    if norm == 0.0 {
        0.0
    } else {
        window.norm(dev.matrix()) / norm
    }
}

/// `−Ω⁻¹[sin(Ωt)∂H − (2i/Ω)sin²(Ωt/2)[H, ∂H]]`, the closed form with the
/// scalar `f𝒱` term dropped. Requires `𝒱 ∝ I` on the structure's window.
pub fn char_trivial_v(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    structure: &ConservedStructure,
    t: f64,
) -> Result<HermitianOperator> {
    let omega = structure.require_verified()?;
    let dev = scalar_deviation(&structure.v, &structure.window);
    if dev > SCALAR_V_TOL {
        return Err(Error::NonScalarV(dev));
    }
    char_trivial_v_unchecked(h, dh, omega, t)
}

pub fn char_trivial_v_unchecked(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    omega: f64,
    t: f64,
) -> Result<HermitianOperator> {
    check_omega(omega)?;
    check_time(t)?;
    let a = commutator(h, dh)?;
    let m = dh.matrix() * c(-sin_over(omega, t)) - a * (I * df_dt_limit(omega, t));
    Ok(HermitianOperator::hermitize(&m)?.0)
}

#[derive(Clone, Debug)]
pub struct ExactResult {
    pub op: HermitianOperator,
    /// Relative Hermiticity defect removed by symmetrization.
    pub defect: f64,
}

fn central_difference<F>(provider: &F, theta: f64, t: f64, eps: f64) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<HermitianOperator>,
{
    let up = evolve(&provider(theta + eps)?, t)?;
    let down = evolve(&provider(theta - eps)?, t)?;
    Ok((up - down) * c(0.5 / eps))
}

/// `∂_θ exp(−itH(θ))` by central differences with one Richardson level.
pub fn unitary_derivative<F>(provider: &F, theta: f64, t: f64, fd_step: f64) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<HermitianOperator>,
{
    if !(fd_step > 0.0) {
        return Err(Error::InvalidArgument(format!("fd_step must be positive, got {fd_step}")));
    }
    let coarse = central_difference(provider, theta, t, fd_step)?;
    let fine = central_difference(provider, theta, t, 0.5 * fd_step)?;
    Ok((fine * c(4.0) - coarse) * c(1.0 / 3.0))
}

/// `i(∂_θU†)U` with `∂_θU` from finite differences.
/// `FD_STEP` balances truncation against round-off for `‖H‖ ~ 10‖∂H‖`;
/// when `∂H` is much smaller than `H` the step grows by the same factor.
pub fn scaled_fd_step(h: &HermitianOperator, dh: &HermitianOperator) -> f64 {
    let ratio = h.norm() / (10.0 * dh.norm());
    if ratio.is_finite() && ratio > 1.0 {
        FD_STEP * ratio
    } else {
        FD_STEP
    }
}

pub fn char_exact<F>(provider: &F, theta: f64, t: f64, fd_step: f64) -> Result<ExactResult>
where
    F: Fn(f64) -> Result<HermitianOperator>,
{
    check_time(t)?;
    let u = evolve(&provider(theta)?, t)?;
    let du = unitary_derivative(provider, theta, t, fd_step)?;
    let m = du.adjoint() * u * I;
    let (op, defect) = HermitianOperator::hermitize(&m)?;
    Ok(ExactResult { op, defect })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Deviation {
    pub abs: f64,
    /// `abs / max(‖a‖, ‖b‖)` on the common window.
    pub rel: f64,
}

impl Deviation {
    pub fn between(a: &HermitianOperator, b: &HermitianOperator, window: &ExactWindow) -> Self {
        if window.is_full() {
            let abs = (a.matrix() - b.matrix()).norm();
            return Self {
                abs,
                rel: relative_distance(a.matrix(), b.matrix()),
            };
        }
        Self {
            abs: window.norm(&(a.matrix() - b.matrix())),
            rel: window.relative_distance(a.matrix(), b.matrix()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Deviations {
    pub series_closed: Option<Deviation>,
    pub series_exact: Option<Deviation>,
    pub closed_exact: Option<Deviation>,
}

/// ℋ_θ by up to three routes with their pairwise deviations.
#[derive(Clone, Debug)]
pub struct CharOperatorBundle {
    pub t: f64,
    pub h_series: Option<HermitianOperator>,
    pub h_closed: Option<HermitianOperator>,
    pub h_exact: Option<HermitianOperator>,
    pub series_terms: Option<usize>,
    pub exact_defect: Option<f64>,
    /// Basis indices on which the comparisons are made.
    pub window: ExactWindow,
    pub deviations: Deviations,
}

impl CharOperatorBundle {
    /// Runs every route that applies. The closed form is skipped when the
    /// structure does not verify; the series is skipped when it does not
    /// converge.
    pub fn build<F>(
        provider: &F,
        theta: f64,
        t: f64,
        truncation: &Truncation,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Result<HermitianOperator>,
    {
        Self::build_with(provider, None, theta, t, truncation)
    }

    /// As [`build`](Self::build), with `∂H` supplied analytically instead of
    /// by finite differences of the provider.
    pub fn build_with<F>(
        provider: &F,
        dh: Option<&HermitianOperator>,
        theta: f64,
        t: f64,
        truncation: &Truncation,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Result<HermitianOperator>,
    {
        let h = provider(theta)?;
        let dh = match dh {
            Some(d) => d.clone(),
            None => {
                let e = FD_STEP;
                let m = (provider(theta + e)?.into_matrix() - provider(theta - e)?.into_matrix())
                    * c(0.5 / e);
                HermitianOperator::hermitize(&m)?.0
            }
        };
        let structure = crate::conserved::analyze_truncated(&h, &dh, truncation)?;
        let stepped = || char_series_stepped(&h, &dh, t, SERIES_N_MAX, SERIES_TAIL_TOL).ok();
        let series = if truncation.is_exact() {
            char_series(&h, &dh, t, SERIES_N_MAX, SERIES_TAIL_TOL).ok().or_else(stepped)
        } else {
            stepped()
        };
        let closed = if structure.commuting {
            Some(dh.scaled(-t))
        } else {
            char_closed(&h, &dh, &structure, t).ok()
        };
        let exact = char_exact(provider, theta, t, scaled_fd_step(&h, &dh))?;
        let mut window = structure.window.clone();
        if let Some(s) = &series {
            window = window.intersect(&s.window);
        }
        let mut bundle = Self {
            t,
            h_series: series.as_ref().map(|s| s.op.clone()),
            h_closed: closed,
            h_exact: Some(exact.op),
            series_terms: series.map(|s| s.terms),
            exact_defect: Some(exact.defect),
            window: window.clone(),
            deviations: Deviations::default(),
        };
        bundle.restrict(&window);
        Ok(bundle)
    }

    /// Narrows the comparison window and recomputes the deviations on it.
    pub fn restrict(&mut self, window: &ExactWindow) {
        self.window = self.window.intersect(window);
        let w = &self.window;
        let dev = |a: &Option<HermitianOperator>, b: &Option<HermitianOperator>| match (a, b) {
            (Some(a), Some(b)) if !w.is_empty() => Some(Deviation::between(a, b, w)),
            _ => None,
        };
        self.deviations = Deviations {
            series_closed: dev(&self.h_series, &self.h_closed),
            series_exact: dev(&self.h_series, &self.h_exact),
            closed_exact: dev(&self.h_closed, &self.h_exact),
        };
    }
}

/// `i Ω⁻¹(e^{iΩt} − 1)` as a complex scalar, the prefactor of `∂H` when
/// `H^×∂H = Ω∂H`.
pub fn eigen_special_prefactor(omega: f64, t: f64) -> Complex64 {
    I * (Complex64::from_polar(1.0, omega * t) - 1.0) / omega
}
