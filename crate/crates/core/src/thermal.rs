//! Gibbs states, the closed-form and Bernoulli-series SLD for a parameter of
//! the Hamiltonian, and the thermal QFI.

use std::f64::consts::PI;
use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::conserved::ConservedStructure;
use crate::error::{Error, Result};
use crate::operator::{c, commutator, spectral, HermitianOperator};
use crate::state::{expectation, SpectralState};

/// Below this value of `βΩ` the Taylor branch of `r` is used.
pub const R_TAYLOR_SWITCH: f64 = 0.1;
pub const BERNOULLI_N_MAX: usize = 5000;
/// Scaled coefficients below this index come from exact Bernoulli numbers.
pub const BERNOULLI_EXACT_TERMS: usize = 40;
pub const BERNOULLI_TAIL_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct ThermalSpec {
    pub beta: f64,
    pub h: HermitianOperator,
    /// `ln Z`, kept in log form to avoid overflow.
    pub log_z: f64,
}

impl ThermalSpec {
    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta must be finite and positive, got {beta}"
        )));
    }
    Ok(())
}

/// Gibbs state and its partition function.
pub fn thermal(h: &HermitianOperator, beta: f64) -> Result<(ThermalSpec, SpectralState)> {
    check_beta(beta)?;
    let s = spectral(h)?;
    let e0 = s.values[0];
    let weights: Vec<f64> = s.values.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let sum: f64 = weights.iter().sum();
    let probs = weights.iter().map(|w| w / sum).collect();
    let spec = ThermalSpec {
        beta,
        h: h.clone(),
        log_z: sum.ln() - beta * e0,
    };
    Ok((spec, SpectralState::new(probs, s.vectors)?))
}

/// `e^{−βH}/Z` in the eigenbasis of `H`, ground state first.
pub fn thermal_state(h: &HermitianOperator, beta: f64) -> Result<SpectralState> {
    Ok(thermal(h, beta)?.1)
}

/// `r(β, Ω) = Ω⁻²[1 − tanh(βΩ)/(βΩ)]`.
pub fn r_function(beta: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::NonPositiveOmega(omega));
    }
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("beta must be >= 0, got {beta}")));
    }
    let x = beta * omega;
    let bracket = if x < R_TAYLOR_SWITCH {
        const C: [f64; 6] = [
            1.0 / 3.0,
            -2.0 / 15.0,
            17.0 / 315.0,
            -62.0 / 2835.0,
            1382.0 / 155925.0,
            -21844.0 / 6081075.0,
        ];
        let x2 = x * x;
        x2 * C.iter().rev().fold(0.0, |acc, &c| acc * x2 + c)
    } else if x.is_infinite() {
        1.0
    } else {
        1.0 - x.tanh() / x
    };
    Ok(bracket / (omega * omega))
}

/// `L − ⟨L⟩`.
pub fn recenter(l: &HermitianOperator, rho: &SpectralState) -> Result<HermitianOperator> {
    let mean = expectation(rho, l)?.re;
    Ok(l.shifted(-mean))
}

/// Closed-form SLD `βr(β/2,Ω)𝒱 − (2/Ω)tanh(βΩ/2)∂H`, re-centred on `ρ`.
pub fn sld_thermal_closed(
    dh: &HermitianOperator,
    structure: &ConservedStructure,
    beta: f64,
    rho: &SpectralState,
) -> Result<HermitianOperator> {
    let omega = structure.require_verified()?;
    sld_thermal_closed_unchecked(dh, &structure.v, omega, beta, rho)
}

pub fn sld_thermal_closed_unchecked(
    dh: &HermitianOperator,
    v: &HermitianOperator,
    omega: f64,
    beta: f64,
    rho: &SpectralState,
) -> Result<HermitianOperator> {
    check_beta(beta)?;
    let r = r_function(0.5 * beta, omega)?;
    let k = 2.0 / omega * (0.5 * beta * omega).tanh();
    let l = &v.scaled(beta * r) - &dh.scaled(k);
    recenter(&l, rho)
}

/// The SLD as written in its literal form `βr(β,Ω)𝒱 − Ω⁻¹tanh(βΩ)∂H`,
/// without re-centring.
pub fn sld_thermal_closed_stated(
    dh: &HermitianOperator,
    v: &HermitianOperator,
    omega: f64,
    beta: f64,
) -> Result<HermitianOperator> {
    check_beta(beta)?;
    let r = r_function(beta, omega)?;
    Ok(&v.scaled(beta * r) - &dh.scaled((beta * omega).tanh() / omega))
}

type Cache = Mutex<Vec<BigRational>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![BigRational::one()]))
}

/// Bernoulli numbers `𝓑_0..=𝓑_m` (with `𝓑_1 = −1/2`) from
/// `Σ_{k=0}^{m} C(m+1,k)𝓑_k = 0`, exact.
pub fn bernoulli_numbers(m: usize) -> Vec<BigRational> {
    let mut b = cache().lock().unwrap_or_else(|e| e.into_inner());
    while b.len() <= m {
        let n = b.len();
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            if !bk.is_zero() {
                acc += bk * BigRational::from_integer(binom.clone());
            }
            binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
        }
        let next = -acc / BigRational::from_integer(BigInt::from(n + 1));
        b.push(next);
    }
    b[..=m].to_vec()
}

pub fn bernoulli(m: usize) -> BigRational {
    bernoulli_numbers(m).pop().expect("nonempty")
}

/// `4(4^{n+1} − 1)𝓑_{2n+2}/(2n+2)!` for `n = 0..n_terms`.
pub fn sld_series_coefficients(n_terms: usize) -> Vec<f64> {
    if n_terms == 0 {
        return Vec::new();
    }
    let b = bernoulli_numbers(2 * n_terms);
    let mut fact = BigInt::from(2);
    let mut out = Vec::with_capacity(n_terms);
    for n in 0..n_terms {
        let m = 2 * n + 2;
        if n > 0 {
            fact = fact * BigInt::from(m - 1) * BigInt::from(m);
        }
        let four = BigInt::from(4).pow(n as u32 + 1) - BigInt::one();
        let num = &b[m] * BigRational::from_integer(BigInt::from(4) * four);
        let coef = num / BigRational::from_integer(fact.clone());
        out.push(coef.to_f64().unwrap_or(0.0));
    }
    out
}

/// `c_n π^{2n}` for `n = 0..n_terms`, bounded by `8ζ(2)/π²` in magnitude.
/// Exact Bernoulli numbers give the leading terms; beyond them
/// `c_n π^{2n} = (−1)^n 8(1 − 4^{−n−1})ζ(2n+2)/π²`, with `ζ` summed directly.
pub fn sld_series_scaled_coefficients(n_terms: usize) -> Vec<f64> {
    let exact = sld_series_coefficients(n_terms.min(BERNOULLI_EXACT_TERMS));
    let pi2 = PI * PI;
    let mut out: Vec<f64> = exact
        .iter()
        .enumerate()
        .map(|(n, &c)| c * pi2.powi(n as i32))
        .collect();
    for n in out.len()..n_terms {
        let s = (2 * n + 2) as f64;
        let zeta = 1.0 + 2f64.powf(-s) + 3f64.powf(-s) + 4f64.powf(-s);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign * 8.0 * (1.0 - 4f64.powf(-s / 2.0)) * zeta / pi2);
    }
    out
}

#[derive(Clone, Debug)]
pub struct BernoulliSeries {
    /// Re-centred SLD.
    pub l: HermitianOperator,
    pub terms: usize,
    pub last_term_norm: f64,
    /// `β·spread(H) < π`.
    pub within_radius: bool,
}

/// `L = Σ c_n (G^×)^{2n}∂G` with `G = −βH − ln Z`, using
/// `(G^×)^{2n}∂G = −β^{2n+1}(H^×)^{2n}∂H`, then re-centred. Summed as
/// `−β Σ (c_nπ^{2n}) ((β/π)H^×)^{2n}∂H`, so terms decay like
/// `(β·spread/π)^{2n}` without underflow.
pub fn sld_bernoulli_series(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    beta: f64,
    n_max: usize,
) -> Result<BernoulliSeries> {
    check_beta(beta)?;
    let (spec, rho) = thermal(h, beta)?;
    let spread = spectral(&spec.h)?.spread();
    let within_radius = beta * spread < PI;
    let coefs = sld_series_scaled_coefficients(n_max + 1);
    let step = (beta / PI).powi(2);
    let mut y = dh.matrix().clone();
    let mut sum = y.clone() * c(-beta * coefs[0]);
    let mut last = sum.norm();
    let mut quiet = 0;
    for (n, &cn) in coefs.iter().enumerate().skip(1) {
        y = commutator(h, &commutator(h, &y)?)? * c(step);
        let term = &y * c(-beta * cn);
        last = term.norm();
        if !last.is_finite() {
            break;
        }
        sum += term;
        let total = sum.norm();
        if last <= BERNOULLI_TAIL_TOL * total || y.norm() == 0.0 {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 2 || y.norm() == 0.0 {
            let l = HermitianOperator::hermitize(&sum)?.0;
            return Ok(BernoulliSeries {
                l: recenter(&l, &rho)?,
                terms: n + 1,
                last_term_norm: last,
                within_radius,
            });
        }
    }
    if dh.norm() == 0.0 {
        return Ok(BernoulliSeries {
            l: HermitianOperator::zeros(h.dim()),
            terms: 1,
            last_term_norm: 0.0,
            within_radius,
        });
    }
    Err(Error::SeriesNotConverged {
        terms: n_max + 1,
        last_term_norm: last,
        partial: Box::new(sum),
    })
}

/// `⟨L²⟩ − ⟨L⟩²` with the closed-form SLD.
pub fn qfi_thermal(
    dh: &HermitianOperator,
    structure: &ConservedStructure,
    beta: f64,
    rho: &SpectralState,
) -> Result<f64> {
    let l = sld_thermal_closed(dh, structure, beta, rho)?;
    let l2 = l.matrix() * l.matrix();
    let mean = expectation(rho, &l)?.re;
    Ok(expectation(rho, &l2)?.re - mean * mean)
}

/// `β²r²⟨𝒱²⟩ + Ω⁻²tanh²(βΩ)⟨(∂H)²⟩ − (β/Ω)r·tanh(βΩ)⟨{𝒱,∂H}⟩` with
/// `r = r(β,Ω)`, as literally stated.
pub fn qfi_thermal_stated(
    dh: &HermitianOperator,
    v: &HermitianOperator,
    omega: f64,
    beta: f64,
    rho: &SpectralState,
) -> Result<f64> {
    check_beta(beta)?;
    let r = r_function(beta, omega)?;
    let th = (beta * omega).tanh();
    let (vm, dm) = (v.matrix(), dh.matrix());
    let v2 = expectation(rho, &(vm * vm))?.re;
    let d2 = expectation(rho, &(dm * dm))?.re;
    let anti = expectation(rho, &(vm * dm + dm * vm))?.re;
    Ok(beta * beta * r * r * v2 + th * th / (omega * omega) * d2 - beta / omega * r * th * anti)
}
