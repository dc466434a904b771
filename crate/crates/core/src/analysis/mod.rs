//! Convergence constants of the solvers and empirical checks of the
//! assumptions behind them.
//!
//! The constants follow the usual conventions: `ρ⁻` is the restricted strong
//! convexity constant of `F`, `ρ⁺(i)` the restricted smoothness constant of
//! component `f_i`, and
//!
//! ```text
//! α  = max_i ρ⁺(i) / (M·p(i))
//! ρ⁺ = max_i ρ⁺(i)
//! ρ̄⁺ = (1/M)·Σ_i ρ⁺(i)
//! ```
//!
//! The thresholding operators are exact (`η = η₁ = η₂ = 1` in the solvers),
//! but the formulas accept general `η ≥ 1`.

mod drsc;
mod kappa;
mod rip;
mod tolerance;

use crate::error::{ensure, Result};
use crate::linalg::DenseMatrix;
use crate::Scalar;

pub use drsc::{smoothness_delta, verify_drsc_drss, verify_drsc_drss_with_delta, DrscReport};
pub use kappa::{
    kappa_cstogradmp, kappa_cstoiht, kappa_mstogradmp, kappa_mstoiht, CStoGradMpKappa, CStoIhtKappa, MStoGradMpKappa,
};
pub use rip::{estimate_rip_delta, RipEstimate, RipMode, EXHAUSTIVE_SUPPORT_LIMIT};
pub use tolerance::{sigma_cstoiht, sigma_mstogradmp, top_rows_norm};

/// Restricted convexity/smoothness constants entering the contraction
/// coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexityConstants<T> {
    pub rho_minus: T,
    pub rho_plus: T,
    pub rho_plus_bar: T,
    pub alpha: T,
}

impl<T: Scalar> ConvexityConstants<T> {
    /// Requires every constant positive and finite with `ρ⁻ ≤ ρ̄⁺ ≤ ρ⁺`.
    pub fn new(rho_minus: T, rho_plus: T, rho_plus_bar: T, alpha: T) -> Result<Self> {
        for (name, v) in [
            ("rho_minus", rho_minus),
            ("rho_plus", rho_plus),
            ("rho_plus_bar", rho_plus_bar),
            ("alpha", alpha),
        ] {
            ensure!(
                v > T::zero() && v.is_finite(),
                InvalidArgument,
                "{name} must be positive, got {v}"
            );
        }
        ensure!(
            rho_minus <= rho_plus_bar && rho_plus_bar <= rho_plus,
            InvalidArgument,
            "expected rho_minus <= rho_plus_bar <= rho_plus, got {rho_minus}, {rho_plus_bar}, {rho_plus}"
        );
        Ok(Self {
            rho_minus,
            rho_plus,
            rho_plus_bar,
            alpha,
        })
    }

    /// Assembles `α`, `ρ⁺` and `ρ̄⁺` from per-component smoothness constants
    /// and the sampling distribution.
    pub fn from_components(rho_minus: T, rho_plus_components: &[T], p: &[f64]) -> Result<Self> {
        let m = rho_plus_components.len();
        ensure!(m > 0, InvalidArgument, "no components");
        ensure!(
            p.len() == m,
            DimensionMismatch,
            "{} probabilities for {m} components",
            p.len()
        );
        ensure!(
            p.iter().all(|&x| x > 0.0),
            InvalidArgument,
            "probabilities must be positive"
        );
        let mf = T::from_usize_lossy(m);
        let alpha = rho_plus_components
            .iter()
            .zip(p)
            .map(|(&r, &pi)| r / (mf * T::from_f64_lossy(pi)))
            .fold(T::neg_infinity(), T::max);
        let rho_plus = rho_plus_components.iter().copied().fold(T::neg_infinity(), T::max);
        let rho_plus_bar = rho_plus_components.iter().copied().sum::<T>() / mf;
        Self::new(rho_minus, rho_plus, rho_plus_bar, alpha)
    }

    /// Constants implied by a restricted isometry constant `δ` of a sensing
    /// matrix with `m` rows under uniform sampling:
    /// `ρ⁻ = (1 − δ)/(2m)` and `ρ⁺(i) = 1 + δ` for every component.
    pub fn from_rip(delta: T, m: usize) -> Result<Self> {
        ensure!(
            delta >= T::zero() && delta < T::one(),
            Regime,
            "restricted isometry constant {delta} outside [0, 1)"
        );
        let rho_minus = (T::one() - delta) / T::from_usize_lossy(2 * m);
        let rho_plus = T::one() + delta;
        Self::new(rho_minus, rho_plus, rho_plus, rho_plus)
    }
}

/// Summary of a sampling distribution over `M` components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub components: usize,
    pub p_min: f64,
    pub p_max: f64,
}

impl Sampling {
    pub fn uniform(components: usize) -> Self {
        let p = 1.0 / components as f64;
        Self {
            components,
            p_min: p,
            p_max: p,
        }
    }

    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        ensure!(!p.is_empty(), InvalidArgument, "empty probability vector");
        ensure!(
            p.iter().all(|&x| x > 0.0 && x.is_finite()),
            InvalidArgument,
            "probabilities must be positive"
        );
        Ok(Self {
            components: p.len(),
            p_min: p.iter().copied().fold(f64::INFINITY, f64::min),
            p_max: p.iter().copied().fold(0.0, f64::max),
        })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        ensure!(self.components > 0, InvalidArgument, "sampling over zero components");
        ensure!(
            self.p_min > 0.0 && self.p_min <= self.p_max && self.p_max <= 1.0,
            InvalidArgument,
            "need 0 < p_min <= p_max <= 1, got {} and {}",
            self.p_min,
            self.p_max
        );
        Ok(())
    }

    /// `max_i M·p(i)`.
    pub fn max_mp(&self) -> f64 {
        self.components as f64 * self.p_max
    }

    /// `min_i M·p(i)`.
    pub fn min_mp(&self) -> f64 {
        self.components as f64 * self.p_min
    }
}

/// `‖X_t − X*‖_F / ‖X*‖_F`.
pub fn rel_err<T: Scalar>(x_t: &DenseMatrix<T>, x_star: &DenseMatrix<T>) -> Result<T> {
    let norm = x_star.frobenius_norm();
    ensure!(!norm.is_zero(), InvalidArgument, "relative error against a zero matrix");
    Ok(x_t.sub(x_star)?.frobenius_norm() / norm)
}

/// Square root with an explicit regime check instead of NaN.
pub(crate) fn checked_sqrt<T: Scalar>(v: T, what: &str) -> Result<T> {
    ensure!(v >= T::zero(), Regime, "{what} = {v} is negative");
    Ok(v.sqrt())
}
