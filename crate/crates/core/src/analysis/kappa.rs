//! Contraction coefficients of the four solver families.
//!
//! With `γ` the step size and `η ≥ 1` the thresholding slack:
//!
//! ```text
//! MStoIHT     κ   = 2√(1 − γ(2 − γα)ρ⁻) + √((η² − 1)(1 + γ²αρ̄⁺ − 2γρ⁻))
//! CStoIHT     κ_j = 8(1 − (2γ − γ²α_j)ρ⁻_j) + 4(η² − 1)(1 + γ²α_jρ̄⁺_j − 2γρ⁻_j),  κ̂ = √max_j κ_j
//! MStoGradMP  κ   = (1 + η₂)√(α/ρ⁻)·(√(max M·p)·√(ρ⁺(2η₁² − 1)/(ρ⁻η₂²) − 1) + √(η₁² − 1)/η₁)
//! CStoGradMP  β₁  = α/(2ρ⁻ − α)
//!             β₂  = 4·max M·p·((2η₁² − 1)ρ⁺ − η₁²ρ⁻)/(η₁²ρ⁻) + 2(η₁² − 1)/η₁²
//!             κ_j = (2 + 2η₂²)β₁β₂,  κ̃ = √max_j κ_j
//! ```
//!
//! The MStoIHT/MStoGradMP coefficients bound the expected error; the
//! concatenated ones bound the expected squared error per column, hence the
//! square roots.

use super::{checked_sqrt, ConvexityConstants, Sampling};
use crate::error::{ensure, Result};
use crate::Scalar;

pub fn kappa_mstoiht<T: Scalar>(c: &ConvexityConstants<T>, gamma: T, eta: T) -> Result<T> {
    check_positive(gamma, "gamma")?;
    check_eta(eta, "eta")?;
    let one = T::one();
    let two = one + one;
    let contraction = one - gamma * (two - gamma * c.alpha) * c.rho_minus;
    let slack = (eta * eta - one) * (one + gamma * gamma * c.alpha * c.rho_plus_bar - two * gamma * c.rho_minus);
    Ok(two * checked_sqrt(contraction, "1 - gamma(2 - gamma alpha) rho_minus")?
        + checked_sqrt(slack, "(eta^2 - 1)(1 + gamma^2 alpha rho_plus_bar - 2 gamma rho_minus)")?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CStoIhtKappa<T> {
    /// `κ̂`.
    pub kappa_hat: T,
    /// `κ_j`, one per column.
    pub per_column: Vec<T>,
}

pub fn kappa_cstoiht<T: Scalar>(per_column: &[ConvexityConstants<T>], gamma: T, eta: T) -> Result<CStoIhtKappa<T>> {
    ensure!(!per_column.is_empty(), InvalidArgument, "no columns");
    check_positive(gamma, "gamma")?;
    check_eta(eta, "eta")?;
    let one = T::one();
    let two = one + one;
    let four = two + two;
    let eight = four + four;
    let kappas: Vec<T> = per_column
        .iter()
        .map(|c| {
            eight * (one - (two * gamma - gamma * gamma * c.alpha) * c.rho_minus)
                + four
                    * (eta * eta - one)
                    * (one + gamma * gamma * c.alpha * c.rho_plus_bar - two * gamma * c.rho_minus)
        })
        .collect();
    let worst = kappas.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(CStoIhtKappa {
        kappa_hat: checked_sqrt(worst, "max_j kappa_j")?,
        per_column: kappas,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MStoGradMpKappa<T> {
    pub kappa: T,
    pub eta1: T,
    pub eta2: T,
    /// `max_i M·p(i)`.
    pub max_mp: T,
}

pub fn kappa_mstogradmp<T: Scalar>(
    c: &ConvexityConstants<T>,
    eta1: T,
    eta2: T,
    sampling: &Sampling,
) -> Result<MStoGradMpKappa<T>> {
    check_eta(eta1, "eta1")?;
    check_eta(eta2, "eta2")?;
    sampling.validate()?;
    ensure!(
        c.rho_plus >= c.rho_minus,
        Regime,
        "rho_plus {} below rho_minus {}",
        c.rho_plus,
        c.rho_minus
    );
    let one = T::one();
    let two = one + one;
    let max_mp = T::from_f64_lossy(sampling.max_mp());
    let matching = c.rho_plus * (two * eta1 * eta1 - one) / (c.rho_minus * eta2 * eta2) - one;
    let kappa = (one + eta2)
        * checked_sqrt(c.alpha / c.rho_minus, "alpha / rho_minus")?
        * (max_mp.sqrt() * checked_sqrt(matching, "rho_plus(2 eta1^2 - 1)/(rho_minus eta2^2) - 1")?
            + checked_sqrt(eta1 * eta1 - one, "eta1^2 - 1")? / eta1);
    Ok(MStoGradMpKappa {
        kappa,
        eta1,
        eta2,
        max_mp,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CStoGradMpKappa<T> {
    /// `κ̃`.
    pub kappa_tilde: T,
    pub beta1: T,
    pub beta2: T,
    /// `κ_j`; identical for every column when all columns share constants.
    pub kappa_j: T,
}

pub fn kappa_cstogradmp<T: Scalar>(
    c: &ConvexityConstants<T>,
    eta1: T,
    eta2: T,
    sampling: &Sampling,
) -> Result<CStoGradMpKappa<T>> {
    check_eta(eta1, "eta1")?;
    check_eta(eta2, "eta2")?;
    sampling.validate()?;
    let one = T::one();
    let two = one + one;
    let four = two + two;
    let gap = two * c.rho_minus - c.alpha;
    ensure!(
        gap > T::zero(),
        Regime,
        "beta1 needs 2 rho_minus > alpha (rho_minus = {}, alpha = {})",
        c.rho_minus,
        c.alpha
    );
    let beta1 = c.alpha / gap;
    let e1 = eta1 * eta1;
    let max_mp = T::from_f64_lossy(sampling.max_mp());
    let beta2 =
        four * max_mp * ((two * e1 - one) * c.rho_plus - e1 * c.rho_minus) / (e1 * c.rho_minus) + two * (e1 - one) / e1;
    let kappa_j = (two + two * eta2 * eta2) * beta1 * beta2;
    Ok(CStoGradMpKappa {
        kappa_tilde: checked_sqrt(kappa_j, "kappa_j")?,
        beta1,
        beta2,
        kappa_j,
    })
}

fn check_positive<T: Scalar>(v: T, name: &str) -> Result<()> {
    ensure!(
        v > T::zero() && v.is_finite(),
        InvalidArgument,
        "{name} must be positive, got {v}"
    );
    Ok(())
}

fn check_eta<T: Scalar>(v: T, name: &str) -> Result<()> {
    ensure!(
        v >= T::one() && v.is_finite(),
        InvalidArgument,
        "{name} must be at least 1, got {v}"
    );
    Ok(())
}
