//! Empirical check of restricted strong convexity of `F` and restricted
//! smoothness of its components on random row-sparse pairs.
//!
//! For `F(X) = (1/2m)‖Y − AX‖_F²` and a pair `X, X'` with joint row support
//! of size at most `k`,
//!
//! ```text
//! F(X') − F(X) − ⟨∇F(X), X' − X⟩ = (1/2m)‖A(X' − X)‖_F² ≥ ((1 − δ_k)/2m)·‖X' − X‖_F²
//! ‖∇f_i(X) − ∇f_i(X')‖_F = ‖a_i‖·‖a_i(X − X')‖ ≤ (1 + δ'_k)·‖X − X'‖_F
//! ```
//!
//! where `δ_k` is the restricted isometry constant and `δ'_k` the smallest
//! constant with `‖a_iᵀa_i x‖ ≤ (1 + δ'_k)‖x‖` for every row `a_i` and every
//! k-sparse `x`. The restricted isometry constant does not bound the second
//! inequality: the component gradient spreads over all `n` coordinates, so
//! `‖a_i‖² ≈ n/m` enters. Convexity is therefore tested at
//! `ρ⁻ = (1 − δ_k)/(2m)` (through the lower bound `(ρ⁻/2)‖Δ‖²`) and smoothness
//! at `ρ⁺ = 1 + δ'_k`; violations of smoothness at `1 + δ_k` are counted
//! separately.

use super::rip::{estimate_rip_delta, RipMode};
use crate::error::{ensure, Result};
use crate::linalg::DenseMatrix;
use crate::objective::MmvObjective;
use crate::rng::RngStream;
use crate::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct DrscReport<T> {
    /// Restricted isometry constant `δ_k` behind `ρ⁻`.
    pub delta_k: T,
    /// Component smoothness constant `δ'_k` behind `ρ⁺`.
    pub smoothness_delta_k: T,
    /// `ρ⁻` tested through `F(X') − F(X) − ⟨∇F(X), Δ⟩ ≥ (ρ⁻/2)‖Δ‖²`.
    pub rho_minus: T,
    /// `ρ⁺` tested through `‖∇f_i(X) − ∇f_i(X')‖ ≤ ρ⁺‖Δ‖` for every `i`.
    pub rho_plus: T,
    /// Smallest observed `2(F(X') − F(X) − ⟨∇F(X), Δ⟩)/‖Δ‖²`.
    pub empirical_rho_minus: T,
    /// Largest observed `‖∇f_i(X) − ∇f_i(X')‖/‖Δ‖`, one per component.
    pub empirical_rho_plus: Vec<T>,
    pub pairs: usize,
    pub convexity_violations: usize,
    pub smoothness_violations: usize,
    /// Smoothness violations had `ρ⁺ = 1 + δ_k` been used instead.
    pub smoothness_violations_at_rip: usize,
}

impl<T: Scalar> DrscReport<T> {
    pub fn passed(&self) -> bool {
        self.convexity_violations == 0 && self.smoothness_violations == 0
    }
}

/// `δ'_k = max_i ‖a_i‖·‖a_i restricted to its k largest entries‖ − 1`,
/// clamped at zero: the tight constant in `‖a_iᵀa_i x‖ ≤ (1 + δ'_k)‖x‖` over
/// k-sparse `x`.
pub fn smoothness_delta<T: Scalar>(a: &DenseMatrix<T>, k: usize) -> T {
    let mut worst = T::zero();
    for i in 0..a.rows() {
        let mut sq: Vec<T> = a.row(i).iter().map(|&v| v * v).collect();
        let full = sq.iter().copied().sum::<T>().sqrt();
        sq.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
        let top = sq.into_iter().take(k).sum::<T>().sqrt();
        worst = worst.max(full * top);
    }
    (worst - T::one()).max(T::zero())
}

/// Computes `δ_k` exhaustively and `δ'_k` in closed form, then samples
/// `trials` random pairs sharing a random row support of size `k`.
pub fn verify_drsc_drss<T: Scalar>(
    obj: &MmvObjective<T>,
    k: usize,
    trials: usize,
    rng: &mut RngStream,
) -> Result<DrscReport<T>> {
    let delta = estimate_rip_delta(obj.sensing(), k, RipMode::Exhaustive)?.delta;
    let smooth = smoothness_delta(obj.sensing(), k);
    check(obj, k, delta, smooth, trials, rng)
}

/// As [`verify_drsc_drss`] with a caller-supplied `δ` used for both
/// constants.
pub fn verify_drsc_drss_with_delta<T: Scalar>(
    obj: &MmvObjective<T>,
    k: usize,
    delta: T,
    trials: usize,
    rng: &mut RngStream,
) -> Result<DrscReport<T>> {
    check(obj, k, delta, delta, trials, rng)
}

fn check<T: Scalar>(
    obj: &MmvObjective<T>,
    k: usize,
    delta: T,
    smooth_delta: T,
    trials: usize,
    rng: &mut RngStream,
) -> Result<DrscReport<T>> {
    let n = obj.signal_dim();
    let l = obj.signal_count();
    let m = obj.components();
    ensure!(k >= 1 && k <= n, InvalidArgument, "support size {k} outside 1..={n}");
    ensure!(trials > 0, InvalidArgument, "need at least one trial");
    ensure!(
        delta >= T::zero() && delta < T::one(),
        Regime,
        "restricted isometry constant {delta} outside [0, 1)"
    );
    ensure!(
        smooth_delta >= T::zero(),
        InvalidArgument,
        "negative smoothness constant"
    );
    let one = T::one();
    let two = one + one;
    let rho_minus = (one - delta) / T::from_usize_lossy(2 * m);
    let rho_plus = one + smooth_delta;
    let rho_plus_rip = one + delta;
    // Slack for rounding in the differences being compared.
    let slack = T::from_f64_lossy(1e-10);

    let mut empirical_rho_minus = T::infinity();
    let mut empirical_rho_plus = vec![T::zero(); m];
    let mut convexity_violations = 0;
    let mut smoothness_violations = 0;
    let mut smoothness_violations_at_rip = 0;

    for _ in 0..trials {
        let support = rng.subset(n, k);
        let mut x = DenseMatrix::zeros(n, l);
        let mut x2 = DenseMatrix::zeros(n, l);
        for &r in &support {
            for j in 0..l {
                x.row_mut(r)[j] = T::from_f64_lossy(rng.standard_normal());
                x2.row_mut(r)[j] = T::from_f64_lossy(rng.standard_normal());
            }
        }
        let diff = x2.sub(&x)?;
        let diff_sq = diff.inner(&diff)?;
        if diff_sq.is_zero() {
            continue;
        }
        let f = obj.eval_f(&x)?;
        let f2 = obj.eval_f(&x2)?;
        let linear = obj.gradient(&x)?.inner(&diff)?;
        let gap = f2 - f - linear;
        let scale = f.abs() + f2.abs() + linear.abs();
        empirical_rho_minus = empirical_rho_minus.min(two * gap / diff_sq);
        if gap < rho_minus / two * diff_sq - slack * scale {
            convexity_violations += 1;
        }

        let diff_norm = diff_sq.sqrt();
        for (i, worst) in empirical_rho_plus.iter_mut().enumerate() {
            let g = obj.grad_component(&[i], &x)?;
            let g2 = obj.grad_component(&[i], &x2)?;
            let ratio = g.sub(&g2)?.frobenius_norm() / diff_norm;
            *worst = worst.max(ratio);
            if ratio > rho_plus * (one + slack) {
                smoothness_violations += 1;
            }
            if ratio > rho_plus_rip * (one + slack) {
                smoothness_violations_at_rip += 1;
            }
        }
    }

    Ok(DrscReport {
        delta_k: delta,
        smoothness_delta_k: smooth_delta,
        rho_minus,
        rho_plus,
        empirical_rho_minus,
        empirical_rho_plus,
        pairs: trials,
        convexity_violations,
        smoothness_violations,
        smoothness_violations_at_rip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_columns() {
        // A = I: δ_k = 0, F(X') − F(X) − ⟨∇F(X), Δ⟩ = ‖Δ‖²/2m exactly.
        let a = DenseMatrix::<f64>::identity(4);
        let y = DenseMatrix::from_fn(4, 2, |i, j| (i + j) as f64);
        let obj = MmvObjective::new(a, y).unwrap();
        let mut rng = RngStream::new(5, 0);
        let report = verify_drsc_drss(&obj, 2, 200, &mut rng).unwrap();
        assert!(report.passed());
        assert_eq!(report.delta_k, 0.0);
        assert!((report.empirical_rho_minus - 2.0 * report.rho_minus).abs() < 1e-12);
        assert_eq!(report.smoothness_delta_k, 0.0);
    }

    #[test]
    fn smoothness_delta_of_a_single_row() {
        // ‖a‖ = 5, two largest entries 4 and 3 give 5·5 − 1; one gives 5·4 − 1.
        let a = DenseMatrix::from_rows(&[[3.0, 0.0, 4.0]]).unwrap();
        assert_eq!(smoothness_delta(&a, 2), 24.0);
        assert_eq!(smoothness_delta(&a, 1), 19.0);
    }
}
