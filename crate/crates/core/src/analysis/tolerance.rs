//! Tolerance terms: how far from `X*` the expected error can stall when
//! `X*` is not an exact minimizer (noisy data).

use super::{ConvexityConstants, Sampling};
use crate::error::{ensure, Result};
use crate::linalg::DenseMatrix;
use crate::objective::MmvObjective;
use crate::rng::IndexSampler;
use crate::sparsity::approx_k_vec;
use crate::Scalar;

/// `max_{|Ω| ≤ s} ‖P_Ω G‖_F`: the root of the `s` largest squared row norms.
pub fn top_rows_norm<T: Scalar>(g: &DenseMatrix<T>, s: usize) -> T {
    let mut sq: Vec<T> = (0..g.rows()).map(|i| g.row(i).iter().map(|&v| v * v).sum()).collect();
    sq.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sq.into_iter().take(s).sum::<T>().sqrt()
}

/// MStoGradMP tolerance
///
/// ```text
/// σ = (1 + η₂)/(ρ⁻·min M·p) · (2·max M·p·√(α/ρ⁻) + 3) · max_{|Ω| ≤ 4k, i} ‖P_Ω ∇f_i(X*)‖_F
/// ```
pub fn sigma_mstogradmp<T: Scalar>(
    obj: &MmvObjective<T>,
    x_star: &DenseMatrix<T>,
    k: usize,
    c: &ConvexityConstants<T>,
    eta2: T,
    sampling: &Sampling,
) -> Result<T> {
    sampling.validate()?;
    ensure!(
        sampling.components == obj.components(),
        DimensionMismatch,
        "sampling over {} components, objective has {}",
        sampling.components,
        obj.components()
    );
    ensure!(eta2 >= T::one(), InvalidArgument, "eta2 must be at least 1");
    let mut worst = T::zero();
    for i in 0..obj.components() {
        let g = obj.grad_component(&[i], x_star)?;
        worst = worst.max(top_rows_norm(&g, 4 * k));
    }
    let one = T::one();
    let two = one + one;
    let three = two + one;
    let min_mp = T::from_f64_lossy(sampling.min_mp());
    let max_mp = T::from_f64_lossy(sampling.max_mp());
    let prefactor = (one + eta2) / (c.rho_minus * min_mp);
    Ok(prefactor * (two * max_mp * (c.alpha / c.rho_minus).sqrt() + three) * worst)
}

/// Per-column CStoIHT tolerances
///
/// ```text
/// σ_j = 4γ²/min_i (M·p(i))² · (2·E_i‖P_Ω ∇g_{i,j}(X*_j)‖² + (η² − 1)·E_i‖∇g_{i,j}(X*_j)‖²)
/// ```
///
/// with `Ω` the `3k` largest entries of each component gradient, which
/// bounds every admissible `Ω` of that size.
pub fn sigma_cstoiht<T: Scalar>(
    obj: &MmvObjective<T>,
    x_star: &DenseMatrix<T>,
    k: usize,
    gamma: T,
    eta: T,
    p: &[f64],
) -> Result<Vec<T>> {
    let sampler = IndexSampler::new(p)?;
    let m = obj.components();
    ensure!(
        sampler.len() == m,
        DimensionMismatch,
        "{} probabilities for {m} components",
        p.len()
    );
    ensure!(
        x_star.shape() == (obj.signal_dim(), obj.signal_count()),
        DimensionMismatch,
        "X* has the wrong shape"
    );
    let n = obj.signal_dim();
    let omega = (3 * k).min(n);
    let one = T::one();
    let two = one + one;
    let four = two + two;
    let min_mp = p.iter().copied().fold(f64::INFINITY, f64::min) * m as f64;
    let prefactor = four * gamma * gamma / T::from_f64_lossy(min_mp * min_mp);
    let mut out = Vec::with_capacity(obj.signal_count());
    for j in 0..obj.signal_count() {
        let w = x_star.column(j);
        let mut projected = T::zero();
        let mut full = T::zero();
        for (i, &pi) in p.iter().enumerate() {
            let g = obj.grad_column_component(i, j, &w)?;
            let top = approx_k_vec(&g, omega)?;
            let pi = T::from_f64_lossy(pi);
            projected += pi * top.iter().map(|r| g[r] * g[r]).sum::<T>();
            full += pi * g.iter().map(|&v| v * v).sum::<T>();
        }
        out.push(prefactor * (two * projected + (eta * eta - one) * full));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_rows_of_single_nonzero_row() {
        let g = DenseMatrix::from_rows(&[[0.0, 0.0], [3.0, -4.0], [0.0, 0.0]]).unwrap();
        for s in 1..=3 {
            assert_eq!(top_rows_norm(&g, s), 5.0);
        }
    }

    #[test]
    fn consistent_instance_has_zero_tolerance() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.5, 0.0], [0.0, 1.0, 2.0]]).unwrap();
        let x = DenseMatrix::from_rows(&[[1.0], [0.0], [-1.0]]).unwrap();
        let y = a.matmul(&x).unwrap();
        let obj = MmvObjective::new(a, y).unwrap();
        let c = ConvexityConstants::new(0.2, 1.0, 1.0, 1.0).unwrap();
        let s = sigma_mstogradmp(&obj, &x, 1, &c, 1.0, &Sampling::uniform(2)).unwrap();
        assert_eq!(s, 0.0);
        let s = sigma_cstoiht(&obj, &x, 1, 1.0, 1.0, &[0.5, 0.5]).unwrap();
        assert_eq!(s, vec![0.0]);
    }
}
