//! Restricted isometry constant of a sensing matrix.

use crate::error::{ensure, Result};
use crate::linalg::{DenseMatrix, Svd};
use crate::rng::RngStream;
use crate::Scalar;

/// Largest `C(n, k)` the exhaustive search accepts.
pub const EXHAUSTIVE_SUPPORT_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RipMode {
    /// Every support of size `k`; refused when there are more than
    /// [`EXHAUSTIVE_SUPPORT_LIMIT`] of them.
    Exhaustive,
    /// `samples` uniformly random supports; the result is a lower bound.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RipEstimate<T> {
    pub delta: T,
    /// True when every support was examined, so `delta` is the exact `δ_k`.
    pub exact: bool,
    pub supports_checked: u64,
}

/// `δ_k = max_{|S| = k} ‖A_SᵀA_S − I‖₂`, from the extreme singular values of
/// each column submatrix `A_S`.
pub fn estimate_rip_delta<T: Scalar>(a: &DenseMatrix<T>, k: usize, mode: RipMode) -> Result<RipEstimate<T>> {
    let n = a.cols();
    ensure!(k >= 1 && k <= n, InvalidArgument, "support size {k} outside 1..={n}");
    match mode {
        RipMode::Exhaustive => {
            let count = binomial(n as u64, k as u64);
            ensure!(
                count.is_some_and(|c| c <= EXHAUSTIVE_SUPPORT_LIMIT),
                Infeasible,
                "C({n}, {k}) supports exceed the exhaustive limit of {EXHAUSTIVE_SUPPORT_LIMIT}; use sampling"
            );
            let mut support: Vec<usize> = (0..k).collect();
            let mut delta = T::zero();
            let mut checked = 0u64;
            loop {
                delta = delta.max(support_delta(a, &support));
                checked += 1;
                if !next_combination(&mut support, n) {
                    break;
                }
            }
            Ok(RipEstimate {
                delta,
                exact: true,
                supports_checked: checked,
            })
        }
        RipMode::Sampled { samples, seed } => {
            ensure!(samples > 0, InvalidArgument, "sampled mode needs at least one support");
            let mut rng = RngStream::derive(seed, &[k as u64]);
            let mut delta = T::zero();
            for _ in 0..samples {
                delta = delta.max(support_delta(a, &rng.subset(n, k)));
            }
            Ok(RipEstimate {
                delta,
                exact: false,
                supports_checked: samples as u64,
            })
        }
    }
}

fn support_delta<T: Scalar>(a: &DenseMatrix<T>, support: &[usize]) -> T {
    // For k > m the thin decomposition still reports k singular values,
    // the surplus ones being zero.
    let s = Svd::compute(&a.select_columns(support)).s;
    let hi = s.iter().fold(T::zero(), |m, &x| m.max(x));
    let lo = s.iter().fold(T::infinity(), |m, &x| m.min(x));
    (T::one() - lo * lo).max(hi * hi - T::one())
}

/// Advances a sorted combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(acc).ok()
}
