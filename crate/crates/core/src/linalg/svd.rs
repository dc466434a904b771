use super::{dot, DenseMatrix};
use crate::Scalar;

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U · diag(s) · Vᵀ` computed with
/// one-sided (Hestenes) Jacobi rotations.
///
/// For an `m × r` input, `u` holds `r` columns of length `m` (zero for a zero
/// singular value), `s` has length `r` and `v` holds `r` columns of length `r`.
/// Singular values are not sorted.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: Vec<Vec<T>>,
    pub s: Vec<T>,
    pub v: Vec<Vec<T>>,
}

impl<T: Scalar> Svd<T> {
    pub fn compute(a: &DenseMatrix<T>) -> Self {
        let cols = (0..a.cols()).map(|j| a.column(j)).collect();
        Self::from_columns(cols)
    }

    /// Decomposes the matrix whose columns are `cols` (all the same length).
    pub fn from_columns(mut u: Vec<Vec<T>>) -> Self {
        let r = u.len();
        let mut v: Vec<Vec<T>> = (0..r)
            .map(|j| {
                let mut e = vec![T::zero(); r];
                e[j] = T::one();
                e
            })
            .collect();
        let eps = T::epsilon();
        let two = T::one() + T::one();

        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..r {
                for q in p + 1..r {
                    let alpha = dot(&u[p], &u[p]);
                    let beta = dot(&u[q], &u[q]);
                    let gamma = dot(&u[p], &u[q]);
                    if gamma.is_zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (two * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut u, p, q, c, s);
                    rotate(&mut v, p, q, c, s);
                }
            }
            if !rotated {
                break;
            }
        }

        let mut s = Vec::with_capacity(r);
        for col in u.iter_mut() {
            let norm = dot(col, col).sqrt();
            if norm > T::zero() {
                col.iter_mut().for_each(|x| *x /= norm);
            }
            s.push(norm);
        }
        Self { u, s, v }
    }

    pub fn max_singular_value(&self) -> T {
        self.s.iter().fold(T::zero(), |m, &x| m.max(x))
    }
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Singular values of `a`, largest first.
pub fn singular_values<T: Scalar>(a: &DenseMatrix<T>) -> Vec<T> {
    let svd = if a.cols() <= a.rows() {
        Svd::compute(a)
    } else {
        Svd::compute(&a.transpose())
    };
    let mut s = svd.s;
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}
