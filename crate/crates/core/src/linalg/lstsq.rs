//! Minimum-norm linear least squares.
//!
//! Full-rank problems go through a Householder QR with column pivoting: of
//! `A` when it is tall, of `Aᵀ` when it is wide. When the pivoted factorization
//! reveals numerical rank deficiency the solve falls back to a Jacobi SVD
//! pseudo-inverse.

use super::{dot, DenseMatrix, Svd};
use crate::error::{ensure, Result};
use crate::Scalar;

/// Returns the minimum-Frobenius-norm `B` minimizing `‖Y − A·B‖_F`.
///
/// Rank deficiency is not an error.
pub fn least_squares_solve<T: Scalar>(a: &DenseMatrix<T>, y: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    ensure!(
        a.cols() >= 1,
        InvalidArgument,
        "least squares needs at least one column"
    );
    ensure!(
        a.rows() == y.rows(),
        DimensionMismatch,
        "A is {}x{} but Y has {} rows",
        a.rows(),
        a.cols(),
        y.rows()
    );
    let (m, s) = a.shape();
    if s <= m {
        let qr = PivotedQr::factor((0..s).map(|j| a.column(j)).collect(), m);
        if qr.rank == s {
            return Ok(qr.solve_tall(y));
        }
    } else {
        let qr = PivotedQr::factor((0..m).map(|i| a.row(i).to_vec()).collect(), s);
        if qr.rank == m {
            return Ok(qr.solve_wide(y));
        }
    }
    Ok(svd_solve(a, y))
}

/// Householder QR with column pivoting, `A·P = Q·R`, stored column-major.
struct PivotedQr<T> {
    len: usize,
    /// After factoring: the upper triangle holds `R`.
    cols: Vec<Vec<T>>,
    /// Reflector `j` acts on entries `j..len` as `I − tau·v·vᵀ`.
    reflectors: Vec<(Vec<T>, T)>,
    perm: Vec<usize>,
    rank: usize,
}

impl<T: Scalar> PivotedQr<T> {
    fn factor(mut cols: Vec<Vec<T>>, len: usize) -> Self {
        let n = cols.len();
        let steps = n.min(len);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(steps);
        let tol = T::epsilon() * T::from_usize_lossy(len.max(n));
        let mut lead = T::zero();
        let mut rank = steps;

        for j in 0..steps {
            let (p, best) = (j..n)
                .map(|c| (c, dot(&cols[c][j..], &cols[c][j..])))
                .fold((j, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
            cols.swap(j, p);
            perm.swap(j, p);
            let norm = best.sqrt();
            if j == 0 {
                lead = norm;
            }
            if norm <= tol * lead || norm.is_zero() {
                rank = j;
                break;
            }

            let x0 = cols[j][j];
            let alpha = if x0 >= T::zero() { -norm } else { norm };
            let mut v: Vec<T> = cols[j][j..].to_vec();
            v[0] = x0 - alpha;
            let vtv = dot(&v, &v);
            let tau = (T::one() + T::one()) / vtv;
            cols[j][j] = alpha;
            cols[j][j + 1..].iter_mut().for_each(|x| *x = T::zero());
            for col in cols.iter_mut().skip(j + 1) {
                let w = tau * dot(&v, &col[j..]);
                for (ci, &vi) in col[j..].iter_mut().zip(&v) {
                    *ci -= w * vi;
                }
            }
            reflectors.push((v, tau));
        }

        Self {
            len,
            cols,
            reflectors,
            perm,
            rank,
        }
    }

    #[inline]
    fn r(&self, i: usize, j: usize) -> T {
        self.cols[j][i]
    }

    /// Apply `Qᵀ` to the columns of a column-major block.
    fn apply_qt(&self, block: &mut [Vec<T>]) {
        for (j, (v, tau)) in self.reflectors.iter().enumerate() {
            for col in block.iter_mut() {
                let w = *tau * dot(v, &col[j..]);
                for (ci, &vi) in col[j..].iter_mut().zip(v) {
                    *ci -= w * vi;
                }
            }
        }
    }

    fn apply_q(&self, block: &mut [Vec<T>]) {
        for (j, (v, tau)) in self.reflectors.iter().enumerate().rev() {
            for col in block.iter_mut() {
                let w = *tau * dot(v, &col[j..]);
                for (ci, &vi) in col[j..].iter_mut().zip(v) {
                    *ci -= w * vi;
                }
            }
        }
    }

    /// Full column rank, `A` factored directly.
    fn solve_tall(&self, y: &DenseMatrix<T>) -> DenseMatrix<T> {
        let s = self.cols.len();
        let mut rhs: Vec<Vec<T>> = (0..y.cols()).map(|l| y.column(l)).collect();
        self.apply_qt(&mut rhs);
        let mut out = DenseMatrix::zeros(s, y.cols());
        for (l, z) in rhs.iter_mut().enumerate() {
            for i in (0..s).rev() {
                let mut acc = z[i];
                for (k, &zk) in z.iter().enumerate().take(s).skip(i + 1) {
                    acc -= self.r(i, k) * zk;
                }
                z[i] = acc / self.r(i, i);
            }
            for i in 0..s {
                out[(self.perm[i], l)] = z[i];
            }
        }
        out
    }

    /// Full row rank, `Aᵀ` factored: `Aᵀ·P = Q·R`, so `Pᵀ·A = Rᵀ·Qᵀ` and the
    /// minimum-norm solution is `Q·[R⁻ᵀ·Pᵀ·Y; 0]`.
    fn solve_wide(&self, y: &DenseMatrix<T>) -> DenseMatrix<T> {
        let m = self.cols.len();
        let mut sol: Vec<Vec<T>> = Vec::with_capacity(y.cols());
        for l in 0..y.cols() {
            let mut w = vec![T::zero(); self.len];
            for i in 0..m {
                let mut acc = y[(self.perm[i], l)];
                for (k, &wk) in w.iter().enumerate().take(i) {
                    acc -= self.r(k, i) * wk;
                }
                w[i] = acc / self.r(i, i);
            }
            sol.push(w);
        }
        self.apply_q(&mut sol);
        let mut out = DenseMatrix::zeros(self.len, y.cols());
        for (l, col) in sol.iter().enumerate() {
            out.set_column(l, col);
        }
        out
    }
}

fn svd_solve<T: Scalar>(a: &DenseMatrix<T>, y: &DenseMatrix<T>) -> DenseMatrix<T> {
    let (m, s) = a.shape();
    let tall = s <= m;
    // tall: A = U Σ Vᵀ, B = V Σ⁺ Uᵀ Y.  wide: Aᵀ = U Σ Vᵀ, B = U Σ⁺ Vᵀ Y.
    let svd = if tall {
        Svd::compute(a)
    } else {
        Svd::compute(&a.transpose())
    };
    let (left, right) = if tall { (&svd.u, &svd.v) } else { (&svd.v, &svd.u) };
    let cutoff = svd.max_singular_value() * T::epsilon() * T::from_usize_lossy(m.max(s));
    let mut out = DenseMatrix::zeros(s, y.cols());
    for l in 0..y.cols() {
        let yl = y.column(l);
        for (r, &sigma) in svd.s.iter().enumerate() {
            if sigma <= cutoff || sigma.is_zero() {
                continue;
            }
            let coef = dot(&left[r], &yl) / sigma;
            for i in 0..s {
                out[(i, l)] += coef * right[r][i];
            }
        }
    }
    out
}
