//! Row supports and hard thresholding in the canonical basis.

use std::cmp::Ordering;

use crate::error::{ensure, Result};
use crate::linalg::{row_norms, DenseMatrix};
use crate::Scalar;

/// Strictly increasing set of row indices below `ambient`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowSupport {
    indices: Vec<usize>,
    ambient: usize,
}

impl RowSupport {
    /// Sorts and deduplicates `indices`; fails on any index `>= ambient`.
    pub fn new(mut indices: Vec<usize>, ambient: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            ensure!(
                last < ambient,
                InvalidArgument,
                "row index {last} out of range for {ambient} rows"
            );
        }
        Ok(Self { indices, ambient })
    }

    pub fn empty(ambient: usize) -> Self {
        Self {
            indices: Vec::new(),
            ambient,
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            indices: (0..ambient).collect(),
            ambient,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &RowSupport) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn complement(&self) -> Self {
        Self {
            indices: (0..self.ambient).filter(|&i| !self.contains(i)).collect(),
            ambient: self.ambient,
        }
    }

    pub fn union(&self, other: &RowSupport) -> Result<Self> {
        support_union(self, other)
    }
}

/// Indices of the `k` largest-magnitude entries of `w`, lowest index first on ties.
pub fn approx_k_vec<T: Scalar>(w: &[T], k: usize) -> Result<RowSupport> {
    ensure!(
        k <= w.len(),
        InvalidArgument,
        "k = {k} exceeds vector length {}",
        w.len()
    );
    let mags: Vec<T> = w.iter().map(|x| x.abs()).collect();
    Ok(top_k(&mags, k))
}

/// Rows of `x` with the `k` largest Euclidean norms, lowest index first on ties.
pub fn approx_k_rows<T: Scalar>(x: &DenseMatrix<T>, k: usize) -> Result<RowSupport> {
    ensure!(k <= x.rows(), InvalidArgument, "k = {k} exceeds row count {}", x.rows());
    Ok(top_k(&row_norms(x), k))
}

/// NaN ranks above everything so a blown-up iterate is never silently dropped.
fn rank_key<T: Scalar>(v: T) -> T {
    if v.is_nan() {
        T::infinity()
    } else {
        v
    }
}

pub(crate) fn top_k<T: Scalar>(scores: &[T], k: usize) -> RowSupport {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    if k > 0 && k < n {
        let cmp = |&a: &usize, &b: &usize| {
            rank_key(scores[b])
                .partial_cmp(&rank_key(scores[a]))
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        };
        order.select_nth_unstable_by(k - 1, cmp);
    }
    order.truncate(k);
    order.sort_unstable();
    RowSupport {
        indices: order,
        ambient: n,
    }
}

/// Keeps the rows in `support` and zeroes the rest.
pub fn project_rows<T: Scalar>(x: &DenseMatrix<T>, support: &RowSupport) -> Result<DenseMatrix<T>> {
    ensure!(
        support.ambient() == x.rows(),
        DimensionMismatch,
        "support over {} rows applied to a matrix with {} rows",
        support.ambient(),
        x.rows()
    );
    let mut out = DenseMatrix::zeros(x.rows(), x.cols());
    for i in support.iter() {
        out.row_mut(i).copy_from_slice(x.row(i));
    }
    Ok(out)
}

pub fn support_union(a: &RowSupport, b: &RowSupport) -> Result<RowSupport> {
    ensure!(
        a.ambient == b.ambient,
        DimensionMismatch,
        "supports over {} and {} rows",
        a.ambient,
        b.ambient
    );
    let mut indices = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a.indices[i].cmp(&b.indices[j]) {
            Ordering::Less => {
                indices.push(a.indices[i]);
                i += 1;
            }
            Ordering::Greater => {
                indices.push(b.indices[j]);
                j += 1;
            }
            Ordering::Equal => {
                indices.push(a.indices[i]);
                i += 1;
                j += 1;
            }
        }
    }
    indices.extend_from_slice(&a.indices[i..]);
    indices.extend_from_slice(&b.indices[j..]);
    Ok(RowSupport {
        indices,
        ambient: a.ambient,
    })
}

/// Rows whose Euclidean norm exceeds `tol`. With `tol = 0` its size is the
/// row sparsity `‖X‖_{r,0}`.
pub fn row_support<T: Scalar>(x: &DenseMatrix<T>, tol: T) -> RowSupport {
    let indices = row_norms(x)
        .into_iter()
        .enumerate()
        .filter(|&(_, r)| r > tol)
        .map(|(i, _)| i)
        .collect();
    RowSupport {
        indices,
        ambient: x.rows(),
    }
}
