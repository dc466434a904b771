//! The least-squares MMV objective `F(X) = (1/2m)·‖Y − A·X‖_F²`, split into
//! one component per sensing row:
//!
//! ```text
//! f_i(X) = ½‖Y_i − A_i·X‖₂²,    F(X) = (1/m)·Σ_i f_i(X)
//! ```
//!
//! A batch `τ` of components has gradient `(1/|τ|)·A_τᵀ(A_τ·X − Y_τ)`.

use crate::error::{ensure, Result};
use crate::linalg::{axpy, dot, least_squares_solve, DenseMatrix};
use crate::rng::RngStream;
use crate::sparsity::RowSupport;
use crate::Scalar;

#[derive(Clone, Debug)]
pub struct MmvObjective<T> {
    a: DenseMatrix<T>,
    y: DenseMatrix<T>,
}

impl<T: Scalar> MmvObjective<T> {
    pub fn new(a: DenseMatrix<T>, y: DenseMatrix<T>) -> Result<Self> {
        ensure!(
            a.rows() == y.rows(),
            DimensionMismatch,
            "A has {} rows but Y has {}",
            a.rows(),
            y.rows()
        );
        ensure!(a.rows() > 0 && a.cols() > 0, InvalidArgument, "empty sensing matrix");
        Ok(Self { a, y })
    }

    pub fn sensing(&self) -> &DenseMatrix<T> {
        &self.a
    }

    pub fn measurements(&self) -> &DenseMatrix<T> {
        &self.y
    }

    /// Number of measurements `m`.
    pub fn measurement_count(&self) -> usize {
        self.a.rows()
    }

    /// Signal dimension `n`.
    pub fn signal_dim(&self) -> usize {
        self.a.cols()
    }

    /// Number of measurement vectors `L`.
    pub fn signal_count(&self) -> usize {
        self.y.cols()
    }

    /// Number of component functions `M`; one per sensing row.
    pub fn components(&self) -> usize {
        self.a.rows()
    }

    /// The single-vector problem for column `j` of `Y`.
    pub fn column_objective(&self, j: usize) -> Result<Self> {
        ensure!(j < self.signal_count(), InvalidArgument, "column {j} out of range");
        Self::new(self.a.clone(), DenseMatrix::from_column(&self.y.column(j)))
    }

    fn check_iterate(&self, x: &DenseMatrix<T>) -> Result<()> {
        ensure!(
            x.rows() == self.signal_dim() && x.cols() == self.signal_count(),
            DimensionMismatch,
            "iterate is {}x{}, expected {}x{}",
            x.rows(),
            x.cols(),
            self.signal_dim(),
            self.signal_count()
        );
        Ok(())
    }

    /// `Y_i − A_i·X`, visiting only the `active` rows of `X` when given.
    fn residual_row(&self, i: usize, x: &DenseMatrix<T>, active: Option<&[usize]>, out: &mut [T]) {
        out.copy_from_slice(self.y.row(i));
        let a_row = self.a.row(i);
        match active {
            Some(rows) => {
                for &p in rows {
                    axpy(-a_row[p], x.row(p), out);
                }
            }
            None => {
                for (p, &a) in a_row.iter().enumerate() {
                    if !a.is_zero() {
                        axpy(-a, x.row(p), out);
                    }
                }
            }
        }
    }

    /// `F(X) = (1/2m)·‖Y − A·X‖_F²`.
    pub fn eval_f(&self, x: &DenseMatrix<T>) -> Result<T> {
        self.check_iterate(x)?;
        Ok(self.value_unchecked(x, None))
    }

    pub(crate) fn value_unchecked(&self, x: &DenseMatrix<T>, active: Option<&[usize]>) -> T {
        let mut r = vec![T::zero(); self.signal_count()];
        let mut total = T::zero();
        for i in 0..self.components() {
            self.residual_row(i, x, active, &mut r);
            total += dot(&r, &r);
        }
        total / (T::from_usize_lossy(2 * self.components()))
    }

    /// `f_i(X) = ½‖Y_i − A_i·X‖₂²`.
    pub fn component_value(&self, i: usize, x: &DenseMatrix<T>) -> Result<T> {
        self.check_iterate(x)?;
        ensure!(i < self.components(), InvalidArgument, "component {i} out of range");
        let mut r = vec![T::zero(); self.signal_count()];
        self.residual_row(i, x, None, &mut r);
        Ok(dot(&r, &r) / (T::one() + T::one()))
    }

    /// Exact gradient `(1/m)·Aᵀ(A·X − Y)` of [`eval_f`](Self::eval_f).
    pub fn gradient(&self, x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let all: Vec<usize> = (0..self.components()).collect();
        self.grad_component(&all, x)
    }

    /// `(1/|τ|)·A_τᵀ(A_τ·X − Y_τ)`, the gradient of the mean of the components in `batch`.
    pub fn grad_component(&self, batch: &[usize], x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check_iterate(x)?;
        ensure!(!batch.is_empty(), InvalidArgument, "empty component batch");
        ensure!(
            batch.iter().all(|&i| i < self.components()),
            InvalidArgument,
            "component index out of range (M = {})",
            self.components()
        );
        let mut out = DenseMatrix::zeros(self.signal_dim(), self.signal_count());
        self.grad_into(batch, x, None, &mut out);
        Ok(out)
    }

    /// Unchecked batch gradient written into `out`; `active` lists the
    /// possibly-nonzero rows of `x`.
    pub(crate) fn grad_into(
        &self,
        batch: &[usize],
        x: &DenseMatrix<T>,
        active: Option<&[usize]>,
        out: &mut DenseMatrix<T>,
    ) {
        out.as_mut_slice().iter_mut().for_each(|v| *v = T::zero());
        let inv = T::one() / T::from_usize_lossy(batch.len());
        let mut r = vec![T::zero(); self.signal_count()];
        for &i in batch {
            self.residual_row(i, x, active, &mut r);
            // residual_row gives Y_i − A_i X; the gradient uses A_i X − Y_i.
            for (p, &a) in self.a.row(i).iter().enumerate() {
                if !a.is_zero() {
                    axpy(-a * inv, &r, out.row_mut(p));
                }
            }
        }
    }

    /// Gradient of `g_{i,j}(x) = ½(Y_{ij} − A_i·x)²`, i.e. `A_iᵀ(A_i·x − Y_{ij})`.
    pub fn grad_column_component(&self, i: usize, j: usize, x: &[T]) -> Result<Vec<T>> {
        ensure!(i < self.components(), InvalidArgument, "component {i} out of range");
        ensure!(j < self.signal_count(), InvalidArgument, "column {j} out of range");
        ensure!(
            x.len() == self.signal_dim(),
            DimensionMismatch,
            "vector of length {} for signal dimension {}",
            x.len(),
            self.signal_dim()
        );
        let a_row = self.a.row(i);
        let r = dot(a_row, x) - self.y[(i, j)];
        Ok(a_row.iter().map(|&a| a * r).collect())
    }

    /// Minimizer of `F` over matrices whose nonzero rows lie in `support`:
    /// the least-squares solve on the selected columns of `A`, scattered back.
    pub fn restricted_argmin(&self, support: &RowSupport) -> Result<DenseMatrix<T>> {
        ensure!(
            !support.is_empty(),
            InvalidArgument,
            "restricted solve on an empty support"
        );
        ensure!(
            support.ambient() == self.signal_dim(),
            DimensionMismatch,
            "support over {} rows, signal dimension {}",
            support.ambient(),
            self.signal_dim()
        );
        let sub = self.a.select_columns(support.indices());
        let coeffs = least_squares_solve(&sub, &self.y)?;
        let mut out = DenseMatrix::zeros(self.signal_dim(), self.signal_count());
        for (r, i) in support.iter().enumerate() {
            out.row_mut(i).copy_from_slice(coeffs.row(r));
        }
        Ok(out)
    }
}

/// Partition of the component indices `0..M` into batches of size `b`
/// (the last one possibly smaller).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchPlan {
    batch_size: usize,
    batches: Vec<Vec<usize>>,
}

impl BatchPlan {
    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn batches(&self) -> &[Vec<usize>] {
        &self.batches
    }

    /// Number of batches `d = ⌈M/b⌉`.
    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    pub fn batch(&self, i: usize) -> &[usize] {
        &self.batches[i]
    }
}

/// Splits `0..components` into contiguous batches of `batch_size`, after an
/// optional shuffle.
pub fn batch_partition(components: usize, batch_size: usize, rng: Option<&mut RngStream>) -> Result<BatchPlan> {
    ensure!(
        batch_size >= 1 && batch_size <= components,
        InvalidArgument,
        "batch size {batch_size} outside 1..={components}"
    );
    let mut order: Vec<usize> = (0..components).collect();
    if let Some(rng) = rng {
        rng.shuffle(&mut order);
    }
    let batches = order.chunks(batch_size).map(|c| c.to_vec()).collect();
    Ok(BatchPlan { batch_size, batches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn value_cases() {
        let a = DenseMatrix::identity(2);
        let obj = MmvObjective::new(a.clone(), DenseMatrix::zeros(2, 2)).unwrap();
        assert_eq!(obj.eval_f(&DenseMatrix::identity(2)).unwrap(), 0.5);
        let y = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let obj = MmvObjective::new(a, y.clone()).unwrap();
        assert_eq!(obj.eval_f(&y).unwrap(), 0.0);
        assert!(obj.eval_f(&DenseMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn gradient_hand_cases() {
        let a = m(&[&[1.0, 0.0], &[0.5, 2.0]]);
        let y = m(&[&[0.0, 0.0], &[1.0, -1.0]]);
        let obj = MmvObjective::new(a.clone(), y.clone()).unwrap();
        let x = m(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(obj.grad_component(&[0], &x).unwrap(), x);

        // At X = 0 the single-row gradient is −A_iᵀ Y_i.
        let g = obj.grad_component(&[1], &DenseMatrix::zeros(2, 2)).unwrap();
        assert_eq!(g, m(&[&[-0.5, 0.5], &[-2.0, 2.0]]));
    }

    #[test]
    fn gradient_rejects_bad_batches() {
        let obj = MmvObjective::new(DenseMatrix::<f64>::identity(2), DenseMatrix::zeros(2, 1)).unwrap();
        let x = DenseMatrix::zeros(2, 1);
        assert!(obj.grad_component(&[], &x).is_err());
        assert!(obj.grad_component(&[2], &x).is_err());
        assert!(obj.grad_column_component(2, 0, &[0.0, 0.0]).is_err());
        assert!(obj.grad_column_component(0, 1, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn column_gradient_zero_case() {
        let obj = MmvObjective::new(m(&[&[1.0, 2.0]]), m(&[&[0.0, 3.0]])).unwrap();
        assert_eq!(obj.grad_column_component(0, 0, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn restricted_argmin_identity() {
        let y = m(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        let obj = MmvObjective::new(DenseMatrix::identity(3), y.clone()).unwrap();
        let b = obj.restricted_argmin(&RowSupport::full(3)).unwrap();
        assert!(b.sub(&y).unwrap().frobenius_norm() < 1e-14);
        assert!(obj.restricted_argmin(&RowSupport::empty(3)).is_err());
        let b = obj.restricted_argmin(&RowSupport::new(vec![1], 3).unwrap()).unwrap();
        assert_eq!(b.row(0), &[0.0, 0.0]);
        assert_eq!(b.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn partition_cases() {
        let p = batch_partition(4, 1, None).unwrap();
        assert_eq!(p.batches(), &[vec![0], vec![1], vec![2], vec![3]]);
        let p = batch_partition(4, 4, None).unwrap();
        assert_eq!(p.batches(), &[vec![0, 1, 2, 3]]);
        let p = batch_partition(5, 2, None).unwrap();
        assert_eq!(p.batches(), &[vec![0, 1], vec![2, 3], vec![4]]);
        assert!(batch_partition(4, 0, None).is_err());
        assert!(batch_partition(4, 5, None).is_err());
    }

    #[test]
    fn shuffled_partition_is_still_a_partition() {
        let mut rng = RngStream::new(3, 1);
        let p = batch_partition(11, 3, Some(&mut rng)).unwrap();
        assert_eq!(p.len(), 4);
        let mut all: Vec<usize> = p.batches().concat();
        all.sort_unstable();
        assert!(all.into_iter().eq(0..11));
    }
}
