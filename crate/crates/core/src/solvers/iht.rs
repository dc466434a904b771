use super::driver::{run_mmv, Step};
use super::{SolveTrace, SolverConfig};
use crate::error::Result;
use crate::linalg::DenseMatrix;
use crate::objective::{BatchPlan, MmvObjective};
use crate::rng::{IndexSampler, RngStream};
use crate::sparsity::{approx_k_rows, project_rows, RowSupport};
use crate::Scalar;

/// Batched stochastic iterative hard thresholding on the whole signal matrix.
///
/// Each iteration draws a batch `τ` with probability `p(τ)` and performs
///
/// ```text
/// B = X − γ/(d·p(τ)) · ∇f_τ(X)      (proxy)
/// Γ = k rows of B with largest norm (identify)
/// X ← P_Γ(B)                        (estimate)
/// ```
///
/// where `d` is the number of batches. With `batch_size = 1` this is MStoIHT;
/// with `L = 1` it is StoIHT.
pub fn mstoiht<T: Scalar>(obj: &MmvObjective<T>, cfg: &SolverConfig<T>) -> Result<SolveTrace<T>> {
    let mut stepper = IhtStep::new(obj, cfg)?;
    run_mmv(obj, cfg, &mut stepper)
}

pub(crate) struct IhtStep<'a, T> {
    obj: &'a MmvObjective<T>,
    plan: BatchPlan,
    sampler: IndexSampler,
    k: usize,
    gamma: T,
    support: RowSupport,
    grad: DenseMatrix<T>,
}

impl<'a, T: Scalar> IhtStep<'a, T> {
    pub(crate) fn new(obj: &'a MmvObjective<T>, cfg: &SolverConfig<T>) -> Result<Self> {
        cfg.validate(obj, false)?;
        let (plan, sampler) = cfg.batching(obj.components())?;
        Ok(Self {
            obj,
            plan,
            sampler,
            k: cfg.k,
            gamma: cfg.gamma,
            support: RowSupport::empty(obj.signal_dim()),
            grad: DenseMatrix::zeros(obj.signal_dim(), obj.signal_count()),
        })
    }
}

impl<T: Scalar> Step<T> for IhtStep<'_, T> {
    fn step(&mut self, x: &DenseMatrix<T>, rng: &mut RngStream) -> Result<DenseMatrix<T>> {
        let b = self.sampler.draw(rng);
        let d = T::from_usize_lossy(self.plan.len());
        let scale = self.gamma / (d * T::from_f64_lossy(self.sampler.probability(b)));
        self.obj
            .grad_into(self.plan.batch(b), x, Some(self.support.indices()), &mut self.grad);
        let mut proxy = x.clone();
        proxy.add_scaled(-scale, &self.grad)?;
        self.support = approx_k_rows(&proxy, self.k)?;
        project_rows(&proxy, &self.support)
    }

    fn active_rows(&self) -> &[usize] {
        self.support.indices()
    }
}
