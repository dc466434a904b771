use super::driver::{run_mmv, Step};
use super::{SolveTrace, SolverConfig};
use crate::error::Result;
use crate::linalg::DenseMatrix;
use crate::objective::{BatchPlan, MmvObjective};
use crate::rng::{IndexSampler, RngStream};
use crate::sparsity::{approx_k_rows, project_rows, support_union, RowSupport};
use crate::Scalar;

/// Batched stochastic gradient matching pursuit on the whole signal matrix.
///
/// Each iteration draws a batch `τ` and performs
///
/// ```text
/// R = ∇f_τ(X)
/// Γ = 2k rows of R with largest norm
/// Γ̂ = Γ ∪ Λ
/// B = argmin F over matrices supported on Γ̂
/// Λ = k rows of B with largest norm
/// X ← P_Λ(B)
/// ```
///
/// Requires `2k ≤ n`. Rank-deficient restricted solves (e.g. `|Γ̂| > m`)
/// return the minimum-norm least-squares solution.
pub fn mstogradmp<T: Scalar>(obj: &MmvObjective<T>, cfg: &SolverConfig<T>) -> Result<SolveTrace<T>> {
    let mut stepper = GradMpStep::new(obj, cfg)?;
    run_mmv(obj, cfg, &mut stepper)
}

pub(crate) struct GradMpStep<'a, T> {
    obj: &'a MmvObjective<T>,
    plan: BatchPlan,
    sampler: IndexSampler,
    k: usize,
    support: RowSupport,
    candidate_len: usize,
    grad: DenseMatrix<T>,
}

impl<'a, T: Scalar> GradMpStep<'a, T> {
    pub(crate) fn new(obj: &'a MmvObjective<T>, cfg: &SolverConfig<T>) -> Result<Self> {
        cfg.validate(obj, true)?;
        let (plan, sampler) = cfg.batching(obj.components())?;
        Ok(Self {
            obj,
            plan,
            sampler,
            k: cfg.k,
            support: RowSupport::empty(obj.signal_dim()),
            candidate_len: 0,
            grad: DenseMatrix::zeros(obj.signal_dim(), obj.signal_count()),
        })
    }
}

impl<T: Scalar> Step<T> for GradMpStep<'_, T> {
    fn step(&mut self, x: &DenseMatrix<T>, rng: &mut RngStream) -> Result<DenseMatrix<T>> {
        let b = self.sampler.draw(rng);
        self.obj
            .grad_into(self.plan.batch(b), x, Some(self.support.indices()), &mut self.grad);
        let matched = approx_k_rows(&self.grad, 2 * self.k)?;
        let candidates = support_union(&matched, &self.support)?;
        self.candidate_len = candidates.len();
        let estimate = self.obj.restricted_argmin(&candidates)?;
        self.support = approx_k_rows(&estimate, self.k)?;
        project_rows(&estimate, &self.support)
    }

    fn active_rows(&self) -> &[usize] {
        self.support.indices()
    }

    fn candidate_len(&self) -> Option<usize> {
        Some(self.candidate_len)
    }
}
