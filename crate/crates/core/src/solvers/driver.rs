use std::time::Instant;

use super::{relative_change, SolveTrace, SolverConfig, StopReason, TraceRecord, DIVERGENCE_FACTOR};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::objective::MmvObjective;
use crate::rng::RngStream;
use crate::sparsity::row_support;
use crate::Scalar;

/// One iteration of a solver: maps `X^t` to `X^{t+1}`.
pub(crate) trait Step<T> {
    fn step(&mut self, x: &DenseMatrix<T>, rng: &mut RngStream) -> Result<DenseMatrix<T>>;

    /// Rows that may be nonzero in the iterate last returned.
    fn active_rows(&self) -> &[usize];

    fn candidate_len(&self) -> Option<usize> {
        None
    }
}

pub(crate) struct Snapshot<'a, T> {
    pub iter: usize,
    pub step_s: f64,
    pub next: &'a DenseMatrix<T>,
    pub objective: T,
    pub rel_change: T,
    pub change_sq: T,
    pub candidate_len: Option<usize>,
}

pub(crate) struct RunOutcome<T> {
    pub solution: DenseMatrix<T>,
    pub stop_reason: StopReason,
    pub initial_objective: T,
}

/// Iterates from `X = 0` until the tolerance or the iteration cap is hit.
/// Only the step and the stopping test are timed.
pub(crate) fn run<T: Scalar, S: Step<T>>(
    obj: &MmvObjective<T>,
    cfg: &SolverConfig<T>,
    stepper: &mut S,
    rng: &mut RngStream,
    mut observe: impl FnMut(&Snapshot<'_, T>),
) -> Result<RunOutcome<T>> {
    let mut x = DenseMatrix::zeros(obj.signal_dim(), obj.signal_count());
    let initial_objective = obj.value_unchecked(&x, Some(&[]));
    let limit = initial_objective * T::from_f64_lossy(DIVERGENCE_FACTOR);
    let mut prev_norm_sq = T::zero();

    for iter in 1..=cfg.max_iter {
        let start = Instant::now();
        let next = stepper.step(&x, rng)?;
        let change_sq = next
            .as_slice()
            .iter()
            .zip(x.as_slice())
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
        let rel_change = relative_change(change_sq, prev_norm_sq);
        let converged = rel_change < cfg.tol;
        let step_s = start.elapsed().as_secs_f64();

        if !next.is_finite() {
            return Err(Error::Divergence {
                iteration: iter,
                reason: "non-finite iterate (step size too large?)".into(),
            });
        }
        let objective = obj.value_unchecked(&next, Some(stepper.active_rows()));
        if initial_objective > T::zero() && objective > limit {
            return Err(Error::Divergence {
                iteration: iter,
                reason: format!("objective {objective} exceeds {DIVERGENCE_FACTOR:e} x F(0) = {initial_objective}"),
            });
        }
        observe(&Snapshot {
            iter,
            step_s,
            next: &next,
            objective,
            rel_change,
            change_sq,
            candidate_len: stepper.candidate_len(),
        });
        prev_norm_sq = next.as_slice().iter().map(|&v| v * v).sum();
        x = next;
        if converged {
            return Ok(RunOutcome {
                solution: x,
                stop_reason: StopReason::Tolerance,
                initial_objective,
            });
        }
    }
    Ok(RunOutcome {
        solution: x,
        stop_reason: StopReason::MaxIter,
        initial_objective,
    })
}

/// Runs a whole-matrix solver and records one trace row per iteration.
pub(crate) fn run_mmv<T: Scalar, S: Step<T>>(
    obj: &MmvObjective<T>,
    cfg: &SolverConfig<T>,
    stepper: &mut S,
) -> Result<SolveTrace<T>> {
    // Column-0 substream, so L = 1 reproduces the concatenated solvers exactly.
    let mut rng = RngStream::derive(cfg.seed, &[cfg.trial, 0]);
    let truth = cfg.ground_truth.as_ref().map(|x| (x, x.frobenius_norm()));
    let mut records = Vec::with_capacity(cfg.max_iter.min(4096));
    let mut elapsed = 0.0;
    let outcome = run(obj, cfg, stepper, &mut rng, |snap| {
        elapsed += snap.step_s;
        let rel_err = truth.map(|(x, norm)| relative_error(snap.next, x, norm));
        records.push(TraceRecord {
            iter: snap.iter,
            elapsed_s: elapsed,
            objective: snap.objective,
            rel_change: snap.rel_change,
            rel_err,
            row_sparsity: row_support(snap.next, T::zero()).len(),
            max_column_sparsity: max_column_nonzeros(snap.next),
            candidate_len: snap.candidate_len,
        });
    })?;
    Ok(SolveTrace {
        records,
        solution: outcome.solution,
        stop_reason: outcome.stop_reason,
        initial_objective: outcome.initial_objective,
    })
}

pub(crate) fn relative_error<T: Scalar>(x: &DenseMatrix<T>, truth: &DenseMatrix<T>, truth_norm: T) -> T {
    let diff_sq: T = x
        .as_slice()
        .iter()
        .zip(truth.as_slice())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();
    diff_sq.sqrt() / truth_norm
}

pub(crate) fn max_column_nonzeros<T: Scalar>(x: &DenseMatrix<T>) -> usize {
    (0..x.cols())
        .map(|j| (0..x.rows()).filter(|&i| !x[(i, j)].is_zero()).count())
        .max()
        .unwrap_or(0)
}
