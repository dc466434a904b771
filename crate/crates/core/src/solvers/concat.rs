use super::driver::{run, Snapshot};
use super::gradmp::GradMpStep;
use super::iht::IhtStep;
use super::{relative_change, SolveTrace, SolverConfig, StopReason, TraceRecord};
use crate::error::Result;
use crate::linalg::DenseMatrix;
use crate::objective::MmvObjective;
use crate::rng::RngStream;
use crate::Scalar;

/// StoIHT applied to every column of `Y` separately, results concatenated.
///
/// Column `j` uses its own random substream. Trace record `t` describes the
/// matrix whose columns are each after `t` inner iterations (a column that
/// stopped early keeps its final value), and its time is the sum of the
/// per-column compute times up to that point.
pub fn cstoiht<T: Scalar>(obj: &MmvObjective<T>, cfg: &SolverConfig<T>) -> Result<SolveTrace<T>> {
    cfg.validate(obj, false)?;
    concatenate(obj, cfg, false)
}

/// StoGradMP applied to every column of `Y` separately, results concatenated.
/// Trace conventions as for [`cstoiht`].
pub fn cstogradmp<T: Scalar>(obj: &MmvObjective<T>, cfg: &SolverConfig<T>) -> Result<SolveTrace<T>> {
    cfg.validate(obj, true)?;
    concatenate(obj, cfg, true)
}

struct ColumnState<T> {
    elapsed_s: f64,
    objective: T,
    norm_sq: T,
    change_sq: T,
    err_sq: T,
    nonzeros: Vec<usize>,
    candidate_len: Option<usize>,
}

struct ColumnHistory<T> {
    states: Vec<ColumnState<T>>,
    solution: Vec<T>,
    stop_reason: StopReason,
    initial_objective: T,
}

impl<T: Scalar> ColumnHistory<T> {
    /// State after `t ≥ 1` inner iterations, frozen once the column stopped.
    fn at(&self, t: usize) -> &ColumnState<T> {
        &self.states[t.min(self.states.len()) - 1]
    }
}

fn concatenate<T: Scalar>(obj: &MmvObjective<T>, cfg: &SolverConfig<T>, matching: bool) -> Result<SolveTrace<T>> {
    let n = obj.signal_dim();
    let columns = obj.signal_count();
    let mut histories = Vec::with_capacity(columns);

    for j in 0..columns {
        let col_obj = obj.column_objective(j)?;
        let mut col_cfg = cfg.clone();
        col_cfg.ground_truth = None;
        let truth = cfg.ground_truth.as_ref().map(|x| x.column(j));
        let mut rng = RngStream::derive(cfg.seed, &[cfg.trial, j as u64]);
        let mut states = Vec::new();
        let mut elapsed = 0.0;
        let mut observe = |snap: &Snapshot<'_, T>| {
            elapsed += snap.step_s;
            let col = snap.next.as_slice();
            let err_sq = truth
                .as_ref()
                .map_or(T::zero(), |t| col.iter().zip(t).map(|(&a, &b)| (a - b) * (a - b)).sum());
            states.push(ColumnState {
                elapsed_s: elapsed,
                objective: snap.objective,
                norm_sq: col.iter().map(|&v| v * v).sum(),
                change_sq: snap.change_sq,
                err_sq,
                nonzeros: (0..n).filter(|&i| !col[i].is_zero()).collect(),
                candidate_len: snap.candidate_len,
            });
        };
        let outcome = if matching {
            let mut stepper = GradMpStep::new(&col_obj, &col_cfg)?;
            run(&col_obj, &col_cfg, &mut stepper, &mut rng, &mut observe)?
        } else {
            let mut stepper = IhtStep::new(&col_obj, &col_cfg)?;
            run(&col_obj, &col_cfg, &mut stepper, &mut rng, &mut observe)?
        };
        histories.push(ColumnHistory {
            states,
            solution: outcome.solution.into_vec(),
            stop_reason: outcome.stop_reason,
            initial_objective: outcome.initial_objective,
        });
    }

    let truth_norm = cfg.ground_truth.as_ref().map(|x| x.frobenius_norm());
    let longest = histories.iter().map(|h| h.states.len()).max().unwrap_or(0);
    let mut records = Vec::with_capacity(longest);
    let mut in_union = vec![false; n];
    for t in 1..=longest {
        let mut elapsed_s = 0.0;
        let mut objective = T::zero();
        let mut change_sq = T::zero();
        let mut prev_norm_sq = T::zero();
        let mut err_sq = T::zero();
        let mut max_column_sparsity = 0;
        let mut candidate_len: Option<usize> = None;
        in_union.iter_mut().for_each(|b| *b = false);
        for h in &histories {
            let s = h.at(t);
            elapsed_s += s.elapsed_s;
            objective += s.objective;
            err_sq += s.err_sq;
            if t <= h.states.len() {
                change_sq += s.change_sq;
            }
            if t > 1 {
                prev_norm_sq += h.at(t - 1).norm_sq;
            }
            max_column_sparsity = max_column_sparsity.max(s.nonzeros.len());
            candidate_len = match (candidate_len, s.candidate_len) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            for &i in &s.nonzeros {
                in_union[i] = true;
            }
        }
        records.push(TraceRecord {
            iter: t,
            elapsed_s,
            objective,
            rel_change: relative_change(change_sq, prev_norm_sq),
            rel_err: truth_norm.map(|norm| err_sq.sqrt() / norm),
            row_sparsity: in_union.iter().filter(|&&b| b).count(),
            max_column_sparsity,
            candidate_len,
        });
    }

    let mut solution = DenseMatrix::zeros(n, columns);
    for (j, h) in histories.iter().enumerate() {
        solution.set_column(j, &h.solution);
    }
    let stop_reason = if histories.iter().all(|h| h.stop_reason == StopReason::Tolerance) {
        StopReason::Tolerance
    } else {
        StopReason::MaxIter
    };
    Ok(SolveTrace {
        records,
        solution,
        stop_reason,
        initial_objective: histories.iter().map(|h| h.initial_objective).sum(),
    })
}
