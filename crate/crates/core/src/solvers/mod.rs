//! Stochastic greedy solvers for the row-sparse MMV problem
//!
//! ```text
//! minimize F(X)  subject to  ‖X‖_{r,0} ≤ k
//! ```
//!
//! Every solver starts from `X⁰ = 0`, draws one batch of components per
//! iteration and stops once `‖X^{t+1} − X^t‖_F / ‖X^t‖_F < tol` or after
//! `max_iter` iterations. Single-vector StoIHT/StoGradMP are the `L = 1`
//! cases of [`mstoiht`] and [`mstogradmp`].

mod concat;
mod driver;
mod gradmp;
mod iht;

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};
use crate::linalg::DenseMatrix;
use crate::objective::{batch_partition, BatchPlan, MmvObjective};
use crate::rng::IndexSampler;
use crate::Scalar;

pub use concat::{cstogradmp, cstoiht};
pub use gradmp::mstogradmp;
pub use iht::mstoiht;

/// Abort when `F(X^t)` exceeds this multiple of `F(0)`.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

/// Distribution used to pick a batch each iteration.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Probabilities {
    #[default]
    Uniform,
    /// One probability per batch; must sum to one.
    Custom(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct SolverConfig<T> {
    /// Row sparsity `k`.
    pub k: usize,
    /// Step size `γ` (only used by the IHT family).
    pub gamma: T,
    pub batch_size: usize,
    pub probabilities: Probabilities,
    pub max_iter: usize,
    /// Relative iterate-change tolerance `ε`.
    pub tol: T,
    pub seed: u64,
    /// Selects the random substreams; independent trials use distinct values.
    pub trial: u64,
    /// When present, each trace record carries the relative error to it.
    pub ground_truth: Option<DenseMatrix<T>>,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            gamma: T::one(),
            batch_size: 1,
            probabilities: Probabilities::Uniform,
            max_iter: 1000,
            tol: T::from_f64_lossy(1e-6),
            seed: 0,
            trial: 0,
            ground_truth: None,
        }
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_batch_size(mut self, b: usize) -> Self {
        self.batch_size = b;
        self
    }

    pub fn with_max_iter(mut self, t: usize) -> Self {
        self.max_iter = t;
        self
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trial(mut self, trial: u64) -> Self {
        self.trial = trial;
        self
    }

    pub fn with_probabilities(mut self, p: Probabilities) -> Self {
        self.probabilities = p;
        self
    }

    pub fn with_ground_truth(mut self, x: DenseMatrix<T>) -> Self {
        self.ground_truth = Some(x);
        self
    }

    /// Checks the configuration against the objective; `matching` adds the
    /// `2k ≤ n` requirement of the GradMP family.
    pub(crate) fn validate(&self, obj: &MmvObjective<T>, matching: bool) -> Result<()> {
        let n = obj.signal_dim();
        ensure!(self.k >= 1, InvalidArgument, "sparsity k must be at least 1");
        ensure!(self.k <= n, InvalidArgument, "sparsity k = {} exceeds n = {n}", self.k);
        if matching {
            ensure!(
                2 * self.k <= n,
                InvalidArgument,
                "gradient matching needs 2k <= n (k = {}, n = {n})",
                self.k
            );
        }
        ensure!(self.max_iter >= 1, InvalidArgument, "max_iter must be at least 1");
        ensure!(
            self.tol >= T::zero() && !self.tol.is_nan(),
            InvalidArgument,
            "tolerance must be nonnegative"
        );
        ensure!(
            self.gamma > T::zero() && self.gamma.is_finite(),
            InvalidArgument,
            "step size must be positive"
        );
        if let Some(gt) = &self.ground_truth {
            ensure!(
                gt.shape() == (n, obj.signal_count()),
                DimensionMismatch,
                "ground truth is {}x{}, expected {}x{}",
                gt.rows(),
                gt.cols(),
                n,
                obj.signal_count()
            );
        }
        Ok(())
    }

    /// Batch plan and the sampler over its batches.
    pub(crate) fn batching(&self, components: usize) -> Result<(BatchPlan, IndexSampler)> {
        let plan = batch_partition(components, self.batch_size, None)?;
        let sampler = match &self.probabilities {
            Probabilities::Uniform => IndexSampler::uniform(plan.len())?,
            Probabilities::Custom(p) => {
                ensure!(
                    p.len() == plan.len(),
                    InvalidArgument,
                    "{} probabilities for {} batches",
                    p.len(),
                    plan.len()
                );
                IndexSampler::new(p)?
            }
        };
        Ok((plan, sampler))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxIter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord<T> {
    /// `t` for the iterate `X^t`, starting at 1.
    pub iter: usize,
    /// Cumulative compute time up to and including this iteration.
    pub elapsed_s: f64,
    /// `F(X^t)`.
    pub objective: T,
    /// `‖X^t − X^{t−1}‖_F / ‖X^{t−1}‖_F`.
    pub rel_change: T,
    /// `‖X^t − X*‖_F / ‖X*‖_F` when ground truth was supplied.
    pub rel_err: Option<T>,
    /// Number of nonzero rows of `X^t`.
    pub row_sparsity: usize,
    /// Largest number of nonzeros in a single column of `X^t`.
    pub max_column_sparsity: usize,
    /// `|Γ ∪ Λ|` for the matching-pursuit solvers (largest over columns for
    /// the concatenated one).
    pub candidate_len: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SolveTrace<T> {
    pub records: Vec<TraceRecord<T>>,
    pub solution: DenseMatrix<T>,
    pub stop_reason: StopReason,
    /// `F(0)`.
    pub initial_objective: T,
}

impl<T: Scalar> SolveTrace<T> {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_record(&self) -> Option<&TraceRecord<T>> {
        self.records.last()
    }

    pub fn elapsed_s(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.elapsed_s)
    }

    /// First iteration whose relative error is at most `threshold`.
    pub fn first_iter_below(&self, threshold: T) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.rel_err.is_some_and(|e| e <= threshold))
            .map(|r| r.iter)
    }
}

/// The four solver families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    MStoIht,
    CStoIht,
    MStoGradMp,
    CStoGradMp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::MStoIht,
        Algorithm::CStoIht,
        Algorithm::MStoGradMp,
        Algorithm::CStoGradMp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MStoIht => "mstoiht",
            Algorithm::CStoIht => "cstoiht",
            Algorithm::MStoGradMp => "mstogradmp",
            Algorithm::CStoGradMp => "cstogradmp",
        }
    }

    pub fn is_matching_pursuit(self) -> bool {
        matches!(self, Algorithm::MStoGradMp | Algorithm::CStoGradMp)
    }

    pub fn solve<T: Scalar>(self, obj: &MmvObjective<T>, cfg: &SolverConfig<T>) -> Result<SolveTrace<T>> {
        match self {
            Algorithm::MStoIht => mstoiht(obj, cfg),
            Algorithm::CStoIht => cstoiht(obj, cfg),
            Algorithm::MStoGradMp => mstogradmp(obj, cfg),
            Algorithm::CStoGradMp => cstogradmp(obj, cfg),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm {s:?}")))
    }
}

/// `‖next − prev‖_F / ‖prev‖_F`, with `0/0 = 0` and `x/0 = ∞`.
pub(crate) fn relative_change<T: Scalar>(change_sq: T, prev_norm_sq: T) -> T {
    if prev_norm_sq.is_zero() {
        if change_sq.is_zero() {
            T::zero()
        } else {
            T::infinity()
        }
    } else {
        (change_sq / prev_norm_sq).sqrt()
    }
}
