//! Joint-sparse recovery for multiple measurement vectors (MMV).
//!
//! Given a sensing matrix `A` (m×n) and measurements `Y = A·X* + noise` (m×L),
//! the solvers in this crate recover a matrix `X*` whose nonzero entries are
//! confined to at most `k` rows. Four solver families are provided:
//!
//! * [`solvers::mstoiht`]: stochastic iterative hard thresholding on the whole matrix,
//! * [`solvers::mstogradmp`]: stochastic gradient matching pursuit on the whole matrix,
//! * [`solvers::cstoiht`] and [`solvers::cstogradmp`]: the single-vector variants
//!   applied column by column and concatenated.
//!
//! All numerical code is generic over a [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`, which is what the file formats
//! and the benchmark harness use.

pub mod analysis;
pub mod error;
pub mod io;
pub mod linalg;
pub mod objective;
pub mod rng;
pub mod scalar;
pub mod solvers;
pub mod sparsity;

pub use error::{Error, Result};
pub use linalg::{least_squares_solve, DenseMatrix};
pub use objective::{batch_partition, BatchPlan, MmvObjective};
pub use rng::{draw_index, IndexSampler, RngStream};
pub use scalar::Scalar;
pub use solvers::{
    cstogradmp, cstoiht, mstogradmp, mstoiht, Algorithm, Probabilities, SolveTrace, SolverConfig, StopReason,
    TraceRecord,
};
pub use sparsity::{approx_k_rows, approx_k_vec, project_rows, row_support, support_union, RowSupport};

/// Double precision matrix, the element type of every on-disk format.
pub type Matrix = DenseMatrix<f64>;
/// Least-squares MMV objective over `f64`.
pub type Objective = MmvObjective<f64>;
/// Solver configuration over `f64`.
pub type Config = SolverConfig<f64>;
/// Solver trace over `f64`.
pub type Trace = SolveTrace<f64>;
/// Convergence constants over `f64`.
pub type Constants = analysis::ConvexityConstants<f64>;
