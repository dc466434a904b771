//! Experiment harness for the `mmv-core` solvers: synthetic data, repeated
//! trials, trace tables and parameter sweeps.

pub mod datagen;
pub mod error;
pub mod experiment;
pub mod sweep;
pub mod table;

pub use error::{BenchError, Result};
pub use experiment::{run_experiment, ExperimentSpec, Timing};
pub use sweep::{run_sweep, SweepParam};
pub use table::{AggregateRow, TraceRow, TraceTable, TrialFailure, CSV_HEADER};
