//! One experiment per value of a swept parameter.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::error::{BenchError, Result};
use crate::experiment::{run_experiment, ExperimentSpec};
use crate::table::TraceTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    /// Row sparsity `k`.
    Sparsity,
    /// Number of signals `L`.
    Signals,
    /// Noise level `σ`.
    Noise,
    /// Batch size `b`.
    Batch,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Sparsity => "sparsity",
            SweepParam::Signals => "signals",
            SweepParam::Noise => "noise",
            SweepParam::Batch => "batch",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(self, base: &ExperimentSpec, value: &str) -> Result<ExperimentSpec> {
        let bad = |e: &dyn std::fmt::Display| BenchError::Spec(format!("{} value {value:?}: {e}", self.name()));
        let mut spec = base.clone();
        match self {
            SweepParam::Noise => spec.noise_sigma = value.parse().map_err(|e| bad(&e))?,
            other => {
                let v: usize = value.parse().map_err(|e| bad(&e))?;
                match other {
                    SweepParam::Sparsity => spec.k = v,
                    SweepParam::Signals => spec.l = v,
                    _ => spec.batch_size = v,
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// `<param>_<value>.csv`.
pub fn sweep_file_name(param: SweepParam, value: &str) -> String {
    format!("{}_{}.csv", param.name(), value.trim())
}

/// Runs `base` once per value and writes each table to
/// `out_dir/<param>_<value>.csv`. All values are validated before any run.
pub fn run_sweep(
    base: &ExperimentSpec,
    param: SweepParam,
    values: &[String],
    out_dir: &Path,
) -> Result<Vec<(PathBuf, TraceTable)>> {
    let specs = values
        .iter()
        .map(|v| param.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(out_dir)?;
    let mut out = Vec::with_capacity(specs.len());
    for (value, spec) in values.iter().zip(&specs) {
        let table = run_experiment(spec)?;
        let path = out_dir.join(sweep_file_name(param, value));
        table.write_csv(BufWriter::new(File::create(&path)?))?;
        out.push((path, table));
    }
    Ok(out)
}
