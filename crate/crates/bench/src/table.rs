//! Per-iteration trace tables and their CSV form.

use std::io::Write;

use mmv_core::Algorithm;
use serde::Serialize;

use crate::error::Result;

/// Column order of every trace CSV.
pub const CSV_HEADER: [&str; 6] = ["trial", "algo", "iter", "time_s", "rel_err", "objective"];

/// One iteration of one trial. Iteration 0 is the zero initial guess.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub trial: u64,
    pub iter: usize,
    /// `None` when wall-clock timing was disabled.
    pub time_s: Option<f64>,
    pub rel_err: f64,
    pub objective: f64,
}

/// Cross-trial statistics at one iteration. Trials that stopped earlier
/// contribute their final values.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub iter: usize,
    pub mean_rel_err: f64,
    pub median_rel_err: f64,
    pub mean_objective: f64,
    pub median_objective: f64,
    pub mean_time_s: Option<f64>,
    pub median_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialFailure {
    pub trial: u64,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct TraceTable {
    pub algo: Algorithm,
    /// Sorted by `(trial, iter)`.
    pub rows: Vec<TraceRow>,
    pub failures: Vec<TrialFailure>,
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    trial: String,
    algo: &'a str,
    iter: usize,
    time_s: Option<f64>,
    rel_err: f64,
    objective: f64,
}

impl TraceTable {
    pub fn trial_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self.rows.iter().map(|r| r.trial).collect();
        ids.dedup();
        ids
    }

    pub fn trial_rows(&self, trial: u64) -> &[TraceRow] {
        let start = self.rows.partition_point(|r| r.trial < trial);
        let end = self.rows.partition_point(|r| r.trial <= trial);
        &self.rows[start..end]
    }

    /// Last row of every successful trial.
    pub fn final_rows(&self) -> Vec<&TraceRow> {
        self.trial_ids()
            .into_iter()
            .filter_map(|t| self.trial_rows(t).last())
            .collect()
    }

    /// First iteration at which each successful trial's relative error is at
    /// most `threshold`, `None` for trials that never get there.
    pub fn first_iter_below(&self, threshold: f64) -> Vec<Option<usize>> {
        self.trial_ids()
            .into_iter()
            .map(|t| {
                self.trial_rows(t)
                    .iter()
                    .find(|r| r.rel_err <= threshold)
                    .map(|r| r.iter)
            })
            .collect()
    }

    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let trials: Vec<&[TraceRow]> = self.trial_ids().into_iter().map(|t| self.trial_rows(t)).collect();
        let longest = trials.iter().map(|rows| rows.len()).max().unwrap_or(0);
        (0..longest)
            .map(|it| {
                let at: Vec<&TraceRow> = trials.iter().map(|rows| &rows[it.min(rows.len() - 1)]).collect();
                let rel_err: Vec<f64> = at.iter().map(|r| r.rel_err).collect();
                let objective: Vec<f64> = at.iter().map(|r| r.objective).collect();
                let time: Option<Vec<f64>> = at.iter().map(|r| r.time_s).collect();
                AggregateRow {
                    iter: it,
                    mean_rel_err: mean(&rel_err),
                    median_rel_err: median(&rel_err),
                    mean_objective: mean(&objective),
                    median_objective: median(&objective),
                    mean_time_s: time.as_deref().map(mean),
                    median_time_s: time.as_deref().map(median),
                }
            })
            .collect()
    }

    /// Per-trial rows followed by the aggregate curves, whose `trial` field is
    /// `mean` or `median`. Floats use the shortest round-trip form; an empty
    /// `time_s` means timing was off.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        out.write_record(CSV_HEADER)?;
        let algo = self.algo.name();
        for r in &self.rows {
            out.serialize(CsvRecord {
                trial: r.trial.to_string(),
                algo,
                iter: r.iter,
                time_s: r.time_s,
                rel_err: r.rel_err,
                objective: r.objective,
            })?;
        }
        let aggregate = self.aggregate();
        for a in &aggregate {
            out.serialize(CsvRecord {
                trial: "mean".into(),
                algo,
                iter: a.iter,
                time_s: a.mean_time_s,
                rel_err: a.mean_rel_err,
                objective: a.mean_objective,
            })?;
        }
        for a in &aggregate {
            out.serialize(CsvRecord {
                trial: "median".into(),
                algo,
                iter: a.iter,
                time_s: a.median_time_s,
                rel_err: a.median_rel_err,
                objective: a.median_objective,
            })?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
