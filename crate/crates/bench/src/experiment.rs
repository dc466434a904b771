//! Repeated-trial experiments.

use std::str::FromStr;

use mmv_core::{Algorithm, Config, Objective, RngStream};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::datagen::{gen_instance, Instance};
use crate::error::{BenchError, Result};
use crate::table::{TraceRow, TraceTable, TrialFailure};

/// Whether trace rows carry wall-clock times. Times differ between runs, so
/// byte-reproducible output needs timing off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Timing {
    #[default]
    Off,
    Wall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub k: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(serialize_with = "algo_ser", deserialize_with = "algo_de")]
    pub algo: Algorithm,
    #[serde(default = "one")]
    pub batch_size: usize,
    #[serde(default = "unit")]
    pub gamma: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Trials run concurrently on this many threads.
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default)]
    pub timing: Timing,
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

fn default_max_iter() -> usize {
    1000
}

fn default_tol() -> f64 {
    1e-6
}

fn algo_ser<S: Serializer>(a: &Algorithm, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(a.name())
}

fn algo_de<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Algorithm, D::Error> {
    let s = String::deserialize(d)?;
    Algorithm::from_str(&s).map_err(serde::de::Error::custom)
}

impl ExperimentSpec {
    pub fn new(algo: Algorithm, n: usize, m: usize, l: usize, k: usize) -> Self {
        Self {
            n,
            m,
            l,
            k,
            noise_sigma: 0.0,
            algo,
            batch_size: 1,
            gamma: 1.0,
            max_iter: default_max_iter(),
            tol: default_tol(),
            trials: 1,
            seed: 0,
            workers: 1,
            timing: Timing::Off,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(BenchError::Spec(msg));
        if self.n == 0 || self.m == 0 || self.l == 0 || self.k == 0 {
            return fail(format!(
                "dimensions must be positive (n={}, m={}, L={}, k={})",
                self.n, self.m, self.l, self.k
            ));
        }
        if self.k > self.n {
            return fail(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return fail(format!("noise_sigma must be nonnegative, got {}", self.noise_sigma));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        if self.batch_size == 0 || self.batch_size > self.m {
            return fail(format!("batch size {} outside 1..={}", self.batch_size, self.m));
        }
        Ok(())
    }

    /// Data of trial `t`, drawn from its own substream so that it does not
    /// depend on how many other trials run.
    pub fn instance(&self, trial: u64) -> Instance {
        let mut rng = RngStream::derive(self.seed, &[trial, u64::MAX]);
        gen_instance(self.n, self.m, self.l, self.k, self.noise_sigma, &mut rng)
    }

    fn solver_config(&self, trial: u64, truth: mmv_core::Matrix) -> Config {
        Config::new(self.k)
            .with_gamma(self.gamma)
            .with_batch_size(self.batch_size)
            .with_max_iter(self.max_iter)
            .with_tol(self.tol)
            .with_seed(self.seed)
            .with_trial(trial)
            .with_ground_truth(truth)
    }
}

fn run_trial(spec: &ExperimentSpec, trial: u64) -> std::result::Result<Vec<TraceRow>, TrialFailure> {
    let fail = |e: mmv_core::Error| TrialFailure {
        trial,
        message: e.to_string(),
    };
    let Instance { a, x, y } = spec.instance(trial);
    let obj = Objective::new(a, y).map_err(fail)?;
    let initial_objective = obj.eval_f(&mmv_core::Matrix::zeros(spec.n, spec.l)).map_err(fail)?;
    let cfg = spec.solver_config(trial, x);
    let trace = spec.algo.solve(&obj, &cfg).map_err(fail)?;
    let timed = spec.timing == Timing::Wall;
    let mut rows = Vec::with_capacity(trace.records.len() + 1);
    rows.push(TraceRow {
        trial,
        iter: 0,
        time_s: timed.then_some(0.0),
        rel_err: 1.0,
        objective: initial_objective,
    });
    rows.extend(trace.records.iter().map(|r| TraceRow {
        trial,
        iter: r.iter,
        time_s: timed.then_some(r.elapsed_s),
        rel_err: r.rel_err.expect("ground truth supplied"),
        objective: r.objective,
    }));
    Ok(rows)
}

/// Runs every trial of `spec`. A failing trial (divergence, numerical
/// breakdown) is recorded in [`TraceTable::failures`] and does not stop the
/// others.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<TraceTable> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| BenchError::Spec(format!("thread pool: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| {
        (0..spec.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(spec, t))
            .collect()
    });

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => rows.extend(r),
            Err(f) => failures.push(f),
        }
    }
    rows.sort_by_key(|r| (r.trial, r.iter));
    Ok(TraceTable {
        algo: spec.algo,
        rows,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_uses_flat_field_names() {
        let mut spec = ExperimentSpec::new(Algorithm::MStoGradMp, 20, 10, 3, 2);
        spec.noise_sigma = 0.02;
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"L\":3"));
        assert!(text.contains("\"algo\":\"mstogradmp\""));
        assert_eq!(ExperimentSpec::from_json(&text).unwrap(), spec);
    }

    #[test]
    fn json_defaults_and_rejections() {
        let spec = ExperimentSpec::from_json(r#"{"n":10,"m":5,"L":2,"k":1,"algo":"cstoiht"}"#).unwrap();
        assert_eq!(spec.trials, 1);
        assert_eq!(spec.timing, Timing::Off);
        assert!(ExperimentSpec::from_json(r#"{"n":10,"m":5,"L":2,"k":1,"algo":"omp"}"#).is_err());
        assert!(ExperimentSpec::from_json(r#"{"n":10,"m":5,"L":2,"k":1,"algo":"cstoiht","x":1}"#).is_err());
        assert!(ExperimentSpec::from_json(r#"{"n":10,"m":5,"L":2,"k":1,"algo":"cstoiht","trials":0}"#).is_err());
    }

    #[test]
    fn single_iteration_table_shape() {
        let mut spec = ExperimentSpec::new(Algorithm::MStoIht, 16, 8, 2, 2);
        spec.max_iter = 1;
        let table = run_experiment(&spec).unwrap();
        let iters: Vec<usize> = table.rows.iter().map(|r| r.iter).collect();
        assert_eq!(iters, vec![0, 1]);
        assert_eq!(table.rows[0].rel_err, 1.0);
    }
}
