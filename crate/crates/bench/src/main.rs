use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmv_bench::experiment::{ExperimentSpec, Timing};
use mmv_bench::sweep::{run_sweep, SweepParam};
use mmv_bench::{run_experiment, BenchError, Result, TraceTable};
use mmv_core::analysis::{
    estimate_rip_delta, kappa_cstogradmp, kappa_cstoiht, kappa_mstogradmp, kappa_mstoiht, RipMode, Sampling,
};
use mmv_core::{io, Algorithm, Constants, Matrix};

#[derive(Parser)]
#[command(name = "mmv-bench", version, about = "Joint-sparse recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance and write A.jsm, X.jsm and Y.jsm.
    Gen(GenArgs),
    /// Run repeated trials of one solver and write the trace CSV.
    Run(RunArgs),
    /// Run a base configuration once per value of one parameter.
    Sweep(SweepArgs),
    /// Convergence constants and restricted isometry estimates.
    #[command(subcommand)]
    Analyze(Analyze),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long = "L")]
    l: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long = "L")]
    l: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1)]
    batch_size: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Timing::Off)]
    timing: Timing,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    param: SweepParam,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<String>,
    #[arg(long)]
    base_config: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Analyze {
    /// Contraction coefficient of a solver family.
    Kappa(KappaArgs),
    /// Restricted isometry constant of a stored matrix.
    Rip(RipArgs),
}

#[derive(Args)]
struct KappaArgs {
    #[arg(long, value_parser = parse_algo)]
    family: Algorithm,
    #[arg(long)]
    rho_minus: f64,
    #[arg(long)]
    rho_plus: f64,
    /// Defaults to rho-plus.
    #[arg(long)]
    rho_plus_bar: Option<f64>,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    eta1: f64,
    #[arg(long, default_value_t = 1.0)]
    eta2: f64,
    /// Number of components M (sampling is uniform unless p-min/p-max are given).
    #[arg(long, default_value_t = 1)]
    components: usize,
    #[arg(long, requires = "p_max")]
    p_min: Option<f64>,
    #[arg(long, requires = "p_min")]
    p_max: Option<f64>,
    /// Columns sharing the same constants (concatenated IHT).
    #[arg(long = "L", default_value_t = 1)]
    l: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum RipModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct RipArgs {
    /// `.jsm` or `.csv` matrix.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = RipModeArg::Exhaustive)]
    mode: RipModeArg,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_algo(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse::<Algorithm>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Gen(args) => gen(args),
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
        Command::Analyze(Analyze::Kappa(args)) => kappa(args),
        Command::Analyze(Analyze::Rip(args)) => rip(args),
    }
}

fn gen(args: GenArgs) -> Result<()> {
    // Same data as trial 0 of a run with these parameters.
    let mut spec = ExperimentSpec::new(Algorithm::MStoIht, args.n, args.m, args.l, args.k);
    spec.noise_sigma = args.sigma;
    spec.seed = args.seed;
    spec.validate()?;
    let instance = spec.instance(0);
    std::fs::create_dir_all(&args.out_dir)?;
    io::save_jsm(args.out_dir.join("A.jsm"), &instance.a)?;
    io::save_jsm(args.out_dir.join("X.jsm"), &instance.x)?;
    io::save_jsm(args.out_dir.join("Y.jsm"), &instance.y)?;
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let spec = ExperimentSpec {
        n: args.n,
        m: args.m,
        l: args.l,
        k: args.k,
        noise_sigma: args.sigma,
        algo: args.algo,
        batch_size: args.batch_size,
        gamma: args.gamma,
        max_iter: args.max_iter,
        tol: args.tol,
        trials: args.trials,
        seed: args.seed,
        workers: args.workers,
        timing: args.timing,
    };
    let table = run_experiment(&spec)?;
    report_failures(&table);
    match args.out {
        Some(path) => table.write_csv(BufWriter::new(File::create(path)?))?,
        None => table.write_csv(std::io::stdout().lock())?,
    }
    all_failed(&table)
}

fn sweep(args: SweepArgs) -> Result<()> {
    let base = ExperimentSpec::from_json(&std::fs::read_to_string(&args.base_config)?)?;
    for (path, table) in run_sweep(&base, args.param, &args.values, &args.out_dir)? {
        report_failures(&table);
        println!("{}", path.display());
    }
    Ok(())
}

fn report_failures(table: &TraceTable) {
    for f in &table.failures {
        eprintln!("trial {}: {}", f.trial, f.message);
    }
}

/// A run in which no trial succeeded counts as a numerical failure.
fn all_failed(table: &TraceTable) -> Result<()> {
    if table.rows.is_empty() {
        if let Some(f) = table.failures.first() {
            return Err(BenchError::Core(mmv_core::Error::Divergence {
                iteration: 0,
                reason: format!("every trial failed, first: {}", f.message),
            }));
        }
    }
    Ok(())
}

fn kappa(args: KappaArgs) -> Result<()> {
    let c = Constants::new(
        args.rho_minus,
        args.rho_plus,
        args.rho_plus_bar.unwrap_or(args.rho_plus),
        args.alpha,
    )?;
    let sampling = match (args.p_min, args.p_max) {
        (Some(p_min), Some(p_max)) => Sampling {
            components: args.components,
            p_min,
            p_max,
        },
        _ => Sampling::uniform(args.components),
    };
    let mut out = std::io::stdout().lock();
    match args.family {
        Algorithm::MStoIht => {
            writeln!(out, "kappa={}", kappa_mstoiht(&c, args.gamma, args.eta)?)?;
        }
        Algorithm::CStoIht => {
            let r = kappa_cstoiht(&vec![c; args.l], args.gamma, args.eta)?;
            writeln!(out, "kappa_hat={}", r.kappa_hat)?;
            writeln!(out, "kappa_j={}", r.per_column[0])?;
        }
        Algorithm::MStoGradMp => {
            let r = kappa_mstogradmp(&c, args.eta1, args.eta2, &sampling)?;
            writeln!(out, "kappa={}", r.kappa)?;
            writeln!(out, "max_mp={}", r.max_mp)?;
        }
        Algorithm::CStoGradMp => {
            let r = kappa_cstogradmp(&c, args.eta1, args.eta2, &sampling)?;
            writeln!(out, "kappa_tilde={}", r.kappa_tilde)?;
            writeln!(out, "beta1={}", r.beta1)?;
            writeln!(out, "beta2={}", r.beta2)?;
            writeln!(out, "kappa_j={}", r.kappa_j)?;
        }
    }
    Ok(())
}

fn load_matrix(path: &Path) -> Result<Matrix> {
    let csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if csv { io::load_csv(path)? } else { io::load_jsm(path)? })
}

fn rip(args: RipArgs) -> Result<()> {
    let a = load_matrix(&args.matrix)?;
    let mode = match args.mode {
        RipModeArg::Exhaustive => RipMode::Exhaustive,
        RipModeArg::Sampled => RipMode::Sampled {
            samples: args.samples,
            seed: args.seed,
        },
    };
    let est = estimate_rip_delta(&a, args.k, mode)?;
    println!("delta={}", est.delta);
    println!("exact={}", est.exact);
    println!("supports_checked={}", est.supports_checked);
    Ok(())
}
