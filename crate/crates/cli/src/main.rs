use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use swm_core::dot::to_dot;
use swm_core::generate::{generate_instance, PayoffFamily};
use swm_core::io::{parse_instance, parse_result, write_instance, ResultDoc};
use swm_core::solver::{solve_recording, write_trace};
use swm_core::verify::{blocking_pair_search, verify, DEFAULT_GRID};
use swm_core::{Instance, Scalar, SolverConfig, StableWeightedMatching};

#[derive(Parser)]
#[command(name = "swm", version, about = "Stable weighted matchings with nonlinear payoffs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and report any problems.
    Validate { file: PathBuf },
    /// Solve an instance and write the result document.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
        /// Write one JSON record per step to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a result against its instance. Exit code 0 pass, 2 unstable,
    /// 3 infeasible, 4 blocking pair found.
    Verify {
        file: PathBuf,
        #[arg(long)]
        result: PathBuf,
        /// Grid intervals per edge for the blocking-pair scan.
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Audit tolerance, relative for values above one.
        #[arg(long, default_value_t = f64::EPS_FEAS)]
        eps: f64,
        /// Smallest gain that counts in the blocking-pair scan (default: --eps).
        #[arg(long)]
        grid_eps: Option<f64>,
    },
    /// Solve an instance and print its trace to stdout.
    Trace {
        file: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Write a Graphviz rendering of a result.
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        result: PathBuf,
        #[arg(long, default_value_t = f64::EPS_EQ)]
        eps_eq: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a seeded random connected instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        na: usize,
        #[arg(long)]
        nb: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value = "linear")]
        payoff_family: PayoffFamily,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct SolveOpts {
    #[arg(long)]
    eps_eq: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    precision: Precision,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    F32,
    F64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load<T: Scalar>(path: &Path) -> Result<Instance<T>> {
    parse_instance(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_result<T: Scalar>(inst: &Instance<T>, path: &Path) -> Result<StableWeightedMatching<T>> {
    let doc = parse_result(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    doc.to_solution(inst).with_context(|| format!("reading {}", path.display()))
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Validate { file } => {
            let inst: Instance<f64> = load(&file)?;
            let report = inst.validate();
            if !report.is_ok() {
                for issue in &report.issues {
                    eprintln!("{issue}");
                }
                bail!("{} has {} problem(s)", file.display(), report.issues.len());
            }
            println!(
                "ok: {} A nodes, {} B nodes, {} edges",
                inst.a_count(),
                inst.b_count(),
                inst.edges().len()
            );
            Ok(0)
        }
        Command::Solve {
            file,
            opts,
            trace,
            output,
        } => {
            let (doc, records) = match opts.precision {
                Precision::F64 => solve_file::<f64>(&file, &opts, trace.as_deref())?,
                Precision::F32 => solve_file::<f32>(&file, &opts, trace.as_deref())?,
            };
            if let Some(path) = &trace {
                fs::write(path, records).with_context(|| format!("writing {}", path.display()))?;
            }
            emit(output.as_deref(), &doc.to_json())?;
            Ok(0)
        }
        Command::Trace { file, opts } => {
            let (_, records) = match opts.precision {
                Precision::F64 => solve_file::<f64>(&file, &opts, Some(Path::new("-")))?,
                Precision::F32 => solve_file::<f32>(&file, &opts, Some(Path::new("-")))?,
            };
            print!("{records}");
            Ok(0)
        }
        Command::Verify {
            file,
            result,
            grid,
            eps,
            grid_eps,
        } => {
            let inst: Instance<f64> = load(&file)?;
            let sol = load_result(&inst, &result)?;
            let mut report = verify(&inst, &sol, eps);
            report.blocking_pairs = blocking_pair_search(&inst, &sol.profile, grid, grid_eps.unwrap_or(eps))?;
            for v in &report.violations {
                println!("unstable edge (a{}, b{}): {}", v.edge.0 + 1, v.edge.1 + 1, v.magnitude);
            }
            for issue in &report.feasibility_issues {
                println!("infeasible: {issue}");
            }
            for w in &report.blocking_pairs {
                println!(
                    "blocking pair (a{}, b{}) at split ({}, {}), gains ({}, {})",
                    w.edge.0 + 1,
                    w.edge.1 + 1,
                    w.split_a,
                    w.split_b,
                    w.gain_a,
                    w.gain_b
                );
            }
            let code = report.exit_code();
            println!(
                "stable: {}, feasible: {}, blocking pairs: {}",
                report.stable,
                report.feasible,
                report.blocking_pairs.len()
            );
            Ok(code as u8)
        }
        Command::ExportDot {
            file,
            result,
            eps_eq,
            output,
        } => {
            let inst: Instance<f64> = load(&file)?;
            let sol = load_result(&inst, &result)?;
            emit(output.as_deref(), &to_dot(&inst, &sol.profile, &sol.matching, eps_eq)?)?;
            Ok(0)
        }
        Command::Gen {
            seed,
            na,
            nb,
            density,
            payoff_family,
            output,
        } => {
            let inst = generate_instance(seed, na, nb, density, payoff_family)?;
            emit(output.as_deref(), &write_instance(&inst))?;
            Ok(0)
        }
    }
}

/// Solves `file` at scalar `T`. With a trace destination, steps are
/// recorded and, if the solve fails, written there before the error is
/// returned.
fn solve_file<T: Scalar>(file: &Path, opts: &SolveOpts, trace: Option<&Path>) -> Result<(ResultDoc, String)> {
    let inst: Instance<T> = load(file)?;
    let mut config = SolverConfig::<T> {
        max_iterations: opts.max_iters,
        trace: trace.is_some(),
        ..SolverConfig::default()
    };
    if let Some(eps) = opts.eps_eq {
        config.eps_eq = T::from_f64(eps).context("--eps-eq not representable")?;
    }
    let mut records = Vec::new();
    let sol = match solve_recording(&inst, &config, &mut records) {
        Ok(sol) => sol,
        Err(e) => {
            if let Some(path) = trace.filter(|p| *p != Path::new("-")) {
                fs::write(path, write_trace(&records)).with_context(|| format!("writing {}", path.display()))?;
            } else if trace.is_some() {
                print!("{}", write_trace(&records));
            }
            return Err(e).with_context(|| format!("solving {}", file.display()));
        }
    };
    let report = verify(&inst, &sol, config.eps_feas);
    Ok((ResultDoc::new(&sol, report.stable, report.feasible), write_trace(&records)))
}
