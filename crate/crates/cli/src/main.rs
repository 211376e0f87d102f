//! `desolve`: solve and benchmark the collocation methods from the
//! command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use desolve::problems::problem_by_id;
use desolve::report::Method;
use desolve_cli::{
    emit_curves, emit_report, run_benchmark, tune_hyperparameters, CliError, Format, Record,
    RunSpec, TunedHp, Tuning,
};

#[derive(Parser)]
#[command(name = "desolve", version, about = "Differential-equation solver benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Target {
    /// Benchmark problem: P1, P2, P3 or P4.
    #[arg(long)]
    problem: String,
    /// Solution method: tfc, lssvm or csvm.
    #[arg(long)]
    method: String,
    /// Training point count (sub-intervals for the ODE problems, interior
    /// points for the PDE).
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem with one method and print the error report.
    Solve {
        #[command(flatten)]
        target: Target,
        /// Basis-function count (tfc); tuned when omitted.
        #[arg(long)]
        m: Option<usize>,
        /// Kernel bandwidth (lssvm/csvm); tuned when omitted.
        #[arg(long)]
        sigma: Option<f64>,
        /// Regularization weight (lssvm/csvm); tuned when omitted.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Run the tuning protocol and print the selected hyperparameters.
    Tune {
        #[command(flatten)]
        target: Target,
    },
    /// Run a benchmark sweep described by a JSON spec file.
    Bench {
        /// Path to the run-spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Output report path.
        #[arg(long)]
        out: PathBuf,
        /// Report format.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Directory for per-point error-curve files.
        #[arg(long)]
        curves: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { target, m, sigma, gamma } => {
            let spec = solve_spec(&target, m, sigma, gamma);
            let validated = spec.validate()?;
            let hp =
                tune_hyperparameters(&validated.problem, validated.method, target.n, &validated)?;
            let (_, report) = desolve_cli::bench::solve_once(
                &validated.problem,
                validated.method,
                target.n,
                hp,
            )?;
            print_record(&Record::from_report(&report));
            Ok(())
        }
        Command::Tune { target } => {
            let problem_id = target
                .problem
                .parse()
                .map_err(|e: desolve::Error| CliError::Invalid(e.to_string()))?;
            let method: Method = target
                .method
                .parse()
                .map_err(|e: desolve::Error| CliError::Invalid(e.to_string()))?;
            let spec = RunSpec {
                problem_id: target.problem.clone(),
                method: target.method.clone(),
                point_counts: Some(vec![target.n]),
                tuning: Tuning::Grid,
                seed: 0,
                test_points: None,
            };
            let validated = spec.validate()?;
            let problem = problem_by_id(problem_id);
            match tune_hyperparameters(&problem, method, target.n, &validated)? {
                TunedHp::BasisCount(m) => println!("m {m}"),
                TunedHp::Kernel { sigma, gamma } => {
                    println!("sigma {sigma}");
                    println!("gamma {gamma}");
                }
            }
            Ok(())
        }
        Command::Bench { spec, out, format, curves } => {
            let text = std::fs::read_to_string(&spec)?;
            let spec = RunSpec::from_json(&text)?;
            let format: Format = format.parse()?;
            let rows = run_benchmark(&spec, curves.is_some())?;
            let records: Vec<Record> = rows.iter().map(|r| r.record.clone()).collect();
            emit_report(&records, format, &out)?;
            if let Some(dir) = curves {
                emit_curves(&rows, &dir)?;
            }
            println!("wrote {} rows to {}", records.len(), out.display());
            Ok(())
        }
    }
}

fn solve_spec(target: &Target, m: Option<usize>, sigma: Option<f64>, gamma: Option<f64>) -> RunSpec {
    let tuning = match (m, sigma, gamma) {
        (None, None, None) => Tuning::Grid,
        _ => Tuning::Fixed(desolve_cli::FixedHp { m, sigma, gamma }),
    };
    RunSpec {
        problem_id: target.problem.clone(),
        method: target.method.clone(),
        point_counts: Some(vec![target.n]),
        tuning,
        seed: 0,
        test_points: None,
    }
}

fn print_record(r: &Record) {
    println!("problem       {}", r.problem);
    println!("method        {}", r.method);
    println!("n_train       {}", r.n_train);
    println!("train_time_s  {}", r.train_time_s);
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:e}"));
    println!("max_err_train {}", opt(r.max_err_train));
    println!("mse_train     {}", opt(r.mse_train));
    println!("max_err_test  {}", opt(r.max_err_test));
    println!("mse_test      {}", opt(r.mse_test));
    if let Some(m) = r.hp_m {
        println!("m             {m}");
    }
    if let Some(s) = r.hp_sigma {
        println!("sigma         {s}");
    }
    if let Some(g) = r.hp_gamma {
        println!("gamma         {g}");
    }
    println!("converged     {}", r.converged);
}
