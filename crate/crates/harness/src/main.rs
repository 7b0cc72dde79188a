use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use enhanced_cs::integrator::Method;

use ecs_harness::converge::{convergence_study, DEFAULT_H_LIST};
use ecs_harness::run::{run, RunSummary};
use ecs_harness::suite::{run_suite, suite_by_name};
use ecs_harness::verify::verify_conditions;
use ecs_harness::{ConfigOverrides, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "ecs", version, about = "Energy-preserving integrators for Poisson systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one problem and write a CSV run record.
    Run(RunArgs),
    /// Global error at a fixed time over several step sizes.
    Converge(ConvergeArgs),
    /// Check the coefficient conditions for a list of orders.
    Verify {
        /// Orders to check.
        #[arg(long = "m", value_delimiter = ',', default_values_t = [1usize, 2, 3])]
        m_list: Vec<usize>,
    },
    /// Run a named batch of experiments in parallel.
    Suite {
        name: String,
        /// Run the Lotka–Volterra experiments for 100,000 steps.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; flags given here take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    quad_sigma: Option<usize>,
    #[arg(long)]
    quad_varsigma: Option<usize>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long, default_value = "euler")]
    problem: String,
    #[arg(long, default_value = "enhanced", value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Defaults to `max(m, 2)` Gauss points.
    #[arg(long)]
    quad_sigma: Option<usize>,
    /// Defaults to `max(m, 2)` Gauss points.
    #[arg(long)]
    quad_varsigma: Option<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_H_LIST)]
    h_list: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = enhanced_cs::integrator::DEFAULT_SOLVER_TOL)]
    tol: f64,
    /// Also write the table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run(args) => {
            let overrides = ConfigOverrides {
                problem: args.problem,
                method: args.method,
                m: args.m,
                quad_sigma: args.quad_sigma,
                quad_varsigma: args.quad_varsigma,
                h: args.h,
                steps: args.steps,
                tol: args.tol,
                output_path: args.out,
            };
            let config = ExperimentConfig::resolve(args.config.as_deref(), &overrides)?;
            let record = run(&config)?;
            println!("wrote {}", config.output_path.display());
            println!("{}", RunSummary::of(&record));
        }
        Command::Converge(args) => {
            let quad = args.m.max(2);
            let template = ExperimentConfig {
                problem: args.problem,
                method: args.method,
                m: args.m,
                quad_sigma: args.quad_sigma.unwrap_or(quad),
                quad_varsigma: args.quad_varsigma.unwrap_or(quad),
                tol: args.tol,
                ..Default::default()
            };
            template.validate()?;
            let table = convergence_study(&template, &args.h_list, args.t_end)?;
            print!("{table}");
            if let Some(path) = args.out {
                let file = std::fs::File::create(&path).map_err(|e| HarnessError::Io { path: path.clone(), source: e })?;
                table
                    .write_csv(std::io::BufWriter::new(file))
                    .map_err(|e| HarnessError::Io { path, source: e })?;
            }
        }
        Command::Verify { m_list } => {
            let report = verify_conditions(&m_list)?;
            print!("{report}");
            report.into_result()?;
        }
        Command::Suite { name, full, out_dir } => {
            let configs = suite_by_name(&name, &out_dir, full)?;
            let mut first_failure = None;
            for outcome in run_suite(configs) {
                let label = format!("{} m={}", outcome.config.problem, outcome.config.m);
                match outcome.result {
                    Ok(record) => {
                        println!("== {label} -> {}", outcome.config.output_path.display());
                        println!("{}", RunSummary::of(&record));
                    }
                    Err(err) => {
                        eprintln!("== {label} failed: {err}");
                        first_failure.get_or_insert(err);
                    }
                }
            }
            if let Some(err) = first_failure {
                return Err(err);
            }
        }
    }
    Ok(())
}
