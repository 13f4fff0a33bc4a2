use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cohort::dataset::Overrides;
use cohort::BenefitFunction;

mod algo;
mod commands;
mod error;
mod plan;
mod run;
mod verify;

use algo::{Algorithm, Deadline};
use error::{CliError, CliResult};

/// Cohort scheduling and partitioning experiments.
#[derive(Debug, Parser)]
#[command(name = "cohort", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a requirement matrix (and planted labels) from a dataset recipe.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the recipe's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        base: Option<u32>,
        #[arg(long)]
        step: Option<u32>,
    },
    /// Run an experiment plan and write results, aggregate and error tables.
    Run {
        plan: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<Deadline>>,
        #[arg(long, value_delimiter = ',')]
        algo: Option<Vec<Algorithm>>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        sample_c: Option<usize>,
        #[arg(long)]
        base: Option<u32>,
        #[arg(long)]
        step: Option<u32>,
    },
    /// Check the scheduler and partitioner against exhaustive solvers.
    Verify {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Re-run a single instance by index.
        #[arg(long)]
        replay: Option<u64>,
    },
    /// Print the optimal schedule of one group as JSON.
    Schedule {
        #[arg(long)]
        matrix: PathBuf,
        /// Student ids or indices, comma separated (default: all students).
        #[arg(long)]
        group: Option<String>,
        /// Slot count or `avg`.
        #[arg(long)]
        d: Deadline,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long, default_value = "uniform")]
        benefit: BenefitFunction,
    },
    /// Partition students with one algorithm.
    Partition {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: Deadline,
        #[arg(long, value_enum, default_value_t = Algorithm::Cohpart)]
        algo: Algorithm,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[arg(long, default_value_t = 4)]
        sample_c: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Generate {
            spec,
            out,
            seed,
            base,
            step,
        } => {
            let written = commands::cmd_generate(&spec, &out, seed, Overrides { base, step })?;
            eprintln!("wrote {} to {}", written.join(", "), out.display());
        }
        Command::Run {
            plan,
            out,
            seed,
            trials,
            k,
            d,
            algo,
            restarts,
            sample_c,
            base,
            step,
        } => {
            let mut p = plan::ExperimentPlan::load(&plan)?;
            p.seed = seed.unwrap_or(p.seed);
            p.trials = trials.unwrap_or(p.trials);
            p.k = k.unwrap_or(p.k);
            p.d = d.unwrap_or(p.d);
            p.algorithms = algo.unwrap_or(p.algorithms);
            p.restarts = restarts.unwrap_or(p.restarts);
            p.sample_c = sample_c.unwrap_or(p.sample_c);
            p.base = base.or(p.base);
            p.step = step.or(p.step);
            let out_dir = out
                .or_else(|| p.out.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            let summary = run::execute(&p, &out_dir)?;
            eprintln!(
                "{} result rows, {} errors written to {}",
                summary.rows,
                summary.errors,
                summary.out_dir.display()
            );
        }
        Command::Verify {
            instances,
            seed,
            replay,
        } => print!("{}", verify::cmd_verify(instances, seed, replay)?),
        Command::Schedule {
            matrix,
            group,
            d,
            constraints,
            benefit,
        } => println!(
            "{}",
            commands::cmd_schedule(&matrix, group.as_deref(), d, constraints.as_deref(), benefit)?
        ),
        Command::Partition {
            matrix,
            k,
            d,
            algo,
            seed,
            restarts,
            sample_c,
            out,
        } => println!(
            "{}",
            commands::cmd_partition(&commands::PartitionArgs {
                matrix: &matrix,
                out_dir: &out,
                algorithm: algo,
                k,
                d,
                seed,
                restarts,
                sample_c,
            })?
        ),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return CliError::Usage(e.to_string()).exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
