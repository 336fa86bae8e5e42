//! `falcon` — build fuzzy models of ALC ontologies by gradient descent and
//! query them.
//!
//! The subcommands cover the whole pipeline: `train` fits an ensemble and
//! writes checkpoints; `entail`, `instantiate`, and `consistency` query a
//! trained ensemble; `inject` plants contradictions for stress testing;
//! `bench` sweeps injection level and ensemble size into a plot-ready CSV;
//! `rank` scores link-prediction triples. Every command records a run
//! manifest (arguments, input hashes, seeds, outputs) next to its results.
//!
//! Verbosity comes from the `FALCON_LOG` environment variable
//! (`error`, `warn`, `info`, `debug`, `trace`). Exit codes: 0 success,
//! 2 parse failure, 3 configuration problem, 4 numeric failure.

mod args;
mod commands;
mod error;
mod io;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "falcon", version, about = "Fuzzy model generation and approximate reasoning for ALC ontologies")]
struct Cli {
    /// Worker threads for ensemble training (0 = one per core). Results
    /// are seed-determined either way; use 1 for the conservative mode.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train an ensemble of fuzzy models on an ontology.
    Train(commands::train::TrainCmd),
    /// Classify query axioms against a trained ensemble.
    Entail(commands::entail::EntailCmd),
    /// Score named individuals' membership in a concept.
    Instantiate(commands::instantiate::InstantiateCmd),
    /// Degree to which the ABox can hold alongside the TBox.
    Consistency(commands::consistency::ConsistencyCmd),
    /// Plant contradictions into an ontology.
    Inject(commands::inject::InjectCmd),
    /// Sweep inconsistency level and ensemble size into a metrics CSV.
    Bench(commands::bench::BenchCmd),
    /// Rank candidate objects for relation triples.
    Rank(commands::rank::RankCmd),
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("FALCON_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version print to stdout and exit clean; anything
            // else is a bad invocation.
            let code = if e.use_stderr() { error::EXIT_CONFIG } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| CliError::config(format!("cannot size the worker pool: {e}")))?;
    }
    match cli.command {
        Command::Train(cmd) => cmd.run(),
        Command::Entail(cmd) => cmd.run(),
        Command::Instantiate(cmd) => cmd.run(),
        Command::Consistency(cmd) => cmd.run(),
        Command::Inject(cmd) => cmd.run(),
        Command::Bench(cmd) => cmd.run(),
        Command::Rank(cmd) => cmd.run(),
    }
}
