mod commands;
mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{CaseArg, StrategyArg, SynthArgs, TaskArg};
use crate::config::{Config, GlobalArgs};

/// Incident root-cause recommendation and monitor categorization over an LLM
/// gateway, with a local corpus, retrieval index, and evaluation reports.
#[derive(Debug, Parser)]
#[command(name = "xlc", version, max_term_width = 100)]
struct Cli {
    #[command(flatten)]
    globals: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic corpus with planted ground truth.
    Synth {
        #[command(subcommand)]
        command: SynthCommand,
    },
    /// Validate a corpus directory and print its shape.
    Ingest,
    /// Report what the cleaning pass would strip from each incident.
    Sanitize,
    /// Produce service and incident summaries via the provider, with caching.
    Summarize,
    /// Build or refresh the incident retrieval index.
    Index {
        #[command(subcommand)]
        command: IndexCommand,
    },
    /// Root-cause recommendation runs.
    Rca {
        #[command(subcommand)]
        command: RcaCommand,
    },
    /// Monitor categorization runs.
    Monitor {
        #[command(subcommand)]
        command: MonitorCommand,
    },
    /// Score an existing run file against corpus ground truth.
    Eval {
        #[command(subcommand)]
        command: EvalCommand,
    },
    /// Render the combined report from all run files in the output directory.
    Report,
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    /// Write a generated corpus into the corpus directory.
    Gen(SynthArgs),
}

#[derive(Debug, Subcommand)]
enum IndexCommand {
    /// Embed every incident and save the index into the output directory.
    Build,
}

#[derive(Debug, Subcommand)]
enum RcaCommand {
    /// Run one prompting strategy over incidents and record predictions.
    Run(RcaRunArgs),
}

#[derive(Debug, clap::Args)]
struct RcaRunArgs {
    /// Prompting strategy to evaluate.
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// File with one incident id per line; defaults to every incident.
    #[arg(long)]
    ids: Option<PathBuf>,
    /// Keep existing records for this strategy and only run missing incidents.
    #[arg(long)]
    resume: bool,
}

#[derive(Debug, Subcommand)]
enum MonitorCommand {
    /// Run one task and context case over labeled monitors.
    Run(MonitorRunArgs),
}

#[derive(Debug, clap::Args)]
struct MonitorRunArgs {
    /// Which label set to predict.
    #[arg(long, value_enum)]
    task: TaskArg,
    /// How much monitor context the prompt includes.
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Skip the run when every labeled monitor already has a record.
    #[arg(long)]
    resume: bool,
}

#[derive(Debug, Subcommand)]
enum EvalCommand {
    /// Score a root-cause run file.
    Rca {
        /// Run records produced by `xlc rca run`.
        #[arg(long)]
        runs: PathBuf,
    },
    /// Score a monitor categorization run file.
    Monitor {
        /// Run records produced by `xlc monitor run`.
        #[arg(long)]
        runs: PathBuf,
    },
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    let config = Config::load(&cli.globals)?;
    if config.verbose {
        eprintln!("{}", config.redacted());
    }
    match &cli.command {
        Command::Synth { command: SynthCommand::Gen(args) } => commands::synth_gen(&config, args),
        Command::Ingest => commands::ingest(&config),
        Command::Sanitize => commands::sanitize(&config),
        Command::Summarize => commands::summarize(&config),
        Command::Index { command: IndexCommand::Build } => commands::index_build(&config),
        Command::Rca { command: RcaCommand::Run(args) } => commands::rca_run(
            &config,
            args.strategy.into(),
            args.ids.as_deref(),
            args.resume,
        ),
        Command::Monitor { command: MonitorCommand::Run(args) } => {
            commands::monitor_run(&config, args.task.into(), args.case.into(), args.resume)
        }
        Command::Eval { command: EvalCommand::Rca { runs } } => commands::eval_rca(&config, runs),
        Command::Eval { command: EvalCommand::Monitor { runs } } => {
            commands::eval_monitor(&config, runs)
        }
        Command::Report => commands::report(&config),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
