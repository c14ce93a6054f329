//! Batch driver for the wall-crossing series engine.
//!
//! One command per process: read a JSON configuration, validate it
//! against the shipped schema, run the requested operation family, and
//! write a JSON (or TSV) report. Exit status 0 means computed and
//! verified where applicable, 1 means a verification failed, 2 means
//! the configuration was rejected or the computation hit an error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::CommandOutput;

#[derive(Parser)]
#[command(name = "dtwall", version, about = "Exact wall-crossing series engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Plane-partition product series tables.
    Macmahon(CommonArgs),
    /// Degree-axis wall invariants with the log-series cross-check.
    Nhat(CommonArgs),
    /// One-sided coefficient limits against their closed forms.
    Coeffs(CommonArgs),
    /// Change-of-oracle transform of an invariant table.
    Transform(CommonArgs),
    /// Wall crossings of a path with exact parameters and signs.
    Walls(CommonArgs),
    /// Transport of a series along a path of charges.
    Transport(CommonArgs),
    /// The ideal-side / pair-side pipeline self-consistency report.
    DtptCheck(CommonArgs),
    /// Harder-Narasimhan filtrations in the quiver laboratory.
    Hn(CommonArgs),
    /// The combinatorial identity suite.
    Identities(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Macmahon(a)
            | Command::Nhat(a)
            | Command::Coeffs(a)
            | Command::Transform(a)
            | Command::Walls(a)
            | Command::Transport(a)
            | Command::DtptCheck(a)
            | Command::Hn(a)
            | Command::Identities(a) => a,
        }
    }
}

fn run(command: &Command) -> dtwall::Result<CommandOutput> {
    let args = command.common();
    let raw = std::fs::read_to_string(&args.config)
        .map_err(|e| dtwall::Error::Config(format!("cannot read config: {}", e)))?;
    let cfg = config::load(&raw)?;
    match command {
        Command::Macmahon(_) => commands::run_macmahon(&cfg),
        Command::Nhat(_) => commands::run_nhat(&cfg),
        Command::Coeffs(_) => commands::run_coeffs(&cfg),
        Command::Transform(_) => commands::run_transform(&cfg),
        Command::Walls(_) => commands::run_walls(&cfg),
        Command::Transport(_) => commands::run_transport(&cfg),
        Command::DtptCheck(_) => commands::run_dtpt_check(&cfg),
        Command::Hn(_) => commands::run_hn(&cfg),
        Command::Identities(_) => commands::run_identities(&cfg),
    }
}

fn emit(args: &CommonArgs, output: &CommandOutput) -> std::io::Result<()> {
    let rendered = match args.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&output.json).expect("serializable");
            text.push('\n');
            text
        }
        Format::Tsv => match &output.tsv {
            Some(t) => t.clone(),
            None => {
                let mut text = serde_json::to_string_pretty(&output.json).expect("serializable");
                text.push('\n');
                text
            }
        },
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered),
        None => {
            print!("{}", rendered);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(output) => {
            if let Err(e) = emit(cli.command.common(), &output) {
                eprintln!("error: cannot write output: {}", e);
                return ExitCode::from(2);
            }
            match output.verified {
                Some(false) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
