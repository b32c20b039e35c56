//! `texrand`: command-line front end for the texture randomization toolkit.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use texrand_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "texrand", version, about = "Texture randomization toolkit", disable_help_subcommand = true)]
struct Cli {
    /// Root seed; every stochastic task derives child seeds from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress progress output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Emit exactly one JSON object on stdout instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Texture-complexity scoring and painting selection.
    Tcps {
        #[command(subcommand)]
        command: TcpsCommand,
    },
    /// Global texture randomization of one image with one style image.
    Gtr(commands::GtrArgs),
    /// Mask generation and raw/stylized mixing.
    Ltr {
        #[command(subcommand)]
        command: LtrCommand,
    },
    /// Procedural datasets: toy segmentation domains and painting candidates.
    Dataset(commands::DatasetArgs),
    /// Train the toy segmentation network.
    Train(commands::TrainArgs),
    /// Evaluate a trained model on a procedural dataset.
    Eval(commands::EvalArgs),
    /// Batch-augment a directory of images (stylized, locally mixed, mask).
    Augment(commands::AugmentArgs),
}

#[derive(Subcommand)]
enum TcpsCommand {
    /// Print the texture complexity of one image.
    Score(commands::ScoreArgs),
    /// Select a painting pool from a directory and write a JSON manifest.
    Select(commands::SelectArgs),
}

#[derive(Subcommand)]
enum LtrCommand {
    /// Generate a random-boundary binary mask.
    Mask(commands::MaskArgs),
    /// Mix a content image with a stylized image through a mask file.
    Apply(commands::ApplyArgs),
}

/// Shared flags available to every subcommand handler.
#[derive(Clone, Copy)]
pub struct Global {
    pub seed: u64,
    pub quiet: bool,
    pub json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = Global { seed: cli.seed, quiet: cli.quiet, json: cli.json };
    let result = match cli.command {
        Command::Tcps { command: TcpsCommand::Score(a) } => commands::score(&a, global),
        Command::Tcps { command: TcpsCommand::Select(a) } => commands::select(&a, global),
        Command::Gtr(a) => commands::gtr(&a, global),
        Command::Ltr { command: LtrCommand::Mask(a) } => commands::mask(&a, global),
        Command::Ltr { command: LtrCommand::Apply(a) } => commands::apply(&a, global),
        Command::Dataset(a) => commands::dataset(&a, global),
        Command::Train(a) => commands::train(&a, global),
        Command::Eval(a) => commands::eval(&a, global),
        Command::Augment(a) => commands::augment(&a, global),
    };
    match result {
        Ok(report) => {
            output::emit(&report, global);
            ExitCode::from(report.exit_code)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Exit codes: 0 success, 2 usage (from clap), 3 I/O, 4 validation,
/// 5 numerical failure.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Io { .. }) | Some(CoreError::UnsupportedFormat(_)) => 3,
        Some(CoreError::InvalidParameter(_))
        | Some(CoreError::ShapeMismatch(_))
        | Some(CoreError::InsufficientPool { .. })
        | Some(CoreError::EmptyPool)
        | Some(CoreError::CorruptWeights(_)) => 4,
        Some(CoreError::DegenerateStats(_))
        | Some(CoreError::Numerical(_))
        | Some(CoreError::UndefinedMetric(_)) => 5,
        None => {
            if err.downcast_ref::<std::io::Error>().is_some() {
                3
            } else {
                4
            }
        }
    }
}
