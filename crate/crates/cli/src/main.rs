//! `sensenorm` command-line pipeline.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod io;
mod manifest;

use commands::{analyze, classify, convert, gen, train};
use io::UsageError;

/// Sense embeddings, norm/frequency diagnostics and sense classifiers.
///
/// Every subcommand writes a JSON run manifest next to its main output.
/// Flags may also be given in a `--config` file of `key = value` lines;
/// command-line flags take precedence.
#[derive(Parser, Debug)]
#[command(name = "sensenorm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic sense corpus from the random-walk model.
    #[command(args_override_self = true)]
    Gen(gen::GenArgs),
    /// Train skip-gram negative-sampling vectors.
    #[command(args_override_self = true)]
    TrainSgns(train::SgnsArgs),
    /// Train GloVe vectors.
    #[command(args_override_self = true)]
    TrainGlove(train::GloveArgs),
    /// Partition-function concentration over random contexts.
    #[command(args_override_self = true)]
    AnalyzePartition(analyze::PartitionArgs),
    /// Correlation between log frequency and squared norm.
    #[command(args_override_self = true)]
    AnalyzeCorr(analyze::CorrArgs),
    /// Frequency-binned norm ordering of the two most frequent senses.
    #[command(args_override_self = true)]
    AnalyzeBins(analyze::BinsArgs),
    /// Most-frequent-sense prediction by largest norm.
    #[command(args_override_self = true)]
    Mfs(analyze::MfsArgs),
    /// Word sense disambiguation with norm features.
    #[command(args_override_self = true)]
    Wsd(classify::WsdArgs),
    /// Word-in-context classification with norm features.
    #[command(args_override_self = true)]
    Wic(classify::WicArgs),
    /// Convert external corpora and vector files.
    #[command(args_override_self = true)]
    Convert(convert::ConvertArgs),
}

impl Command {
    fn workers(&self) -> usize {
        match self {
            Command::Gen(a) => a.common.workers,
            Command::TrainSgns(a) => a.common.workers,
            Command::TrainGlove(a) => a.common.workers,
            Command::AnalyzePartition(a) => a.common.workers,
            Command::AnalyzeCorr(a) => a.common.workers,
            Command::AnalyzeBins(a) => a.common.workers,
            Command::Mfs(a) => a.common.workers,
            Command::Wsd(a) => a.common.workers,
            Command::Wic(a) => a.common.workers,
            Command::Convert(a) => a.common.workers,
        }
    }

    fn run(&self) -> anyhow::Result<()> {
        match self {
            Command::Gen(a) => gen::run(a),
            Command::TrainSgns(a) => train::run_sgns(a),
            Command::TrainGlove(a) => train::run_glove(a),
            Command::AnalyzePartition(a) => analyze::run_partition(a),
            Command::AnalyzeCorr(a) => analyze::run_corr(a),
            Command::AnalyzeBins(a) => analyze::run_bins(a),
            Command::Mfs(a) => analyze::run_mfs(a),
            Command::Wsd(a) => classify::run_wsd(a),
            Command::Wic(a) => classify::run_wic(a),
            Command::Convert(a) => convert::run(a),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let argv = match config::inject_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let workers = cli.command.workers();
    if workers == 0 {
        eprintln!("error: --workers must be positive");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
        log::warn!("could not size the thread pool: {e}");
    }
    match cli.command.run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<UsageError>().is_some() { 2 } else { 1 })
        }
    }
}
