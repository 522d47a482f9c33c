use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use sensenorm::glove::{build_cooc, train_glove, CoocTable, GloveConfig};
use sensenorm::sgns::{train_sgns, SgnsConfig};
use sensenorm::{EmbeddingMatrix, Scalar};
use serde::Serialize;

use super::{read_corpus, Common, Precision, Stream};
use crate::io::{create_output, open_input, write_csv};
use crate::manifest::{default_path, Run};

#[derive(Serialize)]
struct LossRow {
    epoch: usize,
    loss: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SgnsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Corpus TSV.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output vector file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub stream: Stream,
    #[arg(long, default_value_t = SgnsConfig::default().dim)]
    pub dim: usize,
    /// Maximum window radius; each position samples its radius uniformly.
    #[arg(long, default_value_t = SgnsConfig::default().window)]
    pub window: usize,
    /// Negative samples per positive pair.
    #[arg(long, default_value_t = SgnsConfig::default().negatives)]
    pub negatives: usize,
    #[arg(long, default_value_t = SgnsConfig::default().epochs)]
    pub epochs: usize,
    /// Initial learning rate, decayed linearly.
    #[arg(long, default_value_t = SgnsConfig::default().initial_lr)]
    pub lr: f64,
    /// Drop keys seen fewer times than this.
    #[arg(long, default_value_t = SgnsConfig::default().min_count)]
    pub min_count: u64,
    /// Frequent-key downsampling threshold; 0 disables it.
    #[arg(long, default_value_t = SgnsConfig::default().subsample_threshold)]
    pub subsample: f64,
    #[arg(long, value_enum, default_value_t)]
    pub precision: Precision,
    /// CSV of `epoch,loss`.
    #[arg(long)]
    pub loss_csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[group(id = "source", required = true, multiple = false, args = ["corpus", "cooc"])]
pub struct GloveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Corpus TSV to count co-occurrences from.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Precomputed co-occurrence TSV instead of a corpus.
    #[arg(long)]
    pub cooc: Option<PathBuf>,
    /// Output vector file.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the co-occurrence table counted from --corpus.
    #[arg(long)]
    pub cooc_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub stream: Stream,
    #[arg(long, default_value_t = GloveConfig::default().dim)]
    pub dim: usize,
    /// Symmetric window radius for counting.
    #[arg(long, default_value_t = GloveConfig::default().window)]
    pub window: usize,
    /// Weighting cap.
    #[arg(long, default_value_t = GloveConfig::default().x_max)]
    pub x_max: f64,
    /// Weighting exponent.
    #[arg(long, default_value_t = GloveConfig::default().alpha)]
    pub alpha: f64,
    #[arg(long, default_value_t = GloveConfig::default().epochs)]
    pub epochs: usize,
    /// AdaGrad learning rate.
    #[arg(long, default_value_t = GloveConfig::default().initial_lr)]
    pub lr: f64,
    #[arg(long, value_enum, default_value_t)]
    pub precision: Precision,
    /// CSV of `epoch,loss`.
    #[arg(long)]
    pub loss_csv: Option<PathBuf>,
}

fn write_result<T: Scalar>(
    run: &mut Run,
    emb: &EmbeddingMatrix<T>,
    loss: &[f64],
    out: &Path,
    loss_csv: Option<&PathBuf>,
) -> Result<()> {
    for (e, l) in loss.iter().enumerate() {
        log::info!("epoch {}: loss {l:.6}", e + 1);
    }
    let mut w = create_output(run, out)?;
    emb.write(&mut w)?;
    w.flush()?;
    if let Some(path) = loss_csv {
        write_csv(run, path, loss.iter().enumerate().map(|(e, &loss)| LossRow { epoch: e + 1, loss }))?;
    }
    Ok(())
}

pub fn run_sgns(args: &SgnsArgs) -> Result<()> {
    let mut run = Run::new("train-sgns");
    let corpus = read_corpus(&mut run, &args.corpus)?;
    let stream = args.stream.of(&corpus);
    let cfg = SgnsConfig {
        dim: args.dim,
        window: args.window,
        negatives: args.negatives,
        epochs: args.epochs,
        initial_lr: args.lr,
        min_count: args.min_count,
        subsample_threshold: args.subsample,
        workers: args.common.workers,
        seed: args.common.seed,
    };
    match args.precision {
        Precision::F32 => {
            let o = train_sgns::<f32>(&stream, &cfg)?;
            write_result(&mut run, &o.embeddings, &o.epoch_loss, &args.out, args.loss_csv.as_ref())?;
        }
        Precision::F64 => {
            let o = train_sgns::<f64>(&stream, &cfg)?;
            write_result(&mut run, &o.embeddings, &o.epoch_loss, &args.out, args.loss_csv.as_ref())?;
        }
    }
    args.common.finish(run, args, default_path("train-sgns", Some(&args.out)))
}

pub fn run_glove(args: &GloveArgs) -> Result<()> {
    let mut run = Run::new("train-glove");
    let cooc = match (&args.corpus, &args.cooc) {
        (Some(c), _) => {
            let corpus = read_corpus(&mut run, c)?;
            let table = build_cooc(&args.stream.of(&corpus), args.window)?;
            if let Some(path) = &args.cooc_out {
                let mut w = create_output(&mut run, path)?;
                table.write_tsv(&mut w)?;
                w.flush()?;
            }
            table
        }
        (None, Some(path)) => CoocTable::read_tsv(open_input(&mut run, path)?)?,
        (None, None) => unreachable!("clap requires one source"),
    };
    log::info!("{} co-occurrence entries over {} keys", cooc.len(), cooc.vocab().len());
    let cfg = GloveConfig {
        dim: args.dim,
        window: args.window,
        x_max: args.x_max,
        alpha: args.alpha,
        epochs: args.epochs,
        initial_lr: args.lr,
        workers: args.common.workers,
        seed: args.common.seed,
    };
    match args.precision {
        Precision::F32 => {
            let o = train_glove::<f32>(&cooc, &cfg)?;
            write_result(&mut run, &o.embeddings, &o.epoch_loss, &args.out, args.loss_csv.as_ref())?;
        }
        Precision::F64 => {
            let o = train_glove::<f64>(&cooc, &cfg)?;
            write_result(&mut run, &o.embeddings, &o.epoch_loss, &args.out, args.loss_csv.as_ref())?;
        }
    }
    args.common.finish(run, args, default_path("train-glove", Some(&args.out)))
}
