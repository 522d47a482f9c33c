use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use sensenorm::mfs::{evaluate_mfs, random_baseline, MfsEvalConfig, MfsRecord, RandomBaseline, Score, Subset};
use sensenorm::normlab::{bin_analysis, norm_freq_correlation, partition_samples, FrequencyBin, Histogram};
use sensenorm::{build_inventory, build_vocab, Pos, SenseStats};
use serde::Serialize;
use std::collections::BTreeMap;

use super::{read_corpus, read_embeddings, read_inventory, Common};
use crate::io::{create_output, write_csv, write_json};
use crate::manifest::{default_path, Run};

#[derive(Args, Debug, Serialize)]
pub struct PartitionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Sense or word vectors.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Number of random contexts.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Norm of every random context.
    #[arg(long, default_value_t = 1.0)]
    pub context_norm: f64,
    /// Bins of the normalised histogram.
    #[arg(long, default_value_t = 20)]
    pub hist_bins: usize,
    /// JSON report [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of `index,z,log_z,normalized`.
    #[arg(long)]
    pub samples_csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct PartitionSummary {
    keys: usize,
    dim: usize,
    samples: usize,
    context_norm: f64,
    mean: f64,
    log_mean: f64,
    coefficient_of_variation: f64,
    shifted: bool,
    normalized_histogram: Histogram,
}

#[derive(Serialize)]
struct PartitionRow {
    index: usize,
    z: f64,
    log_z: f64,
    normalized: f64,
}

pub fn run_partition(args: &PartitionArgs) -> Result<()> {
    let mut run = Run::new("analyze-partition");
    let emb = read_embeddings::<f64>(&mut run, &args.embeddings)?;
    let r = partition_samples(&emb, args.samples, args.common.seed, args.context_norm, args.hist_bins)?;
    log::info!("coefficient of variation {:.4}", r.coefficient_of_variation);
    if let Some(path) = &args.samples_csv {
        let rows = r.samples.iter().zip(&r.log_samples).enumerate().map(|(index, (&z, &log_z))| PartitionRow {
            index,
            z,
            log_z,
            normalized: (log_z - r.log_mean).exp(),
        });
        write_csv(&mut run, path, rows)?;
    }
    let summary = PartitionSummary {
        keys: emb.len(),
        dim: emb.dim(),
        samples: r.samples.len(),
        context_norm: r.context_norm,
        mean: r.mean,
        log_mean: r.log_mean,
        coefficient_of_variation: r.coefficient_of_variation,
        shifted: r.shifted,
        normalized_histogram: r.normalized_histogram,
    };
    write_json(&mut run, args.out.as_ref(), &summary)?;
    args.common.finish(run, args, default_path("analyze-partition", args.out.as_ref()))
}

/// Which corpus counts are paired with the vectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CountKind {
    /// Annotated sense-id occurrences.
    #[default]
    Senses,
    /// Surface-form occurrences.
    Words,
}

#[derive(Args, Debug, Serialize)]
pub struct CorrArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Sense or word vectors.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Corpus TSV the frequencies are counted from.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub count: CountKind,
    /// Ignore keys seen fewer times than this.
    #[arg(long, default_value_t = 1)]
    pub min_freq: u64,
    /// JSON report [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of `key,frequency,log_frequency,squared_norm`.
    #[arg(long)]
    pub points_csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct CorrSummary {
    pearson_rho: f64,
    fit_slope: f64,
    fit_intercept: f64,
    min_freq: u64,
    points: usize,
    skipped: usize,
}

pub fn run_corr(args: &CorrArgs) -> Result<()> {
    let mut run = Run::new("analyze-corr");
    let emb = read_embeddings::<f64>(&mut run, &args.embeddings)?;
    let corpus = read_corpus(&mut run, &args.corpus)?;
    let vocab = build_vocab(&corpus)?;
    let freqs = match args.count {
        CountKind::Senses => &vocab.sense_freq,
        CountKind::Words => &vocab.word_freq,
    };
    let r = norm_freq_correlation(&emb, freqs, args.min_freq)?;
    log::info!("pearson rho {:.4} over {} points", r.pearson_rho, r.points.len());
    if let Some(path) = &args.points_csv {
        write_csv(&mut run, path, &r.points)?;
    }
    let summary = CorrSummary {
        pearson_rho: r.pearson_rho,
        fit_slope: r.fit_slope,
        fit_intercept: r.fit_intercept,
        min_freq: r.min_freq,
        points: r.points.len(),
        skipped: r.skipped,
    };
    write_json(&mut run, args.out.as_ref(), &summary)?;
    args.common.finish(run, args, default_path("analyze-corr", args.out.as_ref()))
}

#[derive(Args, Debug, Serialize)]
pub struct BinsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Sense vectors.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Annotated corpus TSV.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// JSON report [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of `bin,max_freq,min_freq,size,word_count,excluded,alpha,ratio`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct BinRow {
    bin: usize,
    max_freq: u64,
    min_freq: u64,
    size: usize,
    word_count: usize,
    excluded: usize,
    alpha: usize,
    ratio: f64,
}

impl BinRow {
    fn new(bin: usize, b: &FrequencyBin) -> Self {
        BinRow {
            bin,
            max_freq: b.max_freq,
            min_freq: b.min_freq,
            size: b.size,
            word_count: b.word_count,
            excluded: b.excluded,
            alpha: b.alpha,
            ratio: b.ratio,
        }
    }
}

pub fn run_bins(args: &BinsArgs) -> Result<()> {
    let mut run = Run::new("analyze-bins");
    let emb = read_embeddings::<f64>(&mut run, &args.embeddings)?;
    let corpus = read_corpus(&mut run, &args.corpus)?;
    let r = bin_analysis(&SenseStats::from_corpus(&corpus), &emb, args.bins)?;
    if let Some(path) = &args.csv {
        write_csv(&mut run, path, r.bins.iter().enumerate().map(|(i, b)| BinRow::new(i + 1, b)))?;
    }
    write_json(&mut run, args.out.as_ref(), &r)?;
    args.common.finish(run, args, default_path("analyze-bins", args.out.as_ref()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetArg {
    #[default]
    AllWords,
    /// Nouns whose lemma reaches --noun-min-freq annotated occurrences.
    NounSample,
}

#[derive(Args, Debug, Serialize)]
pub struct MfsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Sense vectors.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Annotated corpus TSV providing the gold most frequent senses.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Sense inventory TSV [default: built from the corpus].
    #[arg(long)]
    pub inventory: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub subset: SubsetArg,
    #[arg(long, default_value_t = MfsEvalConfig::default().noun_sample_min_freq)]
    pub noun_min_freq: u64,
    /// Trials of the uniform random baseline.
    #[arg(long, default_value_t = MfsEvalConfig::default().random_trials)]
    pub random_trials: usize,
    /// JSON report [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TSV of `lemma,pos,candidates,frequency,gold,gold_tied,predicted,correct`.
    #[arg(long)]
    pub records_tsv: Option<PathBuf>,
}

#[derive(Serialize)]
struct MfsSummary {
    subset: Subset,
    noun_sample_min_freq: u64,
    threshold_basis: String,
    accuracy: f64,
    overall: Score,
    per_pos: BTreeMap<Pos, Score>,
    gold_ties: usize,
    excluded_no_vectors: usize,
    excluded_no_gold: usize,
    random_baseline: RandomBaseline,
}

pub fn run_mfs(args: &MfsArgs) -> Result<()> {
    let mut run = Run::new("mfs");
    let emb = read_embeddings::<f64>(&mut run, &args.embeddings)?;
    let corpus = read_corpus(&mut run, &args.corpus)?;
    let inventory = match &args.inventory {
        Some(p) => read_inventory(&mut run, p)?,
        None => build_inventory(&corpus)?,
    };
    let cfg = MfsEvalConfig {
        subset: match args.subset {
            SubsetArg::AllWords => Subset::AllWords,
            SubsetArg::NounSample => Subset::NounSample,
        },
        noun_sample_min_freq: args.noun_min_freq,
        seed: args.common.seed,
        random_trials: args.random_trials,
    };
    let r = evaluate_mfs(&corpus, &inventory, &emb, &cfg)?;
    let baseline = random_baseline(&corpus, &inventory, &cfg)?;
    log::info!("accuracy {:.2} over {} words, random {:.2}", r.accuracy, r.overall.evaluated, baseline.mean);
    if let Some(path) = &args.records_tsv {
        let w = create_output(&mut run, path)?;
        let mut t = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
        for rec in &r.records {
            t.serialize(rec as &MfsRecord)?;
        }
        t.flush()?;
    }
    let summary = MfsSummary {
        subset: r.subset,
        noun_sample_min_freq: r.noun_sample_min_freq,
        threshold_basis: r.threshold_basis,
        accuracy: r.accuracy,
        overall: r.overall,
        per_pos: r.per_pos,
        gold_ties: r.gold_ties,
        excluded_no_vectors: r.excluded_no_vectors,
        excluded_no_gold: r.excluded_no_gold,
        random_baseline: baseline,
    };
    write_json(&mut run, args.out.as_ref(), &summary)?;
    args.common.finish(run, args, default_path("mfs", args.out.as_ref()))
}
