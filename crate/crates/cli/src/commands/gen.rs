use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use sensenorm::synthgen::{generate, WalkParams};
use serde::Serialize;

use super::Common;
use crate::io::{create_output, usage};
use crate::manifest::Run;

/// Writes `corpus.tsv`, `truth.vec` (ground-truth sense vectors) and
/// `mapping.tsv` (sense to word) into the output directory.
#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Output directory.
    #[arg(long, default_value = "synth")]
    pub out_dir: PathBuf,
    /// Dimensionality of the sense vectors.
    #[arg(long, default_value_t = WalkParams::default().dim)]
    pub dim: usize,
    /// Number of senses.
    #[arg(long, default_value_t = WalkParams::default().n_senses)]
    pub senses: usize,
    /// Comma-separated probabilities that a word has 1, 2, ... senses.
    #[arg(long, default_value = "0.4,0.3,0.2,0.1")]
    pub senses_per_word: String,
    /// Number of emitted tokens.
    #[arg(long, default_value_t = WalkParams::default().steps)]
    pub steps: usize,
    /// Standard deviation of each context step.
    #[arg(long, default_value_t = WalkParams::default().drift)]
    pub drift: f64,
    /// Multiplier on the unit-Gaussian sense vectors.
    #[arg(long, default_value_t = WalkParams::default().vector_scale)]
    pub vector_scale: f64,
    /// Tokens per output sentence.
    #[arg(long, default_value_t = WalkParams::default().sentence_len)]
    pub sentence_len: usize,
}

fn parse_probs(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| usage(format!("--senses-per-word: cannot parse {p:?}"))))
        .collect()
}

pub fn run(args: &GenArgs) -> Result<()> {
    let mut run = Run::new("gen");
    let params = WalkParams {
        dim: args.dim,
        n_senses: args.senses,
        senses_per_word: parse_probs(&args.senses_per_word)?,
        steps: args.steps,
        drift: args.drift,
        vector_scale: args.vector_scale,
        sentence_len: args.sentence_len,
        seed: args.common.seed,
    };
    let (corpus, truth) = generate(&params)?;
    log::info!(
        "generated {} tokens over {} senses and {} words",
        corpus.num_tokens(),
        truth.sense_vectors.len(),
        truth.sense_to_word.values().collect::<std::collections::BTreeSet<_>>().len()
    );
    let mut w = create_output(&mut run, &args.out_dir.join("corpus.tsv"))?;
    corpus.write(&mut w)?;
    w.flush()?;
    let mut w = create_output(&mut run, &args.out_dir.join("truth.vec"))?;
    truth.sense_vectors.write(&mut w)?;
    w.flush()?;
    let mut w = create_output(&mut run, &args.out_dir.join("mapping.tsv"))?;
    truth.write_mapping(&mut w)?;
    w.flush()?;
    args.common.finish(run, args, args.out_dir.join("manifest.json"))
}
