use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, ValueEnum};
use sensenorm::convert::read_embeddings_any;
use sensenorm::senseclf::ContextStore;
use sensenorm::{Corpus, EmbeddingMatrix, Scalar, SenseInventory};
use serde::Serialize;

use crate::io::open_input;
use crate::manifest::Run;

pub mod analyze;
pub mod classify;
pub mod convert;
pub mod gen;
pub mod train;

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Serialize)]
pub struct Common {
    /// Random seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; with 1 every output is bit-reproducible.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// File of `key = value` lines used as defaults for this subcommand's flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Where to write the run manifest [default: `<main output>.manifest.json`].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

impl Common {
    pub fn finish<A: Serialize>(&self, run: Run, args: &A, default_manifest: PathBuf) -> Result<()> {
        let path = self.manifest.clone().unwrap_or(default_manifest);
        run.finish(serde_json::to_value(args)?, self.seed, self.workers, &path)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F32,
    F64,
}

/// Which token field forms the training stream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Stream {
    /// Sense ids, falling back to the surface form for unannotated tokens.
    #[default]
    Sense,
    /// Surface forms.
    Word,
}

impl Stream {
    pub fn of(self, corpus: &Corpus) -> Vec<Vec<String>> {
        match self {
            Stream::Sense => corpus.sense_stream(),
            Stream::Word => corpus.word_stream(),
        }
    }
}

pub fn read_corpus(run: &mut Run, path: &Path) -> Result<Corpus> {
    let c = Corpus::parse(open_input(run, path)?)?;
    log::info!("{}: {} sentences, {} tokens", path.display(), c.sentences().len(), c.num_tokens());
    Ok(c)
}

/// Reads vectors with or without the `<count> <dim>` header.
pub fn read_embeddings<T: Scalar>(run: &mut Run, path: &Path) -> Result<EmbeddingMatrix<T>> {
    let e = read_embeddings_any(open_input(run, path)?)?;
    log::info!("{}: {} vectors of dim {}", path.display(), e.len(), e.dim());
    Ok(e)
}

pub fn read_contexts(run: &mut Run, path: &Path) -> Result<ContextStore<f64>> {
    Ok(ContextStore::read(open_input(run, path)?)?)
}

pub fn read_inventory(run: &mut Run, path: &Path) -> Result<SenseInventory> {
    Ok(SenseInventory::read(open_input(run, path)?)?)
}
