use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use sensenorm::convert::{convert_embeddings, corpus_from_xml};
use sensenorm::senseclf::read_keys;
use serde::Serialize;

use super::Common;
use crate::io::{create_output, open_input, usage};
use crate::manifest::{default_path, Run};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConvertKind {
    /// Unified-framework XML (plus optional gold keys) to corpus TSV.
    Xml,
    /// Vector file with or without a header to the headed format.
    Embeddings,
}

#[derive(Args, Debug, Serialize)]
pub struct ConvertArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kind: ConvertKind,
    #[arg(long)]
    pub input: PathBuf,
    /// Gold key file annotating the XML instances.
    #[arg(long)]
    pub gold_keys: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &ConvertArgs) -> Result<()> {
    let mut run = Run::new("convert");
    match args.kind {
        ConvertKind::Xml => {
            let gold = match &args.gold_keys {
                Some(p) => read_keys(open_input(&mut run, p)?)?,
                None => BTreeMap::new(),
            };
            let corpus = corpus_from_xml(open_input(&mut run, &args.input)?, &gold)?;
            log::info!("{} sentences, {} tokens", corpus.sentences().len(), corpus.num_tokens());
            let mut w = create_output(&mut run, &args.out)?;
            corpus.write(&mut w)?;
            w.flush()?;
        }
        ConvertKind::Embeddings => {
            if args.gold_keys.is_some() {
                return Err(usage("--gold-keys applies only to --kind xml"));
            }
            let input = open_input(&mut run, &args.input)?;
            let mut w = create_output(&mut run, &args.out)?;
            let n = convert_embeddings(input, &mut w)?;
            w.flush()?;
            log::info!("{n} vectors written");
        }
    }
    args.common.finish(run, args, default_path("convert", Some(&args.out)))
}
