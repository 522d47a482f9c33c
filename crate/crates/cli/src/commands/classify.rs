use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use sensenorm::logreg::{train_logreg, LogRegConfig};
use sensenorm::senseclf::eval::wsd_metrics;
use sensenorm::senseclf::wic::{attach_gold, read_wic_gold, read_wic_pairs, wic_build_training, wic_features};
use sensenorm::senseclf::wsd::{candidate_instances, wsd_build_training, wsd_predict};
use sensenorm::senseclf::{
    read_keys, wic_accuracy, write_keys, NormForm, NormLookup, NormMode, WicOptions, WsdMetrics,
};
use sensenorm::{build_inventory, Embeddings, LogReg};
use serde::Serialize;

use super::{read_contexts, read_corpus, read_embeddings, read_inventory, Common};
use crate::io::{create_output, open_input, write_json};
use crate::manifest::{default_path, Run};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NormFormArg {
    #[default]
    Squared,
    Plain,
}

impl From<NormFormArg> for NormForm {
    fn from(f: NormFormArg) -> Self {
        match f {
            NormFormArg::Squared => NormForm::Squared,
            NormFormArg::Plain => NormForm::Plain,
        }
    }
}

/// Classifier flags shared by `wsd` and `wic`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct ClassifierArgs {
    /// Sense vectors in the contextual space, used for the cosine features.
    #[arg(long)]
    pub model_emb: PathBuf,
    /// Static sense vectors whose norm is added as a feature.
    #[arg(long)]
    pub norm_emb: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub norm_form: NormFormArg,
    /// Inverse regularisation strength.
    #[arg(long, default_value_t = LogRegConfig::default().c)]
    pub c: f64,
    /// Fit on raw feature values.
    #[arg(long)]
    pub no_standardize: bool,
    /// Write the fitted model as JSON.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

impl ClassifierArgs {
    fn logreg(&self) -> LogRegConfig {
        LogRegConfig { c: self.c, standardize: !self.no_standardize, ..LogRegConfig::default() }
    }

    fn load(&self, run: &mut Run) -> Result<(Embeddings, Option<Embeddings>)> {
        let model = read_embeddings::<f64>(run, &self.model_emb)?;
        let norms = match &self.norm_emb {
            Some(p) => Some(read_embeddings::<f64>(run, p)?),
            None => None,
        };
        Ok((model, norms))
    }

    fn save_model(&self, run: &mut Run, model: &LogReg) -> Result<()> {
        if let Some(p) = &self.model_out {
            let mut w = create_output(run, p)?;
            serde_json::to_writer_pretty(&mut w, model)?;
            w.flush()?;
        }
        Ok(())
    }
}

#[derive(Args, Debug, Serialize)]
pub struct WsdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub classifier: ClassifierArgs,
    /// Annotated training corpus TSV with instance ids.
    #[arg(long)]
    pub train_corpus: PathBuf,
    /// Contextual vectors for the training instances.
    #[arg(long)]
    pub train_contexts: PathBuf,
    /// Evaluation corpus TSV with instance ids.
    #[arg(long)]
    pub eval_corpus: PathBuf,
    /// Contextual vectors for the evaluation instances.
    #[arg(long)]
    pub eval_contexts: PathBuf,
    /// Candidate senses [default: inventory of the training corpus].
    #[arg(long)]
    pub inventory: Option<PathBuf>,
    /// Gold key file [default: annotations of the evaluation corpus].
    #[arg(long)]
    pub gold_keys: Option<PathBuf>,
    /// Key file of predictions.
    #[arg(long)]
    pub predictions: PathBuf,
    /// JSON report [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct WsdTrainingSummary {
    rows: usize,
    positives: usize,
    instances_used: usize,
    skipped_no_context: usize,
    skipped_no_gold: usize,
    skipped_candidates: usize,
    imputed_rows: usize,
}

#[derive(Serialize)]
struct WsdEvalSummary {
    instances: usize,
    uncovered: usize,
    backed_off: usize,
    imputed: usize,
    metrics: Option<WsdMetrics>,
}

#[derive(Serialize)]
struct WsdReport {
    model: LogReg,
    training: WsdTrainingSummary,
    evaluation: WsdEvalSummary,
}

pub fn run_wsd(args: &WsdArgs) -> Result<()> {
    let mut run = Run::new("wsd");
    let (model_emb, norm_emb) = args.classifier.load(&mut run)?;
    let norms = norm_emb.as_ref().map(|e| NormLookup::new(e, args.classifier.norm_form.into()));
    let train = read_corpus(&mut run, &args.train_corpus)?;
    let train_ctx = read_contexts(&mut run, &args.train_contexts)?;
    let set = wsd_build_training(&train, &train_ctx, &model_emb, norms.as_ref())?;
    log::info!("{} training rows from {} instances", set.x.len(), set.instances_used);
    let model = train_logreg(&set.x, &set.y, set.feature_names.clone(), &args.classifier.logreg())?;
    args.classifier.save_model(&mut run, &model)?;

    let eval = read_corpus(&mut run, &args.eval_corpus)?;
    let eval_ctx = read_contexts(&mut run, &args.eval_contexts)?;
    let inventory = match &args.inventory {
        Some(p) => read_inventory(&mut run, p)?,
        None => build_inventory(&train)?,
    };
    let (instances, uncovered) = candidate_instances(&eval, &inventory);
    if !uncovered.is_empty() {
        log::warn!("{} evaluation instances have no candidate senses", uncovered.len());
    }
    let preds: Vec<_> =
        instances.iter().map(|i| wsd_predict(i, &model, &eval_ctx, &model_emb, norms.as_ref())).collect();
    let mut w = create_output(&mut run, &args.predictions)?;
    write_keys(&mut w, preds.iter().map(|p| (p.instance_id.as_str(), p.sense.as_str())))?;
    w.flush()?;

    let gold: BTreeMap<String, Vec<String>> = match &args.gold_keys {
        Some(p) => read_keys(open_input(&mut run, p)?)?,
        None => {
            eval.tokens().filter_map(|t| Some((t.instance_id()?.to_owned(), vec![t.sense_id()?.to_owned()]))).collect()
        }
    };
    let metrics = if gold.is_empty() {
        None
    } else {
        let by_id: BTreeMap<String, String> = preds.iter().map(|p| (p.instance_id.clone(), p.sense.clone())).collect();
        let m = wsd_metrics(&by_id, &gold)?;
        log::info!("F1 {:.2} over {} gold instances", m.all.f1, m.all.gold);
        Some(m)
    };
    let report = WsdReport {
        training: WsdTrainingSummary {
            rows: set.x.len(),
            positives: set.y.iter().filter(|&&y| y).count(),
            instances_used: set.instances_used,
            skipped_no_context: set.skipped_no_context,
            skipped_no_gold: set.skipped_no_gold,
            skipped_candidates: set.skipped_candidates,
            imputed_rows: set.imputed_rows,
        },
        evaluation: WsdEvalSummary {
            instances: instances.len() + uncovered.len(),
            uncovered: uncovered.len(),
            backed_off: preds.iter().filter(|p| p.backed_off).count(),
            imputed: preds.iter().filter(|p| p.imputed).count(),
            metrics,
        },
        model,
    };
    write_json(&mut run, args.out.as_ref(), &report)?;
    args.common.finish(run, args, default_path("wsd", args.out.as_ref()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NormModeArg {
    /// Norm of the sense selected for the first sentence.
    #[default]
    First,
    /// Mean over both selected senses.
    Mean,
}

#[derive(Args, Debug, Serialize)]
pub struct WicArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub classifier: ClassifierArgs,
    /// Training pairs (`word pos index1-index2 sentence1 sentence2`, tab-separated).
    #[arg(long)]
    pub train_pairs: PathBuf,
    /// One `T` or `F` per training pair.
    #[arg(long)]
    pub train_gold: PathBuf,
    /// Contextual vectors keyed `<train-prefix>:<k>:1` and `:2`.
    #[arg(long)]
    pub train_contexts: PathBuf,
    #[arg(long, default_value = "train")]
    pub train_prefix: String,
    #[arg(long)]
    pub eval_pairs: PathBuf,
    /// Gold labels for the evaluation pairs; enables accuracy.
    #[arg(long)]
    pub eval_gold: Option<PathBuf>,
    #[arg(long)]
    pub eval_contexts: PathBuf,
    #[arg(long, default_value = "eval")]
    pub eval_prefix: String,
    #[arg(long, value_enum, default_value_t)]
    pub norm_mode: NormModeArg,
    /// Candidate senses [default: vector keys prefixed `<word>%`].
    #[arg(long)]
    pub inventory: Option<PathBuf>,
    /// One `T` or `F` per evaluation pair.
    #[arg(long)]
    pub predictions: PathBuf,
    /// JSON report [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct WicTrainingSummary {
    rows: usize,
    positives: usize,
    skipped: usize,
    fallbacks: usize,
    imputed: usize,
}

#[derive(Serialize)]
struct WicEvalSummary {
    pairs: usize,
    unfeaturised: usize,
    fallbacks: usize,
    imputed: usize,
    accuracy: Option<f64>,
}

#[derive(Serialize)]
struct WicReport {
    model: LogReg,
    training: WicTrainingSummary,
    evaluation: WicEvalSummary,
}

pub fn run_wic(args: &WicArgs) -> Result<()> {
    let mut run = Run::new("wic");
    let (model_emb, norm_emb) = args.classifier.load(&mut run)?;
    let norms = norm_emb.as_ref().map(|e| NormLookup::new(e, args.classifier.norm_form.into()));
    let inventory = match &args.inventory {
        Some(p) => Some(read_inventory(&mut run, p)?),
        None => None,
    };
    let opts = WicOptions {
        norm_mode: match args.norm_mode {
            NormModeArg::First => NormMode::First,
            NormModeArg::Mean => NormMode::Mean,
        },
        ..WicOptions::default()
    };

    let mut train = read_wic_pairs(open_input(&mut run, &args.train_pairs)?, &args.train_prefix)?;
    attach_gold(&mut train, &read_wic_gold(open_input(&mut run, &args.train_gold)?)?)?;
    let train_ctx = read_contexts(&mut run, &args.train_contexts)?;
    let set = wic_build_training(&train, inventory.as_ref(), &train_ctx, &model_emb, norms.as_ref(), &opts);
    log::info!("{} training rows, {} skipped", set.x.len(), set.skipped);
    let model = train_logreg(&set.x, &set.y, set.feature_names.clone(), &args.classifier.logreg())?;
    args.classifier.save_model(&mut run, &model)?;

    let mut eval = read_wic_pairs(open_input(&mut run, &args.eval_pairs)?, &args.eval_prefix)?;
    let eval_ctx = read_contexts(&mut run, &args.eval_contexts)?;
    let mut summary = WicEvalSummary { pairs: eval.len(), unfeaturised: 0, fallbacks: 0, imputed: 0, accuracy: None };
    let mut predicted = Vec::with_capacity(eval.len());
    for pair in &eval {
        match wic_features(pair, inventory.as_ref(), &eval_ctx, &model_emb, norms.as_ref(), &opts) {
            Ok(f) => {
                summary.fallbacks += usize::from(f.fallback);
                summary.imputed += usize::from(f.imputed);
                predicted.push(model.predict(&f.values));
            }
            Err(e) => {
                log::debug!("{}: {e}", pair.instance1);
                summary.unfeaturised += 1;
                predicted.push(false);
            }
        }
    }
    let mut w = create_output(&mut run, &args.predictions)?;
    for &p in &predicted {
        writeln!(w, "{}", if p { "T" } else { "F" })?;
    }
    w.flush()?;
    if let Some(p) = &args.eval_gold {
        let gold = read_wic_gold(open_input(&mut run, p)?)?;
        attach_gold(&mut eval, &gold)?;
        let acc = wic_accuracy(&predicted, &gold)?;
        log::info!("accuracy {acc:.2} over {} pairs", gold.len());
        summary.accuracy = Some(acc);
    }
    let report = WicReport {
        training: WicTrainingSummary {
            rows: set.x.len(),
            positives: set.y.iter().filter(|&&y| y).count(),
            skipped: set.skipped,
            fallbacks: set.fallbacks,
            imputed: set.imputed,
        },
        evaluation: summary,
        model,
    };
    write_json(&mut run, args.out.as_ref(), &report)?;
    args.common.finish(run, args, default_path("wic", args.out.as_ref()))
}
