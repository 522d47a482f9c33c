//! Word-in-context classification.
//!
//! A pair is described by four cosines, between the selected sense vectors
//! `(s1, s2)`, the contextual vectors `(t1, t2)` and each context with its own
//! sense `(s1, t1)`, `(s2, t2)`, plus an optional norm feature.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{ContextStore, NormLookup};
use crate::corpus::{Pos, SenseInventory};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::logreg::LogRegModel;
use crate::scalar::{cosine, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WicPair {
    pub word: String,
    pub pos: Pos,
    pub index1: usize,
    pub index2: usize,
    pub sentence1: String,
    pub sentence2: String,
    pub instance1: String,
    pub instance2: String,
    /// `true` when the word carries the same sense in both contexts.
    pub gold: Option<bool>,
}

impl WicPair {
    /// Instance ids of the `k`-th pair (0-based) in a file tagged `prefix`.
    pub fn instance_ids(prefix: &str, k: usize) -> (String, String) {
        (format!("{prefix}:{k}:1"), format!("{prefix}:{k}:2"))
    }
}

/// Reads `word<TAB>pos<TAB>i1-i2<TAB>sentence1<TAB>sentence2` lines. Token
/// indices are 0-based over whitespace tokens.
pub fn read_wic_pairs<R: BufRead>(reader: R, prefix: &str) -> Result<Vec<WicPair>> {
    let mut pairs = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(Error::parse(n + 1, format!("expected 5 tab-separated fields, found {}", f.len())));
        }
        let (a, b) = f[2].split_once('-').ok_or_else(|| Error::parse(n + 1, "index field must be `i1-i2`"))?;
        let parse_idx =
            |s: &str| s.trim().parse::<usize>().map_err(|_| Error::parse(n + 1, format!("bad index {s:?}")));
        let (index1, index2) = (parse_idx(a)?, parse_idx(b)?);
        for (idx, sent) in [(index1, f[3]), (index2, f[4])] {
            let len = sent.split_whitespace().count();
            if idx >= len {
                return Err(Error::parse(n + 1, format!("index {idx} out of range for {len} tokens")));
            }
        }
        let (instance1, instance2) = WicPair::instance_ids(prefix, pairs.len());
        pairs.push(WicPair {
            word: f[0].to_owned(),
            pos: Pos::from_tag(f[1]),
            index1,
            index2,
            sentence1: f[3].to_owned(),
            sentence2: f[4].to_owned(),
            instance1,
            instance2,
            gold: None,
        });
    }
    Ok(pairs)
}

/// Reads one `T` or `F` per line.
pub fn read_wic_gold<R: BufRead>(reader: R) -> Result<Vec<bool>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        match line.trim() {
            "" => {}
            "T" => out.push(true),
            "F" => out.push(false),
            other => return Err(Error::parse(n + 1, format!("expected T or F, found {other:?}"))),
        }
    }
    Ok(out)
}

pub fn attach_gold(pairs: &mut [WicPair], gold: &[bool]) -> Result<()> {
    if pairs.len() != gold.len() {
        return Err(Error::Misaligned(format!("{} pairs but {} gold labels", pairs.len(), gold.len())));
    }
    for (p, g) in pairs.iter_mut().zip(gold) {
        p.gold = Some(*g);
    }
    Ok(())
}

/// Which resolved sense supplies the norm feature.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// The sense selected for the first context.
    #[default]
    First,
    /// Average over both selected senses.
    Mean,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SenseSelection {
    /// Candidate maximising cosine with the contextual vector.
    #[default]
    NearestCosine,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WicOptions {
    pub norm_mode: NormMode,
    pub selection: SenseSelection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WicFeatures<T> {
    pub values: Vec<T>,
    pub sense1: Option<String>,
    pub sense2: Option<String>,
    /// A context had no candidate with a vector and used its own contextual
    /// vector in place of a sense vector.
    pub fallback: bool,
    pub imputed: bool,
}

pub fn feature_names<T: Scalar>(norms: Option<&NormLookup<'_, T>>) -> Vec<String> {
    let mut names: Vec<String> =
        ["cos_s1_s2", "cos_t1_t2", "cos_s1_t1", "cos_s2_t2"].iter().map(|s| s.to_string()).collect();
    if let Some(n) = norms {
        names.push(match n.form() {
            super::NormForm::Squared => "squared_norm".into(),
            super::NormForm::Plain => "norm".into(),
        });
    }
    names
}

/// Candidate senses from the inventory, or every key of `model_emb` of the
/// form `word%...` when the inventory has no entry.
fn candidates<'a, T: Scalar>(
    pair: &WicPair,
    inventory: Option<&'a SenseInventory>,
    model_emb: &'a EmbeddingMatrix<T>,
) -> Vec<&'a str> {
    if let Some(c) = inventory.and_then(|inv| inv.candidates(&pair.word, pair.pos)) {
        return c.iter().map(String::as_str).collect();
    }
    let prefix = format!("{}%", pair.word.to_lowercase());
    let mut out: Vec<&str> = model_emb.keys().iter().map(String::as_str).filter(|k| k.starts_with(&prefix)).collect();
    out.sort_unstable();
    out
}

fn select_sense<'a, T: Scalar>(
    t: &[T],
    cands: &[&'a str],
    model_emb: &'a EmbeddingMatrix<T>,
) -> Option<(&'a str, &'a [T])> {
    let mut best: Option<(&str, &[T], T)> = None;
    for &c in cands {
        if let Some(s) = model_emb.get(c) {
            let score = cosine(t, s);
            if best.is_none_or(|(_, _, b)| score > b) {
                best = Some((c, s, score));
            }
        }
    }
    best.map(|(c, s, _)| (c, s))
}

pub fn wic_features<T: Scalar>(
    pair: &WicPair,
    inventory: Option<&SenseInventory>,
    ctx: &ContextStore<T>,
    model_emb: &EmbeddingMatrix<T>,
    norms: Option<&NormLookup<'_, T>>,
    opts: &WicOptions,
) -> Result<WicFeatures<T>> {
    let get = |id: &str| ctx.get(id).ok_or_else(|| Error::invalid(format!("no contextual vector for {id}")));
    let (t1, t2) = (get(&pair.instance1)?, get(&pair.instance2)?);
    if t1.len() != model_emb.dim() {
        return Err(Error::invalid(format!("contextual dim {} differs from sense dim {}", t1.len(), model_emb.dim())));
    }
    let cands = candidates(pair, inventory, model_emb);
    let sel1 = select_sense(t1, &cands, model_emb);
    let sel2 = select_sense(t2, &cands, model_emb);
    let s1 = sel1.map_or(t1, |(_, v)| v);
    let s2 = sel2.map_or(t2, |(_, v)| v);
    let mut values = vec![cosine(s1, s2), cosine(t1, t2), cosine(s1, t1), cosine(s2, t2)];
    let mut imputed = false;
    if let Some(n) = norms {
        let lookup = |sel: Option<(&str, &[T])>| match sel {
            Some((sense, _)) => n.get(sense),
            None => (n.imputed_value(), true),
        };
        let (v1, i1) = lookup(sel1);
        let v = match opts.norm_mode {
            NormMode::First => {
                imputed = i1;
                v1
            }
            NormMode::Mean => {
                let (v2, i2) = lookup(sel2);
                imputed = i1 || i2;
                (v1 + v2) / T::of(2.0)
            }
        };
        values.push(v);
    }
    Ok(WicFeatures {
        values,
        sense1: sel1.map(|(s, _)| s.to_owned()),
        sense2: sel2.map(|(s, _)| s.to_owned()),
        fallback: sel1.is_none() || sel2.is_none(),
        imputed,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WicTrainingSet<T> {
    pub x: Vec<Vec<T>>,
    pub y: Vec<bool>,
    pub feature_names: Vec<String>,
    pub skipped: usize,
    pub fallbacks: usize,
    pub imputed: usize,
}

/// Rows for every labelled pair whose contextual vectors are present.
pub fn wic_build_training<T: Scalar>(
    pairs: &[WicPair],
    inventory: Option<&SenseInventory>,
    ctx: &ContextStore<T>,
    model_emb: &EmbeddingMatrix<T>,
    norms: Option<&NormLookup<'_, T>>,
    opts: &WicOptions,
) -> WicTrainingSet<T> {
    let mut set = WicTrainingSet { feature_names: feature_names(norms), ..Default::default() };
    for p in pairs {
        let Some(gold) = p.gold else {
            set.skipped += 1;
            continue;
        };
        match wic_features(p, inventory, ctx, model_emb, norms, opts) {
            Ok(f) => {
                set.fallbacks += usize::from(f.fallback);
                set.imputed += usize::from(f.imputed);
                set.x.push(f.values);
                set.y.push(gold);
            }
            Err(_) => set.skipped += 1,
        }
    }
    set
}

/// Predicts `same sense` when the positive probability exceeds one half.
/// Pairs that cannot be featurised are predicted `false`.
pub fn wic_predict<T: Scalar>(
    pairs: &[WicPair],
    model: &LogRegModel<T>,
    inventory: Option<&SenseInventory>,
    ctx: &ContextStore<T>,
    model_emb: &EmbeddingMatrix<T>,
    norms: Option<&NormLookup<'_, T>>,
    opts: &WicOptions,
) -> Vec<bool> {
    pairs
        .iter()
        .map(|p| {
            wic_features(p, inventory, ctx, model_emb, norms, opts).map(|f| model.predict(&f.values)).unwrap_or(false)
        })
        .collect()
}
