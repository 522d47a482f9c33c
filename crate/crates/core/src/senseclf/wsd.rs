//! Word sense disambiguation as binary classification over candidate senses.
//!
//! Each candidate sense of an instance is described by the cosine between the
//! instance's contextual vector and the sense vector, optionally followed by
//! the sense's norm under a second (frequency-bearing) embedding. The gold
//! sense is a positive row and every other candidate a negative one; at
//! inference the candidate with the highest positive probability wins.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ContextStore, NormLookup};
use crate::corpus::{build_inventory, Corpus, Pos, SenseInventory};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::logreg::LogRegModel;
use crate::scalar::{cosine, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WsdInstance {
    pub instance_id: String,
    pub lemma: String,
    pub pos: Pos,
    pub gold: Option<String>,
    /// Sorted, duplicate-free.
    pub candidates: Vec<String>,
}

impl WsdInstance {
    pub fn new(
        instance_id: impl Into<String>,
        lemma: impl Into<String>,
        pos: Pos,
        gold: Option<String>,
        mut candidates: Vec<String>,
    ) -> Result<Self> {
        candidates.sort();
        candidates.dedup();
        if candidates.is_empty() {
            return Err(Error::invalid("WSD instance needs at least one candidate"));
        }
        if let Some(g) = &gold {
            if candidates.binary_search(g).is_err() {
                return Err(Error::invalid(format!("gold sense {g} is not a candidate")));
            }
        }
        Ok(WsdInstance { instance_id: instance_id.into(), lemma: lemma.into(), pos, gold, candidates })
    }
}

/// Instances for every token carrying an instance id.
///
/// Candidates come from `inventory` (plus the token's own gold sense). Gold is
/// the token's annotation unless `gold_keys` supplies one; with several keys
/// the first is used. Tokens with neither candidates nor gold are counted in
/// the second return value.
pub fn instances_from_corpus(
    corpus: &Corpus,
    inventory: &SenseInventory,
    gold_keys: Option<&BTreeMap<String, Vec<String>>>,
) -> (Vec<WsdInstance>, usize) {
    let mut out = Vec::new();
    let mut skipped = 0;
    for tok in corpus.tokens() {
        let Some(id) = tok.instance_id() else { continue };
        let gold = match gold_keys {
            Some(keys) => keys.get(id).and_then(|k| k.first().cloned()),
            None => tok.sense_id().map(str::to_owned),
        };
        let mut candidates: Vec<String> =
            inventory.candidates(tok.lemma(), tok.pos()).map(<[_]>::to_vec).unwrap_or_default();
        if let Some(g) = &gold {
            candidates.push(g.clone());
        }
        match WsdInstance::new(id, tok.lemma(), tok.pos(), gold, candidates) {
            Ok(inst) => out.push(inst),
            Err(_) => skipped += 1,
        }
    }
    (out, skipped)
}

/// Unlabelled instances for evaluation: candidates come only from
/// `inventory`, so annotations in `corpus` cannot leak into them. Ids with no
/// inventory entry are returned separately.
pub fn candidate_instances(corpus: &Corpus, inventory: &SenseInventory) -> (Vec<WsdInstance>, Vec<String>) {
    let mut out = Vec::new();
    let mut uncovered = Vec::new();
    for tok in corpus.tokens() {
        let Some(id) = tok.instance_id() else { continue };
        let candidates = inventory.candidates(tok.lemma(), tok.pos()).map(<[_]>::to_vec).unwrap_or_default();
        match WsdInstance::new(id, tok.lemma(), tok.pos(), None, candidates) {
            Ok(inst) => out.push(inst),
            Err(_) => uncovered.push(id.to_owned()),
        }
    }
    (out, uncovered)
}

pub fn feature_names<T: Scalar>(norms: Option<&NormLookup<'_, T>>) -> Vec<String> {
    let mut names = vec!["cosine".to_string()];
    if let Some(n) = norms {
        names.push(match n.form() {
            super::NormForm::Squared => "squared_norm".into(),
            super::NormForm::Plain => "norm".into(),
        });
    }
    names
}

/// Feature row for one candidate; the flag reports an imputed norm.
pub fn wsd_features<T: Scalar>(
    inst: &WsdInstance,
    sense: &str,
    ctx: &ContextStore<T>,
    model_emb: &EmbeddingMatrix<T>,
    norms: Option<&NormLookup<'_, T>>,
) -> Result<(Vec<T>, bool)> {
    let t = ctx
        .get(&inst.instance_id)
        .ok_or_else(|| Error::invalid(format!("no contextual vector for {}", inst.instance_id)))?;
    let s = model_emb.get(sense).ok_or_else(|| Error::invalid(format!("no sense vector for {sense}")))?;
    if t.len() != s.len() {
        return Err(Error::invalid(format!("contextual dim {} differs from sense dim {}", t.len(), s.len())));
    }
    let mut row = vec![cosine(t, s)];
    let mut imputed = false;
    if let Some(n) = norms {
        let (v, imp) = n.get(sense);
        row.push(v);
        imputed = imp;
    }
    Ok((row, imputed))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WsdTrainingSet<T> {
    pub x: Vec<Vec<T>>,
    pub y: Vec<bool>,
    pub feature_names: Vec<String>,
    pub instances_used: usize,
    pub skipped_no_context: usize,
    pub skipped_no_gold: usize,
    pub skipped_candidates: usize,
    pub imputed_rows: usize,
}

/// One positive row per usable instance and one negative row per other
/// candidate that has a sense vector.
pub fn build_training_rows<T: Scalar>(
    instances: &[WsdInstance],
    ctx: &ContextStore<T>,
    model_emb: &EmbeddingMatrix<T>,
    norms: Option<&NormLookup<'_, T>>,
) -> WsdTrainingSet<T> {
    let mut set = WsdTrainingSet { feature_names: feature_names(norms), ..Default::default() };
    for inst in instances {
        if !ctx.contains(&inst.instance_id) {
            set.skipped_no_context += 1;
            continue;
        }
        let Some(gold) = inst.gold.as_deref().filter(|g| model_emb.contains(g)) else {
            set.skipped_no_gold += 1;
            continue;
        };
        set.instances_used += 1;
        for cand in &inst.candidates {
            match wsd_features(inst, cand, ctx, model_emb, norms) {
                Ok((row, imputed)) => {
                    set.imputed_rows += usize::from(imputed);
                    set.x.push(row);
                    set.y.push(cand == gold);
                }
                Err(_) => set.skipped_candidates += 1,
            }
        }
    }
    set
}

/// Builds the inventory and instances from an annotated corpus and extracts
/// the training rows.
pub fn wsd_build_training<T: Scalar>(
    corpus: &Corpus,
    ctx: &ContextStore<T>,
    model_emb: &EmbeddingMatrix<T>,
    norms: Option<&NormLookup<'_, T>>,
) -> Result<WsdTrainingSet<T>> {
    let inventory = build_inventory(corpus)?;
    let (instances, _) = instances_from_corpus(corpus, &inventory, None);
    Ok(build_training_rows(&instances, ctx, model_emb, norms))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WsdPrediction<T> {
    pub instance_id: String,
    pub sense: String,
    pub probability: Option<T>,
    /// No candidate could be scored; the first candidate was returned.
    pub backed_off: bool,
    pub imputed: bool,
}

pub fn wsd_predict<T: Scalar>(
    inst: &WsdInstance,
    model: &LogRegModel<T>,
    ctx: &ContextStore<T>,
    model_emb: &EmbeddingMatrix<T>,
    norms: Option<&NormLookup<'_, T>>,
) -> WsdPrediction<T> {
    let mut best: Option<(&str, T, bool)> = None;
    for cand in &inst.candidates {
        if let Ok((row, imputed)) = wsd_features(inst, cand, ctx, model_emb, norms) {
            let p = model.probability(&row);
            if best.is_none_or(|(_, b, _)| p > b) {
                best = Some((cand, p, imputed));
            }
        }
    }
    match best {
        Some((sense, p, imputed)) => WsdPrediction {
            instance_id: inst.instance_id.clone(),
            sense: sense.to_owned(),
            probability: Some(p),
            backed_off: false,
            imputed,
        },
        None => WsdPrediction {
            instance_id: inst.instance_id.clone(),
            sense: inst.candidates[0].clone(),
            probability: None,
            backed_off: true,
            imputed: false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::senseclf::NormForm;

    fn store(rows: &[(&str, &[f64])]) -> ContextStore<f64> {
        let mut s = ContextStore::new(rows[0].1.len()).unwrap();
        for (k, v) in rows {
            s.insert(*k, v).unwrap();
        }
        s
    }

    fn emb(rows: &[(&str, &[f64])]) -> EmbeddingMatrix<f64> {
        let mut e = EmbeddingMatrix::new(rows[0].1.len()).unwrap();
        for (k, v) in rows {
            e.push(*k, v).unwrap();
        }
        e
    }

    fn inst(cands: &[&str], gold: &str) -> WsdInstance {
        WsdInstance::new("i1", "bank", Pos::Noun, Some(gold.into()), cands.iter().map(|s| s.to_string()).collect())
            .unwrap()
    }

    #[test]
    fn hand_computed_features() {
        let ctx = store(&[("i1", &[1.0, 2.0, 2.0])]);
        let model = emb(&[("A", &[2.0, 0.0, 0.0]), ("P", &[2.0, 4.0, 4.0]), ("O", &[0.0, 1.0, -1.0])]);
        let lookup = NormLookup::new(&model, NormForm::Squared);
        let i = inst(&["A", "O", "P"], "A");
        let (row, imputed) = wsd_features(&i, "A", &ctx, &model, Some(&lookup)).unwrap();
        assert!((row[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(row[1], 4.0);
        assert!(!imputed);
        assert!((wsd_features(&i, "P", &ctx, &model, None).unwrap().0[0] - 1.0).abs() < 1e-15);
        assert_eq!(wsd_features(&i, "O", &ctx, &model, None).unwrap().0[0], 0.0);
    }

    #[test]
    fn missing_norm_is_imputed_and_flagged() {
        let ctx = store(&[("i1", &[1.0, 0.0])]);
        let model = emb(&[("A", &[1.0, 0.0])]);
        let norm_emb = emb(&[("Z", &[3.0, 0.0]), ("Y", &[1.0, 0.0])]);
        let lookup = NormLookup::new(&norm_emb, NormForm::Squared);
        let (row, imputed) = wsd_features(&inst(&["A"], "A"), "A", &ctx, &model, Some(&lookup)).unwrap();
        assert_eq!(row[1], 5.0);
        assert!(imputed);
    }

    #[test]
    fn row_construction() {
        let ctx = store(&[("i1", &[1.0, 0.0])]);
        let model = emb(&[("A", &[1.0, 0.0]), ("B", &[0.0, 1.0]), ("C", &[1.0, 1.0])]);
        let set = build_training_rows(&[inst(&["A", "B", "C"], "B")], &ctx, &model, None);
        assert_eq!(set.y, vec![false, true, false]);
        let set = build_training_rows(&[inst(&["A"], "A")], &ctx, &model, None);
        assert_eq!(set.y, vec![true]);
        let missing = WsdInstance::new("nope", "bank", Pos::Noun, Some("A".into()), vec!["A".into()]).unwrap();
        assert_eq!(build_training_rows(&[missing], &ctx, &model, None).skipped_no_context, 1);
    }

    #[test]
    fn evaluation_candidates_ignore_annotations() {
        let tok = crate::corpus::Token::new("bank", "bank", Pos::Noun, Some("bank%9".into()))
            .unwrap()
            .with_instance("t0")
            .unwrap();
        let other = crate::corpus::Token::new("river", "river", Pos::Noun, None).unwrap().with_instance("t1").unwrap();
        let corpus = Corpus::new(vec![vec![tok, other]]).unwrap();
        let inv = SenseInventory::from_entries(vec![(
            crate::corpus::WordKey::new("bank", Pos::Noun),
            vec!["bank%1", "bank%2"],
        )])
        .unwrap();
        let (insts, uncovered) = candidate_instances(&corpus, &inv);
        assert_eq!(insts[0].candidates, vec!["bank%1".to_string(), "bank%2".to_string()]);
        assert_eq!(insts[0].gold, None);
        assert_eq!(uncovered, vec!["t1".to_string()]);
    }

    #[test]
    fn gold_must_be_candidate() {
        assert!(WsdInstance::new("i", "x", Pos::Noun, Some("Z".into()), vec!["A".into()]).is_err());
        assert!(WsdInstance::new("i", "x", Pos::Noun, None, vec![]).is_err());
    }

    #[test]
    fn back_off_without_scoreable_candidates() {
        let ctx = store(&[("other", &[1.0, 0.0])]);
        let model = emb(&[("A", &[1.0, 0.0])]);
        let m = LogRegModel {
            weights: vec![1.0],
            bias: 0.0,
            feature_names: vec!["cosine".into()],
            standardization: None,
            iterations: 0,
            converged: true,
        };
        let p = wsd_predict(&inst(&["B", "A"], "A"), &m, &ctx, &model, None);
        assert!(p.backed_off);
        assert_eq!(p.sense, "A");
        let single = inst(&["A"], "A");
        let ctx = store(&[("i1", &[0.0, 1.0])]);
        assert_eq!(wsd_predict(&single, &m, &ctx, &model, None).sense, "A");
    }
}
