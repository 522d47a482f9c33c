//! Most-frequent-sense prediction by largest squared norm.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{gold_mfs, Corpus, Pos, SenseInventory, SenseStats, WordKey};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::hogwild::stream_rng;
use crate::scalar::{squared_norm, Scalar};
use crate::stats::{mean, std_dev};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Subset {
    AllWords,
    NounSample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfsEvalConfig {
    pub subset: Subset,
    /// Minimum total annotated occurrences of the lemma for the noun sample.
    pub noun_sample_min_freq: u64,
    pub seed: u64,
    pub random_trials: usize,
}

impl Default for MfsEvalConfig {
    fn default() -> Self {
        MfsEvalConfig { subset: Subset::AllWords, noun_sample_min_freq: 3, seed: 0, random_trials: 100 }
    }
}

/// Candidate of `(lemma, pos)` with the largest squared norm; candidates
/// without a vector are skipped and exact ties go to the smaller sense id.
pub fn predict_mfs<'a, T: Scalar>(
    lemma: &str,
    pos: Pos,
    inventory: &'a SenseInventory,
    emb: &EmbeddingMatrix<T>,
) -> Result<&'a str> {
    let candidates = inventory
        .candidates(lemma, pos)
        .ok_or_else(|| Error::UnknownWord { lemma: lemma.to_owned(), pos: pos.to_string() })?;
    let mut best: Option<(&str, T)> = None;
    for s in candidates {
        if let Some(v) = emb.get(s) {
            let n = squared_norm(v);
            if best.is_none_or(|(_, b)| n > b) {
                best = Some((s, n));
            }
        }
    }
    best.map(|(s, _)| s).ok_or_else(|| Error::NoVectors { lemma: lemma.to_owned(), pos: pos.to_string() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfsRecord {
    pub lemma: String,
    pub pos: Pos,
    pub candidates: usize,
    pub frequency: u64,
    pub gold: String,
    pub gold_tied: bool,
    pub predicted: String,
    pub correct: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub evaluated: usize,
    pub correct: usize,
    pub accuracy: f64,
}

impl Score {
    fn add(&mut self, correct: bool) {
        self.evaluated += 1;
        self.correct += usize::from(correct);
        self.accuracy = 100.0 * self.correct as f64 / self.evaluated as f64;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfsReport {
    pub subset: Subset,
    pub noun_sample_min_freq: u64,
    /// What the noun-sample threshold is applied to.
    pub threshold_basis: String,
    /// Percentage over evaluated words.
    pub accuracy: f64,
    pub overall: Score,
    pub per_pos: BTreeMap<Pos, Score>,
    pub gold_ties: usize,
    pub excluded_no_vectors: usize,
    pub excluded_no_gold: usize,
    pub records: Vec<MfsRecord>,
}

struct EvalWord<'a> {
    key: &'a WordKey,
    candidates: &'a [String],
    frequency: u64,
}

fn evaluation_set<'a>(stats: &SenseStats, inventory: &'a SenseInventory, cfg: &MfsEvalConfig) -> Vec<EvalWord<'a>> {
    inventory
        .iter()
        .filter(|(_, c)| c.len() >= 2)
        .map(|(key, candidates)| EvalWord { key, candidates, frequency: stats.total(key) })
        .filter(|w| match cfg.subset {
            Subset::AllWords => true,
            Subset::NounSample => w.key.pos == Pos::Noun && w.frequency >= cfg.noun_sample_min_freq,
        })
        .collect()
}

pub fn evaluate_mfs<T: Scalar>(
    corpus: &Corpus,
    inventory: &SenseInventory,
    emb: &EmbeddingMatrix<T>,
    cfg: &MfsEvalConfig,
) -> Result<MfsReport> {
    if cfg.noun_sample_min_freq == 0 {
        return Err(Error::param("noun_sample_min_freq", "must be at least 1"));
    }
    let gold = gold_mfs(corpus)?;
    let stats = SenseStats::from_corpus(corpus);
    let mut report = MfsReport {
        subset: cfg.subset,
        noun_sample_min_freq: cfg.noun_sample_min_freq,
        threshold_basis: "total annotated occurrences of lemma+pos".into(),
        accuracy: 0.0,
        overall: Score::default(),
        per_pos: BTreeMap::new(),
        gold_ties: 0,
        excluded_no_vectors: 0,
        excluded_no_gold: 0,
        records: Vec::new(),
    };
    for w in evaluation_set(&stats, inventory, cfg) {
        let Some(g) = gold.get(w.key) else {
            report.excluded_no_gold += 1;
            continue;
        };
        let predicted = match predict_mfs(&w.key.lemma, w.key.pos, inventory, emb) {
            Ok(p) => p,
            Err(Error::NoVectors { .. }) => {
                report.excluded_no_vectors += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let correct = predicted == g.sense;
        report.overall.add(correct);
        report.per_pos.entry(w.key.pos).or_default().add(correct);
        report.gold_ties += usize::from(g.tied);
        report.records.push(MfsRecord {
            lemma: w.key.lemma.clone(),
            pos: w.key.pos,
            candidates: w.candidates.len(),
            frequency: w.frequency,
            gold: g.sense.clone(),
            gold_tied: g.tied,
            predicted: predicted.to_owned(),
            correct,
        });
    }
    if report.overall.evaluated == 0 {
        return Err(Error::invalid("MFS evaluation set is empty"));
    }
    report.accuracy = report.overall.accuracy;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomBaseline {
    /// Mean accuracy (percent) over trials.
    pub mean: f64,
    pub std_dev: f64,
    pub trials: usize,
    /// Closed-form expectation `100 · mean_w [gold ∈ C_w] / |C_w|`.
    pub expected: f64,
    pub words: usize,
}

/// Uniform choice among each word's candidates, averaged over trials.
pub fn random_baseline(corpus: &Corpus, inventory: &SenseInventory, cfg: &MfsEvalConfig) -> Result<RandomBaseline> {
    if cfg.random_trials == 0 {
        return Err(Error::param("random_trials", "must be positive"));
    }
    let gold = gold_mfs(corpus)?;
    let stats = SenseStats::from_corpus(corpus);
    let words: Vec<(&[String], &str)> = evaluation_set(&stats, inventory, cfg)
        .into_iter()
        .filter_map(|w| gold.get(w.key).map(|g| (w.candidates, g.sense.as_str())))
        .collect();
    if words.is_empty() {
        return Err(Error::invalid("MFS evaluation set is empty"));
    }
    let n = words.len() as f64;
    let expected = 100.0
        * words.iter().map(|(c, g)| if c.iter().any(|s| s == g) { 1.0 / c.len() as f64 } else { 0.0 }).sum::<f64>()
        / n;
    let accs: Vec<f64> = (0..cfg.random_trials)
        .map(|t| {
            let mut rng = stream_rng(cfg.seed, t as u64);
            let hits = words.iter().filter(|(c, g)| c[rng.random_range(0..c.len())] == *g).count();
            100.0 * hits as f64 / n
        })
        .collect();
    Ok(RandomBaseline {
        mean: mean(&accs),
        std_dev: std_dev(&accs),
        trials: cfg.random_trials,
        expected,
        words: words.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_inventory, Token};

    fn inv() -> SenseInventory {
        SenseInventory::from_entries(vec![
            (WordKey::new("bank", Pos::Noun), vec!["A", "B"]),
            (WordKey::new("solo", Pos::Noun), vec!["S"]),
        ])
        .unwrap()
    }

    fn emb(rows: &[(&str, f64)]) -> EmbeddingMatrix<f64> {
        EmbeddingMatrix::from_rows(
            rows.iter().map(|r| r.0.to_string()).collect(),
            rows.iter().map(|r| r.1).collect(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn argmax_norm() {
        let e = emb(&[("A", 2.0), ("B", 1.0), ("S", 0.1)]);
        assert_eq!(predict_mfs("bank", Pos::Noun, &inv(), &e).unwrap(), "A");
        assert_eq!(predict_mfs("solo", Pos::Noun, &inv(), &e).unwrap(), "S");
    }

    #[test]
    fn exact_tie_goes_lexicographic_and_missing_vectors_skip() {
        let e = emb(&[("A", -1.0), ("B", 1.0)]);
        assert_eq!(predict_mfs("bank", Pos::Noun, &inv(), &e).unwrap(), "A");
        let e = emb(&[("B", 0.5)]);
        assert_eq!(predict_mfs("bank", Pos::Noun, &inv(), &e).unwrap(), "B");
    }

    #[test]
    fn errors_distinguish_unknown_from_unembedded() {
        let e = emb(&[("Z", 1.0)]);
        assert!(matches!(predict_mfs("river", Pos::Noun, &inv(), &e), Err(Error::UnknownWord { .. })));
        assert!(matches!(predict_mfs("bank", Pos::Noun, &inv(), &e), Err(Error::NoVectors { .. })));
    }

    fn two_sense_corpus() -> Corpus {
        let mut s = Vec::new();
        for (lemma, sense, n) in [("x", "x1", 3), ("x", "x2", 1), ("y", "y1", 1), ("y", "y2", 2), ("z", "z1", 1)] {
            for _ in 0..n {
                s.push(Token::new(lemma, lemma, Pos::Noun, Some(sense.to_string())).unwrap());
            }
        }
        Corpus::new(vec![s]).unwrap()
    }

    #[test]
    fn evaluate_counts_and_subsets() {
        let c = two_sense_corpus();
        let inv = build_inventory(&c).unwrap();
        let e = emb(&[("x1", 3.0), ("x2", 1.0), ("y1", 3.0), ("y2", 1.0), ("z1", 1.0)]);
        let r = evaluate_mfs(&c, &inv, &e, &MfsEvalConfig::default()).unwrap();
        assert_eq!(r.overall.evaluated, 2);
        assert_eq!(r.accuracy, 50.0);
        let cfg = MfsEvalConfig { subset: Subset::NounSample, noun_sample_min_freq: 4, ..Default::default() };
        let r = evaluate_mfs(&c, &inv, &e, &cfg).unwrap();
        assert_eq!(r.overall.evaluated, 1);
        assert_eq!(r.accuracy, 100.0);
    }

    #[test]
    fn two_sense_random_expectation_is_half() {
        let c = two_sense_corpus();
        let inv = build_inventory(&c).unwrap();
        let cfg = MfsEvalConfig { random_trials: 2000, ..Default::default() };
        let b = random_baseline(&c, &inv, &cfg).unwrap();
        assert_eq!(b.expected, 50.0);
        assert!((b.mean - 50.0).abs() < 2.0);
    }
}
