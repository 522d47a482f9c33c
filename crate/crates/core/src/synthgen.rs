//! Sense-annotated corpora drawn from a log-linear random-walk model.
//!
//! A unit context vector `c` drifts over the sphere and at every step emits a
//! sense `s` with probability `exp(c·s) / Σ_s' exp(c·s')`. Senses are grouped
//! into words, so each emitted token carries both a surface word and the
//! sense that produced it. Because the sense vectors are known, the corpus is
//! a ground truth for the norm/log-frequency law.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Pos, Token};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, squared_norm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub dim: usize,
    pub n_senses: usize,
    /// Relative weights of a word having 1, 2, ... senses.
    pub senses_per_word: Vec<f64>,
    pub steps: usize,
    /// Interpolation weight of the fresh random direction in each step.
    pub drift: f64,
    /// Standard deviation of the Gaussian sense-vector components.
    pub vector_scale: f64,
    /// Tokens per emitted sentence.
    pub sentence_len: usize,
    pub seed: u64,
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams {
            dim: 10,
            n_senses: 2000,
            senses_per_word: vec![0.4, 0.3, 0.2, 0.1],
            steps: 1_000_000,
            drift: 0.1,
            vector_scale: 1.0,
            sentence_len: 100,
            seed: 0,
        }
    }
}

impl WalkParams {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::param("dim", "must be at least 2"));
        }
        if self.n_senses == 0 {
            return Err(Error::param("n_senses", "must be positive"));
        }
        if self.steps == 0 {
            return Err(Error::param("steps", "must be positive"));
        }
        if !(self.drift > 0.0 && self.drift <= 1.0) {
            return Err(Error::param("drift", "must lie in (0, 1]"));
        }
        if !(self.vector_scale > 0.0 && self.vector_scale.is_finite()) {
            return Err(Error::param("vector_scale", "must be positive and finite"));
        }
        if self.sentence_len == 0 {
            return Err(Error::param("sentence_len", "must be positive"));
        }
        if self.senses_per_word.is_empty()
            || self.senses_per_word.iter().any(|w| !(w.is_finite() && *w >= 0.0))
            || self.senses_per_word.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::param("senses_per_word", "needs non-negative weights with a positive sum"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub sense_vectors: EmbeddingMatrix<f64>,
    /// Sense id → word, in sense-vector order.
    pub sense_to_word: BTreeMap<String, String>,
}

impl GroundTruth {
    /// Writes the `sense<TAB>word` sidecar, one line per sense in vector order.
    pub fn write_mapping<W: Write>(&self, mut w: W) -> Result<()> {
        for key in self.sense_vectors.keys() {
            writeln!(w, "{key}\t{}", self.sense_to_word[key])?;
        }
        Ok(())
    }

    pub fn read_mapping<R: BufRead>(reader: R) -> Result<BTreeMap<String, String>> {
        let mut map = BTreeMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (sense, word) =
                line.split_once('\t').ok_or_else(|| Error::parse(idx + 1, "expected `sense<TAB>word`"))?;
            map.insert(sense.to_owned(), word.to_owned());
        }
        Ok(map)
    }
}

fn unit_gaussian(rng: &mut impl Rng, out: &mut [f64]) {
    loop {
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let n = squared_norm(out).sqrt();
        if n > 1e-12 {
            out.iter_mut().for_each(|x| *x /= n);
            return;
        }
    }
}

/// Context vector drifting on the unit sphere:
/// `c ← normalize((1 − κ)·c + κ·g)` with `g` uniform on the sphere.
#[derive(Clone, Debug)]
pub struct ContextWalk {
    context: Vec<f64>,
    fresh: Vec<f64>,
    drift: f64,
}

impl ContextWalk {
    pub fn new(dim: usize, drift: f64, rng: &mut impl Rng) -> Self {
        let mut context = vec![0.0; dim];
        unit_gaussian(rng, &mut context);
        ContextWalk { context, fresh: vec![0.0; dim], drift }
    }

    pub fn context(&self) -> &[f64] {
        &self.context
    }

    pub fn advance(&mut self, rng: &mut impl Rng) {
        unit_gaussian(rng, &mut self.fresh);
        let keep = 1.0 - self.drift;
        for (c, g) in self.context.iter_mut().zip(&self.fresh) {
            *c = keep * *c + self.drift * g;
        }
        let norm = squared_norm(&self.context).sqrt();
        if norm > 1e-12 {
            self.context.iter_mut().for_each(|c| *c /= norm);
        } else {
            self.context.copy_from_slice(&self.fresh);
        }
    }
}

fn assign_words(params: &WalkParams, rng: &mut impl Rng) -> Vec<(String, String)> {
    let dist = WeightedIndex::new(&params.senses_per_word).expect("validated weights");
    let mut groups = Vec::new();
    let mut remaining = params.n_senses;
    while remaining > 0 {
        let k = (dist.sample(rng) + 1).min(remaining);
        groups.push(k);
        remaining -= k;
    }
    let width = groups.len().to_string().len();
    let mut out = Vec::with_capacity(params.n_senses);
    for (w, &k) in groups.iter().enumerate() {
        let word = format!("w{w:0width$}");
        for j in 1..=k {
            out.push((format!("{word}%{j}"), word.clone()));
        }
    }
    out
}

/// Runs the random walk and returns the corpus with its generating vectors.
///
/// Deterministic for a given `params` (including the seed).
pub fn generate(params: &WalkParams) -> Result<(Corpus, GroundTruth)> {
    params.validate()?;
    let d = params.dim;
    let n = params.n_senses;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let senses = assign_words(params, &mut rng);
    let mut vectors = vec![0.0f64; n * d];
    for x in vectors.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *x = params.vector_scale * z;
    }

    let mut walk = ContextWalk::new(d, params.drift, &mut rng);
    let mut weights = vec![0.0; n];
    let mut emitted = Vec::with_capacity(params.steps);
    for _ in 0..params.steps {
        let mut max = f64::NEG_INFINITY;
        for (w, s) in weights.iter_mut().zip(vectors.chunks_exact(d)) {
            let l: f64 = s.iter().zip(walk.context()).map(|(a, b)| a * b).sum();
            *w = l;
            max = max.max(l);
        }
        let mut total = 0.0;
        for w in weights.iter_mut() {
            *w = (*w - max).exp();
            total += *w;
        }
        let mut u = rng.random::<f64>() * total;
        let mut pick = n - 1;
        for (i, &w) in weights.iter().enumerate() {
            if u < w {
                pick = i;
                break;
            }
            u -= w;
        }
        emitted.push(pick);
        walk.advance(&mut rng);
    }

    let mut sentences = Vec::with_capacity(params.steps.div_ceil(params.sentence_len));
    for chunk in emitted.chunks(params.sentence_len) {
        let sentence = chunk
            .iter()
            .map(|&i| {
                let (sense, word) = &senses[i];
                Token::new(word.as_str(), word.as_str(), Pos::Noun, Some(sense.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        sentences.push(sentence);
    }
    let corpus = Corpus::new(sentences)?;

    let keys: Vec<String> = senses.iter().map(|(s, _)| s.clone()).collect();
    let sense_vectors = EmbeddingMatrix::from_rows(keys, vectors, d)?;
    let sense_to_word = senses.into_iter().collect();
    Ok((corpus, GroundTruth { sense_vectors, sense_to_word }))
}

/// `log p(s) = ‖s‖² / (2d) − log Z'` with `Z'` normalising over the senses.
pub fn closed_form_logp(gt: &GroundTruth, d: usize) -> BTreeMap<String, f64> {
    let scale = 1.0 / (2.0 * d as f64);
    let scores: Vec<f64> = gt.sense_vectors.iter().map(|(_, v)| squared_norm(v) * scale).collect();
    let log_z = log_sum_exp(&scores);
    gt.sense_vectors.keys().iter().zip(scores).map(|(k, s)| (k.clone(), s - log_z)).collect()
}
