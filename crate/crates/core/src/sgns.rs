//! Skip-gram with negative sampling.
//!
//! Follows the reference word2vec trainer: uniformly shrunk windows,
//! frequent-token subsampling, a unigram^0.75 noise distribution and a
//! learning rate decaying linearly to `initial_lr * 1e-4`. The returned
//! vectors are the input-side matrix.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::IdMap;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::hogwild::{stream_rng, SharedRows};
use crate::scalar::{dot, sigmoid, softplus, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SgnsConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_count: u64,
    pub subsample_threshold: f64,
    pub workers: usize,
    pub seed: u64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 300,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_count: 1,
            subsample_threshold: 1e-3,
            workers: 1,
            seed: 1,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("dim", self.dim),
            ("window", self.window),
            ("negatives", self.negatives),
            ("epochs", self.epochs),
            ("workers", self.workers),
        ] {
            if v == 0 {
                return Err(Error::param(name, "must be positive"));
            }
        }
        if self.min_count == 0 {
            return Err(Error::param("min_count", "must be positive"));
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(Error::param("initial_lr", "must be positive"));
        }
        if !(self.subsample_threshold >= 0.0 && self.subsample_threshold.is_finite()) {
            return Err(Error::param("subsample_threshold", "must be non-negative"));
        }
        Ok(())
    }
}

/// Loss and gradients of `-log σ(label · target·context)` for one pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairGradient<T> {
    pub loss: T,
    pub grad_target: Vec<T>,
    pub grad_context: Vec<T>,
}

/// `(loss, g)` for a pair with score `x = target·context`, where the gradient
/// w.r.t. target is `g · context` and w.r.t. context is `g · target`.
#[inline]
pub fn sgns_pair_coefficients<T: Scalar>(score: T, label: T) -> (T, T) {
    let loss = softplus(-label * score);
    let g = -label * sigmoid(-label * score);
    (loss, g)
}

pub fn sgns_pair_objective<T: Scalar>(target: &[T], context: &[T], label: T) -> PairGradient<T> {
    assert_eq!(target.len(), context.len(), "target and context differ in dimension");
    debug_assert!(label == T::one() || label == -T::one());
    let (loss, g) = sgns_pair_coefficients(dot(target, context), label);
    PairGradient {
        loss,
        grad_target: context.iter().map(|&c| g * c).collect(),
        grad_context: target.iter().map(|&t| g * t).collect(),
    }
}

#[derive(Clone, Debug)]
pub struct SgnsOutput<T> {
    pub embeddings: EmbeddingMatrix<T>,
    /// Mean loss per (center, context) pair, positive plus negatives, per epoch.
    pub epoch_loss: Vec<f64>,
}

struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    #[inline]
    fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.random::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }
}

struct Prepared {
    vocab: IdMap,
    counts: Vec<u64>,
    sentences: Vec<Vec<u32>>,
    total_words: u64,
}

fn prepare(stream: &[Vec<String>], min_count: u64) -> Result<Prepared> {
    let mut raw: HashMap<String, u64> = HashMap::new();
    for tok in stream.iter().flatten() {
        *raw.entry(tok.clone()).or_default() += 1;
    }
    raw.retain(|_, c| *c >= min_count);
    if raw.len() < 2 {
        return Err(Error::invalid(format!(
            "stream has {} distinct tokens with count >= {min_count}; need at least 2",
            raw.len()
        )));
    }
    let vocab = IdMap::from_counts(&raw);
    let counts: Vec<u64> = vocab.keys().iter().map(|k| raw[k]).collect();
    let sentences: Vec<Vec<u32>> = stream
        .iter()
        .map(|s| s.iter().filter_map(|t| vocab.id(t).map(|i| i as u32)).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    let total_words = counts.iter().sum();
    Ok(Prepared { vocab, counts, sentences, total_words })
}

struct Worker<'a, T> {
    cfg: &'a SgnsConfig,
    input: SharedRows<'a, T>,
    output: SharedRows<'a, T>,
    noise: &'a NoiseTable,
    keep_prob: &'a [f64],
    processed: &'a AtomicU64,
    total_work: f64,
}

impl<T: Scalar> Worker<'_, T> {
    fn run(&self, sentences: &[Vec<u32>], rng: &mut impl Rng) -> (f64, u64) {
        let dim = self.cfg.dim;
        let min_lr = self.cfg.initial_lr * 1e-4;
        let mut hidden_err = vec![T::zero(); dim];
        let mut kept: Vec<u32> = Vec::new();
        let mut loss_sum = 0.0;
        let mut pairs = 0u64;
        for sentence in sentences {
            let done = self.processed.fetch_add(sentence.len() as u64, Ordering::Relaxed);
            let lr = (self.cfg.initial_lr * (1.0 - done as f64 / self.total_work)).max(min_lr);
            let lr = T::of(lr);

            kept.clear();
            kept.extend(sentence.iter().copied().filter(|&w| {
                let p = self.keep_prob[w as usize];
                p >= 1.0 || rng.random::<f64>() < p
            }));

            for (pos, &center) in kept.iter().enumerate() {
                let shrink = rng.random_range(0..self.cfg.window);
                let reach = self.cfg.window - shrink;
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(kept.len() - 1);
                for (ctx_pos, &ctx_word) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                    if ctx_pos == pos {
                        continue;
                    }
                    // SAFETY: input and output are distinct buffers; each row
                    // reference is dropped before the next one is taken.
                    let l1 = unsafe { self.input.row_mut(ctx_word as usize) };
                    hidden_err.iter_mut().for_each(|e| *e = T::zero());
                    for k in 0..=self.cfg.negatives {
                        let (target, label) = if k == 0 {
                            (center, T::one())
                        } else {
                            let t = self.noise.sample(rng) as u32;
                            if t == center {
                                continue;
                            }
                            (t, -T::one())
                        };
                        let out = unsafe { self.output.row_mut(target as usize) };
                        let (loss, g) = sgns_pair_coefficients(dot(l1, out), label);
                        loss_sum += loss.as_f64();
                        let step = -lr * g;
                        for ((e, o), &x) in hidden_err.iter_mut().zip(out.iter_mut()).zip(l1.iter()) {
                            *e += step * *o;
                            *o += step * x;
                        }
                    }
                    for (x, &e) in l1.iter_mut().zip(&hidden_err) {
                        *x += e;
                    }
                    pairs += 1;
                }
            }
        }
        (loss_sum, pairs)
    }
}

/// Trains skip-gram vectors over per-sentence token lists.
pub fn train_sgns<T: Scalar>(stream: &[Vec<String>], cfg: &SgnsConfig) -> Result<SgnsOutput<T>> {
    cfg.validate()?;
    let prep = prepare(stream, cfg.min_count)?;
    let n = prep.vocab.len();
    let dim = cfg.dim;

    let mut init_rng = stream_rng(cfg.seed, 0);
    let half = 0.5 / dim as f64;
    let mut input: Vec<T> = (0..n * dim).map(|_| T::of(init_rng.random_range(-half..half))).collect();
    let mut output: Vec<T> = vec![T::zero(); n * dim];

    let keep_prob: Vec<f64> = prep
        .counts
        .iter()
        .map(|&c| {
            if cfg.subsample_threshold == 0.0 {
                1.0
            } else {
                let t = cfg.subsample_threshold * prep.total_words as f64;
                ((c as f64 / t).sqrt() + 1.0) * t / c as f64
            }
        })
        .collect();
    let noise = NoiseTable::new(&prep.counts);
    let processed = AtomicU64::new(0);
    let total_work = (cfg.epochs as u64 * prep.total_words + 1) as f64;

    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    {
        let worker = Worker {
            cfg,
            input: SharedRows::new(&mut input, dim),
            output: SharedRows::new(&mut output, dim),
            noise: &noise,
            keep_prob: &keep_prob,
            processed: &processed,
            total_work,
        };
        for epoch in 0..cfg.epochs {
            let base = 1 + (epoch * cfg.workers) as u64;
            let (loss, pairs) = if cfg.workers == 1 {
                worker.run(&prep.sentences, &mut stream_rng(cfg.seed, base))
            } else {
                let acc = Mutex::new((0.0, 0u64));
                let chunk = prep.sentences.len().div_ceil(cfg.workers).max(1);
                std::thread::scope(|scope| {
                    for (w, part) in prep.sentences.chunks(chunk).enumerate() {
                        let worker = &worker;
                        let acc = &acc;
                        scope.spawn(move || {
                            let r = worker.run(part, &mut stream_rng(cfg.seed, base + w as u64));
                            let mut a = acc.lock().expect("loss accumulator");
                            a.0 += r.0;
                            a.1 += r.1;
                        });
                    }
                });
                acc.into_inner().expect("loss accumulator")
            };
            epoch_loss.push(if pairs == 0 { 0.0 } else { loss / pairs as f64 });
        }
    }

    let embeddings = EmbeddingMatrix::from_rows(prep.vocab.keys().to_vec(), input, dim)?;
    Ok(SgnsOutput { embeddings, epoch_loss })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alternating(n: usize) -> Vec<Vec<String>> {
        (0..n).map(|_| (0..20).map(|i| if i % 2 == 0 { "a".to_string() } else { "b".to_string() }).collect()).collect()
    }

    fn small_cfg() -> SgnsConfig {
        SgnsConfig { dim: 8, epochs: 5, subsample_threshold: 0.0, ..Default::default() }
    }

    #[test]
    fn zero_score_positive_pair() {
        let t = [1.0f64, 0.0];
        let c = [0.0f64, 2.0];
        let g = sgns_pair_objective(&t, &c, 1.0);
        assert!((g.loss - 2f64.ln()).abs() < 1e-15);
        assert_eq!(g.grad_target, vec![-0.0, -1.0]);
        let flipped = sgns_pair_objective(&t, &c, -1.0);
        assert_eq!(flipped.grad_target, vec![0.0, 1.0]);
        assert!((flipped.loss - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn finite_difference_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-5;
        for _ in 0..100 {
            let t: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
            let c: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
            let label = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let g = sgns_pair_objective(&t, &c, label);
            let f = |t: &[f64], c: &[f64]| softplus(-label * dot(t, c));
            for i in 0..10 {
                let mut tp = t.clone();
                let mut tm = t.clone();
                tp[i] += h;
                tm[i] -= h;
                let fd = (f(&tp, &c) - f(&tm, &c)) / (2.0 * h);
                assert!((fd - g.grad_target[i]).abs() <= 1e-5 * fd.abs().max(g.grad_target[i].abs()).max(1e-3));
            }
        }
    }

    #[test]
    fn two_token_stream_learns() {
        let out = train_sgns::<f64>(&alternating(200), &small_cfg()).unwrap();
        assert_eq!(out.embeddings.len(), 2);
        assert!(out.embeddings.as_slice().iter().all(|x| x.is_finite()));
        assert!(out.epoch_loss.last().unwrap() < out.epoch_loss.first().unwrap());
        for (_, v) in out.embeddings.iter() {
            assert!(crate::scalar::squared_norm(v) > 0.0);
        }
    }

    #[test]
    fn reproducible_with_one_worker() {
        let a = train_sgns::<f32>(&alternating(50), &small_cfg()).unwrap();
        let b = train_sgns::<f32>(&alternating(50), &small_cfg()).unwrap();
        assert_eq!(a.embeddings, b.embeddings);
        assert_eq!(a.epoch_loss, b.epoch_loss);
    }

    #[test]
    fn min_count_filters_vocabulary() {
        let mut stream = alternating(10);
        stream.push(vec!["rare".into(), "a".into()]);
        let cfg = SgnsConfig { min_count: 2, ..small_cfg() };
        let out = train_sgns::<f64>(&stream, &cfg).unwrap();
        assert!(!out.embeddings.contains("rare"));
        assert_eq!(out.embeddings.keys(), ["a", "b"]);
    }

    #[test]
    fn tiny_stream_errors() {
        let stream = vec![vec!["a".to_string(), "a".to_string()]];
        assert!(train_sgns::<f64>(&stream, &small_cfg()).is_err());
        assert!(train_sgns::<f64>(&alternating(2), &SgnsConfig { dim: 0, ..small_cfg() }).is_err());
    }

    #[test]
    fn parallel_workers_produce_finite_vectors() {
        let cfg = SgnsConfig { workers: 3, ..small_cfg() };
        let out = train_sgns::<f32>(&alternating(90), &cfg).unwrap();
        assert!(out.embeddings.as_slice().iter().all(|x| x.is_finite()));
    }
}
