//! Diagnostics relating embedding norms to corpus frequency.
//!
//! * [`partition_samples`]: concentration of `Z_c = Σ_v exp(c·v)` over random
//!   unit contexts `c`.
//! * [`norm_freq_correlation`]: Pearson correlation and least-squares fit of
//!   `‖v‖²` against `log f(v)`.
//! * [`bin_analysis`]: share of ambiguous words whose most frequent sense has a
//!   strictly larger norm than the runner-up, per frequency bin.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{SenseStats, WordKey};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::hogwild::stream_rng;
use crate::scalar::{dot, squared_norm, Scalar};
use crate::stats::{mean, ols, pearson, std_dev};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if !lo.is_finite() || !hi.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5e-3, hi + 0.5e-3)
        } else {
            (lo, hi)
        };
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Histogram { edges, counts }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub samples: Vec<f64>,
    pub log_samples: Vec<f64>,
    pub mean: f64,
    pub log_mean: f64,
    pub coefficient_of_variation: f64,
    /// Histogram of `Z_c / mean`.
    pub normalized_histogram: Histogram,
    pub context_norm: f64,
    /// Some `Z_c` overflowed `f64`; statistics were computed in log space.
    pub shifted: bool,
}

/// The `n` random contexts used by [`partition_samples`]: uniform directions
/// scaled to `context_norm`, sample `i` drawn from stream `(seed, i)`.
pub fn partition_contexts(dim: usize, n: usize, seed: u64, context_norm: f64) -> Vec<Vec<f64>> {
    (0..n).map(|i| random_context(dim, seed, i as u64, context_norm)).collect()
}

fn random_context(dim: usize, seed: u64, index: u64, norm: f64) -> Vec<f64> {
    let mut rng = stream_rng(seed, index);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let len = squared_norm(&v).sqrt();
        if len > 1e-12 {
            return v.into_iter().map(|x| x * norm / len).collect();
        }
    }
}

/// Returns `(log Z, Z, overflowed)` for one context.
fn partition_value<T: Scalar>(emb: &EmbeddingMatrix<T>, c: &[f64]) -> (f64, f64, bool) {
    let scores: Vec<f64> = emb.iter().map(|(_, v)| v.iter().zip(c).map(|(&a, &b)| a.as_f64() * b).sum()).collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted_sum: f64 = scores.iter().map(|s| (s - max).exp()).sum();
    let log_z = max + shifted_sum.ln();
    let z = max.exp() * shifted_sum;
    if z.is_finite() {
        let direct: f64 = scores.iter().map(|s| s.exp()).sum();
        if direct.is_finite() && direct > 0.0 {
            return (direct.ln(), direct, false);
        }
        return (log_z, z, false);
    }
    (log_z, z, true)
}

pub fn partition_samples<T: Scalar>(
    emb: &EmbeddingMatrix<T>,
    n: usize,
    seed: u64,
    context_norm: f64,
    hist_bins: usize,
) -> Result<PartitionReport> {
    if emb.is_empty() {
        return Err(Error::invalid("embedding matrix is empty"));
    }
    if n == 0 {
        return Err(Error::param("n", "must be positive"));
    }
    if !(context_norm > 0.0 && context_norm.is_finite()) {
        return Err(Error::param("context_norm", "must be positive"));
    }
    let values: Vec<(f64, f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| partition_value(emb, &random_context(emb.dim(), seed, i as u64, context_norm)))
        .collect();
    let shifted = values.iter().any(|v| v.2);
    let log_samples: Vec<f64> = values.iter().map(|v| v.0).collect();
    let samples: Vec<f64> = values.iter().map(|v| v.1).collect();
    let log_mean = crate::scalar::log_sum_exp(&log_samples) - (n as f64).ln();
    let ratios: Vec<f64> = log_samples.iter().map(|l| (l - log_mean).exp()).collect();
    // mean(ratios) is 1 up to rounding, so std(ratios) is the CV
    let coefficient_of_variation = std_dev(&ratios) / mean(&ratios);
    Ok(PartitionReport {
        normalized_histogram: Histogram::new(&ratios, hist_bins),
        samples,
        log_samples,
        mean: log_mean.exp(),
        log_mean,
        coefficient_of_variation,
        context_norm,
        shifted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPoint {
    pub key: String,
    pub frequency: u64,
    pub log_frequency: f64,
    pub squared_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub points: Vec<CorrelationPoint>,
    pub pearson_rho: f64,
    pub fit_slope: f64,
    pub fit_intercept: f64,
    pub min_freq: u64,
    /// Embedding keys without a usable frequency.
    pub skipped: usize,
}

/// Correlates natural-log counts with squared norms over keys present in both
/// inputs with count at least `min_freq`. Points follow embedding key order.
pub fn norm_freq_correlation<T: Scalar>(
    emb: &EmbeddingMatrix<T>,
    freqs: &HashMap<String, u64>,
    min_freq: u64,
) -> Result<CorrelationReport> {
    let mut points = Vec::new();
    let mut skipped = 0;
    for (key, v) in emb.iter() {
        match freqs.get(key) {
            Some(&f) if f >= min_freq.max(1) => points.push(CorrelationPoint {
                key: key.to_owned(),
                frequency: f,
                log_frequency: (f as f64).ln(),
                squared_norm: squared_norm(v).as_f64(),
            }),
            _ => skipped += 1,
        }
    }
    if points.len() < 2 {
        return Err(Error::invalid(format!("need at least 2 usable points, found {}", points.len())));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.log_frequency).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.squared_norm).collect();
    let pearson_rho = pearson(&xs, &ys);
    let (fit_slope, fit_intercept) = ols(&xs, &ys);
    Ok(CorrelationReport { points, pearson_rho, fit_slope, fit_intercept, min_freq, skipped })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBin {
    pub max_freq: u64,
    pub min_freq: u64,
    /// Ambiguous words assigned to the bin.
    pub size: usize,
    /// Words scored (both senses embedded).
    pub word_count: usize,
    pub excluded: usize,
    pub alpha: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinReport {
    pub bins: Vec<FrequencyBin>,
    pub ambiguous_words: usize,
    pub excluded: usize,
}

/// Bins ambiguous words (≥ 2 distinct senses) by total annotated frequency,
/// highest first, and counts words whose most frequent sense has a strictly
/// larger norm than the second most frequent one.
pub fn bin_analysis<T: Scalar>(stats: &SenseStats, emb: &EmbeddingMatrix<T>, n_bins: usize) -> Result<BinReport> {
    if n_bins == 0 {
        return Err(Error::param("n_bins", "must be positive"));
    }
    let mut words: Vec<(&WordKey, u64)> =
        stats.iter().filter(|(_, senses)| senses.len() >= 2).map(|(k, senses)| (k, senses.values().sum())).collect();
    if words.len() < n_bins {
        return Err(Error::invalid(format!("{} ambiguous words cannot fill {n_bins} bins", words.len())));
    }
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let base = words.len() / n_bins;
    let extra = words.len() % n_bins;
    let mut bins = Vec::with_capacity(n_bins);
    let mut start = 0;
    for b in 0..n_bins {
        let size = base + usize::from(b < extra);
        let slice = &words[start..start + size];
        start += size;
        let (mut alpha, mut scored, mut excluded) = (0, 0, 0);
        for (key, _) in slice {
            let ranked = stats.ranked(key);
            let norms = (emb.get(ranked[0].0), emb.get(ranked[1].0));
            match norms {
                (Some(m), Some(n)) => {
                    scored += 1;
                    if squared_norm(m) > squared_norm(n) {
                        alpha += 1;
                    }
                }
                _ => excluded += 1,
            }
        }
        bins.push(FrequencyBin {
            max_freq: slice[0].1,
            min_freq: slice[size - 1].1,
            size,
            word_count: scored,
            excluded,
            alpha,
            ratio: if scored == 0 { 0.0 } else { alpha as f64 / scored as f64 },
        });
    }
    let excluded = bins.iter().map(|b| b.excluded).sum();
    Ok(BinReport { bins, ambiguous_words: words.len(), excluded })
}

/// Dot products of `c` with every row, for oracles that want the raw scores.
pub fn context_scores<T: Scalar>(emb: &EmbeddingMatrix<T>, c: &[T]) -> Vec<T> {
    emb.iter().map(|(_, v)| dot(v, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, Pos, Token};

    #[test]
    fn zero_vectors_give_vocab_size() {
        let emb = EmbeddingMatrix::from_rows(vec!["a".into(), "b".into(), "c".into()], vec![0.0f64; 9], 3).unwrap();
        let r = partition_samples(&emb, 50, 1, 1.0, 10).unwrap();
        assert!(r.samples.iter().all(|&z| (z - 3.0).abs() < 1e-12));
        assert!(r.coefficient_of_variation.abs() < 1e-12);
        assert!(!r.shifted);
    }

    #[test]
    fn orthogonal_pair_in_two_dims() {
        let emb = EmbeddingMatrix::from_rows(vec!["v".into()], vec![1.0f64, 0.0], 2).unwrap();
        let (_, z, _) = partition_value(&emb, &[0.0, 1.0]);
        assert_eq!(z, 1.0);
    }

    #[test]
    fn overflow_is_flagged() {
        let emb =
            EmbeddingMatrix::from_rows(vec!["big".into(), "small".into()], vec![2000.0f64, 0.0, 0.0, 1.0], 2).unwrap();
        let r = partition_samples(&emb, 20, 3, 1.0, 5).unwrap();
        assert!(r.shifted);
        assert!(r.log_samples.iter().all(|l| l.is_finite()));
        assert!(r.coefficient_of_variation.is_finite());
    }

    #[test]
    fn correlation_needs_two_points() {
        let emb = EmbeddingMatrix::from_rows(vec!["a".into(), "b".into()], vec![1.0f64, 2.0], 1).unwrap();
        let freqs: HashMap<String, u64> = [("a".to_string(), 3)].into();
        assert!(norm_freq_correlation(&emb, &freqs, 1).is_err());
    }

    #[test]
    fn min_freq_filters_points() {
        let emb =
            EmbeddingMatrix::from_rows(vec!["a".into(), "b".into(), "c".into()], vec![1.0f64, 2.0, 3.0], 1).unwrap();
        let freqs: HashMap<String, u64> = [("a".to_string(), 1), ("b".into(), 5), ("c".into(), 9)].into();
        let r = norm_freq_correlation(&emb, &freqs, 5).unwrap();
        assert_eq!(r.points.len(), 2);
        assert_eq!(r.skipped, 1);
        assert_eq!(r.pearson_rho, 1.0);
    }

    fn annotated(pairs: &[(&str, &str, usize)]) -> Corpus {
        let mut sentence = Vec::new();
        for &(lemma, sense, n) in pairs {
            for _ in 0..n {
                sentence.push(Token::new(lemma, lemma, Pos::Noun, Some(sense.to_owned())).unwrap());
            }
        }
        Corpus::new(vec![sentence]).unwrap()
    }

    #[test]
    fn bins_strict_inequality() {
        let corpus = annotated(&[("x", "x1", 3), ("x", "x2", 1), ("y", "y1", 2), ("y", "y2", 1)]);
        let stats = SenseStats::from_corpus(&corpus);
        let emb = EmbeddingMatrix::from_rows(
            vec!["x1".into(), "x2".into(), "y1".into(), "y2".into()],
            vec![2.0f64, 1.0, 1.0, 1.0],
            1,
        )
        .unwrap();
        let r = bin_analysis(&stats, &emb, 1).unwrap();
        assert_eq!(r.bins[0].alpha, 1);
        assert_eq!(r.bins[0].ratio, 0.5);

        let emb = EmbeddingMatrix::from_rows(
            vec!["x1".into(), "x2".into(), "y1".into(), "y2".into()],
            vec![2.0f64, 1.0, 3.0, 1.0],
            1,
        )
        .unwrap();
        assert_eq!(bin_analysis(&stats, &emb, 1).unwrap().bins[0].ratio, 1.0);
    }

    #[test]
    fn bins_split_larger_first_and_count_exclusions() {
        let corpus = annotated(&[
            ("a", "a1", 9),
            ("a", "a2", 1),
            ("b", "b1", 5),
            ("b", "b2", 2),
            ("c", "c1", 2),
            ("c", "c2", 2),
            ("d", "d1", 1),
            ("d", "d2", 1),
            ("e", "e1", 4),
        ]);
        let stats = SenseStats::from_corpus(&corpus);
        let emb = EmbeddingMatrix::from_rows(
            vec!["a1".into(), "a2".into(), "b1".into(), "c1".into(), "c2".into(), "d1".into(), "d2".into()],
            vec![1.0f64; 7],
            1,
        )
        .unwrap();
        let r = bin_analysis(&stats, &emb, 3).unwrap();
        assert_eq!(r.ambiguous_words, 4);
        assert_eq!(r.bins.iter().map(|b| b.size).collect::<Vec<_>>(), vec![2, 1, 1]);
        assert_eq!((r.bins[0].max_freq, r.bins[0].min_freq), (10, 7));
        assert_eq!(r.excluded, 1);
        assert_eq!(r.bins.iter().map(|b| b.word_count).sum::<usize>() + r.excluded, 4);
        assert!(bin_analysis(&stats, &emb, 5).is_err());
    }
}
