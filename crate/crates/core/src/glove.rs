//! Windowed co-occurrence counting and GloVe training.
//!
//! The objective is `Σ f(X_ij) (w_i·w̃_j + b_i + b̃_j − log X_ij)²` with
//! `f(x) = min(1, (x/x_max)^α)`, minimised by AdaGrad over shuffled table
//! entries. Output vectors are `w_i + w̃_i`.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::IdMap;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::hogwild::{stream_rng, SharedRows};
use crate::scalar::{dot, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoocEntry {
    pub focus: u32,
    pub context: u32,
    pub weight: f64,
}

/// Sparse co-occurrence table sorted by `(focus, context)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoocTable {
    vocab: IdMap,
    entries: Vec<CoocEntry>,
}

impl CoocTable {
    pub fn vocab(&self) -> &IdMap {
        &self.vocab
    }

    pub fn entries(&self) -> &[CoocEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, focus: &str, context: &str) -> Option<f64> {
        let f = self.vocab.id(focus)? as u32;
        let c = self.vocab.id(context)? as u32;
        self.entries.binary_search_by(|e| (e.focus, e.context).cmp(&(f, c))).ok().map(|i| self.entries[i].weight)
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Writes `focus<TAB>context<TAB>weight` lines.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.entries {
            writeln!(w, "{}\t{}\t{}", self.vocab.key(e.focus as usize), self.vocab.key(e.context as usize), e.weight)?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut raw: Vec<(String, String, f64)> = Vec::new();
        let mut order: Vec<String> = Vec::new();
        let mut seen: HashMap<String, u64> = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 {
                return Err(Error::parse(idx + 1, "expected focus<TAB>context<TAB>weight"));
            }
            let weight: f64 = f[2].parse().map_err(|_| Error::parse(idx + 1, format!("bad weight {:?}", f[2])))?;
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::parse(idx + 1, "weight must be positive and finite"));
            }
            for k in [f[0], f[1]] {
                if !seen.contains_key(k) {
                    // rank by first appearance so ids follow file order
                    seen.insert(k.to_owned(), u64::MAX - order.len() as u64);
                    order.push(k.to_owned());
                }
            }
            raw.push((f[0].to_owned(), f[1].to_owned(), weight));
        }
        let vocab = IdMap::from_counts(&seen);
        let mut entries: Vec<CoocEntry> = raw
            .into_iter()
            .map(|(a, b, w)| CoocEntry {
                focus: vocab.id(&a).expect("seen") as u32,
                context: vocab.id(&b).expect("seen") as u32,
                weight: w,
            })
            .collect();
        entries.sort_by_key(|e| (e.focus, e.context));
        if entries.windows(2).any(|w| (w[0].focus, w[0].context) == (w[1].focus, w[1].context)) {
            return Err(Error::invalid("duplicate (focus, context) pair in co-occurrence file"));
        }
        Ok(CoocTable { vocab, entries })
    }
}

/// Accumulates `1/distance` for every ordered pair within `window` tokens of
/// the same sentence, in both directions.
pub fn build_cooc(stream: &[Vec<String>], window: usize) -> Result<CoocTable> {
    if window == 0 {
        return Err(Error::param("window", "must be positive"));
    }
    let mut counts: HashMap<String, u64> = HashMap::new();
    for t in stream.iter().flatten() {
        *counts.entry(t.clone()).or_default() += 1;
    }
    if counts.is_empty() {
        return Err(Error::invalid("cannot count co-occurrences of an empty stream"));
    }
    let vocab = IdMap::from_counts(&counts);
    let mut acc: HashMap<u64, f64> = HashMap::new();
    for sentence in stream {
        let ids: Vec<u32> = sentence.iter().map(|t| vocab.id(t).expect("counted") as u32).collect();
        for (i, &a) in ids.iter().enumerate() {
            for (k, &b) in ids[i + 1..].iter().take(window).enumerate() {
                let w = 1.0 / (k + 1) as f64;
                *acc.entry((a as u64) << 32 | b as u64).or_default() += w;
                *acc.entry((b as u64) << 32 | a as u64).or_default() += w;
            }
        }
    }
    let mut entries: Vec<CoocEntry> =
        acc.into_iter().map(|(k, weight)| CoocEntry { focus: (k >> 32) as u32, context: k as u32, weight }).collect();
    entries.sort_by_key(|e| (e.focus, e.context));
    Ok(CoocTable { vocab, entries })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GloveConfig {
    pub dim: usize,
    pub window: usize,
    pub x_max: f64,
    pub alpha: f64,
    pub epochs: usize,
    pub initial_lr: f64,
    pub workers: usize,
    pub seed: u64,
}

impl Default for GloveConfig {
    fn default() -> Self {
        GloveConfig {
            dim: 300,
            window: 10,
            x_max: 100.0,
            alpha: 0.75,
            epochs: 30,
            initial_lr: 0.05,
            workers: 2,
            seed: 1,
        }
    }
}

impl GloveConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("dim", self.dim), ("window", self.window), ("epochs", self.epochs), ("workers", self.workers)]
        {
            if v == 0 {
                return Err(Error::param(name, "must be positive"));
            }
        }
        if !(self.x_max > 0.0 && self.x_max.is_finite()) {
            return Err(Error::param("x_max", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param("alpha", "must lie in (0, 1]"));
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(Error::param("initial_lr", "must be positive"));
        }
        Ok(())
    }
}

/// `min(1, (x / x_max)^α)`.
#[inline]
pub fn glove_weight(x: f64, x_max: f64, alpha: f64) -> f64 {
    if x >= x_max {
        1.0
    } else {
        (x / x_max).powf(alpha)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GloveGradient<T> {
    pub loss: T,
    pub grad_wi: Vec<T>,
    pub grad_wj: Vec<T>,
    pub grad_bi: T,
    pub grad_bj: T,
}

/// `(loss, g)` where every gradient is `g` times the partner factor
/// (`w̃_j` for `w_i`, `w_i` for `w̃_j`, `1` for either bias).
#[inline]
pub fn glove_pair_coefficients<T: Scalar>(score: T, bi: T, bj: T, log_x: T, weight: T) -> (T, T) {
    let diff = score + bi + bj - log_x;
    (weight * diff * diff, T::of(2.0) * weight * diff)
}

pub fn glove_pair_objective<T: Scalar>(
    wi: &[T],
    wj: &[T],
    bi: T,
    bj: T,
    xij: f64,
    x_max: f64,
    alpha: f64,
) -> GloveGradient<T> {
    assert_eq!(wi.len(), wj.len());
    assert!(xij > 0.0, "co-occurrence weight must be positive");
    let weight = T::of(glove_weight(xij, x_max, alpha));
    let (loss, g) = glove_pair_coefficients(dot(wi, wj), bi, bj, T::of(xij.ln()), weight);
    GloveGradient {
        loss,
        grad_wi: wj.iter().map(|&x| g * x).collect(),
        grad_wj: wi.iter().map(|&x| g * x).collect(),
        grad_bi: g,
        grad_bj: g,
    }
}

#[derive(Clone, Debug)]
pub struct GloveOutput<T> {
    pub embeddings: EmbeddingMatrix<T>,
    /// Weighted loss summed over the table during each epoch.
    pub epoch_loss: Vec<f64>,
}

struct Params<'a, T> {
    focus: SharedRows<'a, T>,
    context: SharedRows<'a, T>,
    focus_sq: SharedRows<'a, T>,
    context_sq: SharedRows<'a, T>,
    bias: SharedRows<'a, T>,
    bias_sq: SharedRows<'a, T>,
}

struct Prepared<T> {
    weight: Vec<T>,
    log_x: Vec<T>,
}

fn run_entries<T: Scalar>(
    p: &Params<'_, T>,
    table: &[CoocEntry],
    prep: &Prepared<T>,
    order: &[usize],
    n: usize,
    lr: T,
) -> f64 {
    let mut total = 0.0;
    for &idx in order {
        let e = table[idx];
        let (i, j) = (e.focus as usize, e.context as usize);
        // SAFETY: each buffer yields at most one row reference at a time.
        let (wi, wj) = unsafe { (p.focus.row_mut(i), p.context.row_mut(j)) };
        let (gi, gj) = unsafe { (p.focus_sq.row_mut(i), p.context_sq.row_mut(j)) };
        let bi = unsafe { &mut p.bias.row_mut(i)[0] };
        let bj = unsafe { &mut p.bias.row_mut(n + j)[0] };
        let (loss, g) = glove_pair_coefficients(dot(wi, wj), *bi, *bj, prep.log_x[idx], prep.weight[idx]);
        total += loss.as_f64();
        for k in 0..wi.len() {
            let grad_i = g * wj[k];
            let grad_j = g * wi[k];
            wi[k] -= lr * grad_i / gi[k].sqrt();
            wj[k] -= lr * grad_j / gj[k].sqrt();
            gi[k] += grad_i * grad_i;
            gj[k] += grad_j * grad_j;
        }
        let bsi = unsafe { &mut p.bias_sq.row_mut(i)[0] };
        *bi -= lr * g / bsi.sqrt();
        *bsi += g * g;
        let bsj = unsafe { &mut p.bias_sq.row_mut(n + j)[0] };
        *bj -= lr * g / bsj.sqrt();
        *bsj += g * g;
    }
    total
}

pub fn train_glove<T: Scalar>(cooc: &CoocTable, cfg: &GloveConfig) -> Result<GloveOutput<T>> {
    cfg.validate()?;
    if cooc.is_empty() {
        return Err(Error::invalid("co-occurrence table is empty"));
    }
    let n = cooc.vocab.len();
    let dim = cfg.dim;
    let mut rng = stream_rng(cfg.seed, 0);
    let scale = 1.0 / dim as f64;
    let mut init = |len: usize| -> Vec<T> { (0..len).map(|_| T::of((rng.random::<f64>() - 0.5) * scale)).collect() };
    let mut focus = init(n * dim);
    let mut context = init(n * dim);
    let mut focus_sq = vec![T::one(); n * dim];
    let mut context_sq = vec![T::one(); n * dim];
    let mut bias = vec![T::zero(); 2 * n];
    let mut bias_sq = vec![T::one(); 2 * n];

    let prep = Prepared {
        weight: cooc.entries.iter().map(|e| T::of(glove_weight(e.weight, cfg.x_max, cfg.alpha))).collect(),
        log_x: cooc.entries.iter().map(|e| T::of(e.weight.ln())).collect(),
    };
    let lr = T::of(cfg.initial_lr);
    let mut order: Vec<usize> = (0..cooc.entries.len()).collect();
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    {
        let params = Params {
            focus: SharedRows::new(&mut focus, dim),
            context: SharedRows::new(&mut context, dim),
            focus_sq: SharedRows::new(&mut focus_sq, dim),
            context_sq: SharedRows::new(&mut context_sq, dim),
            bias: SharedRows::new(&mut bias, 1),
            bias_sq: SharedRows::new(&mut bias_sq, 1),
        };
        for epoch in 0..cfg.epochs {
            order.shuffle(&mut stream_rng(cfg.seed, 1 + epoch as u64));
            let loss = if cfg.workers == 1 {
                run_entries(&params, &cooc.entries, &prep, &order, n, lr)
            } else {
                let acc = Mutex::new(0.0);
                let chunk = order.len().div_ceil(cfg.workers).max(1);
                std::thread::scope(|scope| {
                    for part in order.chunks(chunk) {
                        let (params, prep, acc) = (&params, &prep, &acc);
                        scope.spawn(move || {
                            let l = run_entries(params, &cooc.entries, prep, part, n, lr);
                            *acc.lock().expect("loss accumulator") += l;
                        });
                    }
                });
                acc.into_inner().expect("loss accumulator")
            };
            epoch_loss.push(loss);
        }
    }

    let summed: Vec<T> = focus.iter().zip(&context).map(|(&a, &b)| a + b).collect();
    let embeddings = EmbeddingMatrix::from_rows(cooc.vocab.keys().to_vec(), summed, dim)?;
    Ok(GloveOutput { embeddings, epoch_loss })
}
