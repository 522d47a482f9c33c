#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensenorm::senseclf::ContextStore;
use sensenorm::{Corpus, EmbeddingMatrix, Pos, Token};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.sample::<f64, _>(rand_distr::StandardNormal)).collect()
}

/// Pearson's r straight from its definition.
pub fn definitional_pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Sense-id occurrence counts by a plain scan over tokens.
pub fn count_senses(corpus: &Corpus) -> HashMap<String, u64> {
    let mut counts = HashMap::new();
    for sentence in corpus.sentences() {
        for tok in sentence {
            if let Some(s) = tok.sense_id() {
                *counts.entry(s.to_string()).or_insert(0) += 1;
            }
        }
    }
    counts
}

pub fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Central differences of `f` at `x`.
pub fn numeric_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + h;
            let up = f(&p);
            p[i] = x[i] - h;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale = sq_norm(a).sqrt().max(sq_norm(b).sqrt());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

pub fn naive_sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// 100 instances over 20 lemmas with 1 to 4 senses each; every sense has a
/// vector and every instance a context except each tenth.
pub struct WsdFixture {
    pub corpus: Corpus,
    pub ctx: ContextStore<f64>,
    pub model: EmbeddingMatrix<f64>,
    pub norms: EmbeddingMatrix<f64>,
}

pub fn wsd_fixture() -> WsdFixture {
    let mut r = rng(51);
    let senses_of: Vec<usize> = (0..20).map(|_| r.random_range(1..=4)).collect();
    let mut model = EmbeddingMatrix::new(6).unwrap();
    let mut norms = EmbeddingMatrix::new(3).unwrap();
    for (l, &k) in senses_of.iter().enumerate() {
        for j in 0..k {
            model.push(format!("lem{l}%{j}"), &gaussian_vec(&mut r, 6, 1.0)).unwrap();
            norms.push(format!("lem{l}%{j}"), &gaussian_vec(&mut r, 3, 1.0 + j as f64)).unwrap();
        }
    }
    let mut ctx = ContextStore::new(6).unwrap();
    let mut sentence = Vec::new();
    for i in 0..100 {
        let l = i % 20;
        let j = if i < 20 { i % senses_of[l] } else { r.random_range(0..senses_of[l]) };
        let id = format!("fx.{i:03}");
        let tok = Token::new(format!("lem{l}"), format!("lem{l}"), Pos::Noun, Some(format!("lem{l}%{j}")))
            .unwrap()
            .with_instance(id.clone())
            .unwrap();
        sentence.push(tok);
        if i % 10 != 9 {
            let mut t = gaussian_vec(&mut r, 6, 0.3);
            for (a, b) in t.iter_mut().zip(model.get(&format!("lem{l}%{j}")).unwrap()) {
                *a += b;
            }
            ctx.insert(id, &t).unwrap();
        }
    }
    WsdFixture { corpus: Corpus::new(vec![sentence]).unwrap(), ctx, model, norms }
}
