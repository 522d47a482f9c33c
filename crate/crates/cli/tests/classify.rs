mod common;

use std::fs;
use std::path::Path;

use common::ok;
use sensenorm::senseclf::ContextStore;
use sensenorm::{Corpus, Embeddings, Pos, Token};

const DIM: usize = 8;

fn basis(j: usize) -> Vec<f64> {
    let mut v = vec![0.0; DIM];
    v[j] = 1.0;
    v
}

/// Contextual vector close to sense `j`.
fn context(j: usize, k: usize) -> Vec<f64> {
    let mut v = basis(j);
    v[(j + 3 + k % 3) % DIM] += 0.3;
    v
}

fn sense(word: usize, s: usize) -> String {
    format!("w{word}%{}", s + 1)
}

fn write_senses(p: &Path) {
    let mut model = Embeddings::new(DIM).unwrap();
    let mut norms = Embeddings::new(DIM).unwrap();
    for w in 0..4 {
        for s in 0..2 {
            let j = 2 * w + s;
            model.push(sense(w, s), &basis(j)).unwrap();
            let scale = if s == 0 { 2.0 } else { 1.0 };
            norms.push(sense(w, s), &basis(j).iter().map(|x| x * scale).collect::<Vec<_>>()).unwrap();
        }
    }
    model.write(fs::File::create(p.join("model.vec")).unwrap()).unwrap();
    norms.write(fs::File::create(p.join("norms.vec")).unwrap()).unwrap();
}

fn write_wsd_split(p: &Path, name: &str, prefix: &str, n: usize) {
    let mut ctx = ContextStore::<f64>::new(DIM).unwrap();
    let mut sentences = Vec::new();
    for i in 0..n {
        let (w, s) = (i % 4, (i / 4) % 2);
        let id = format!("{prefix}.d0.t{i:03}");
        let lemma = format!("w{w}");
        let tok = Token::new(lemma.clone(), lemma, Pos::Noun, Some(sense(w, s))).unwrap().with_instance(&id).unwrap();
        let filler = Token::new("the", "the", Pos::Other, None).unwrap();
        sentences.push(vec![filler, tok]);
        ctx.insert(id, &context(2 * w + s, i)).unwrap();
    }
    Corpus::new(sentences).unwrap().write(fs::File::create(p.join(format!("{name}.tsv"))).unwrap()).unwrap();
    ctx.write(fs::File::create(p.join(format!("{name}.ctx"))).unwrap()).unwrap();
}

#[test]
fn wsd_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write_senses(p);
    write_wsd_split(p, "train", "train", 40);
    write_wsd_split(p, "eval", "se", 24);
    ok(
        &[
            "wsd",
            "--train-corpus",
            "train.tsv",
            "--train-contexts",
            "train.ctx",
            "--model-emb",
            "model.vec",
            "--norm-emb",
            "norms.vec",
            "--eval-corpus",
            "eval.tsv",
            "--eval-contexts",
            "eval.ctx",
            "--predictions",
            "pred.key",
            "--out",
            "wsd.json",
            "--model-out",
            "model.json",
        ],
        p,
    );
    let report = common::json(&p.join("wsd.json"));
    assert_eq!(report["training"]["rows"], 80);
    assert_eq!(report["training"]["positives"], 40);
    assert_eq!(report["evaluation"]["instances"], 24);
    assert_eq!(report["model"]["feature_names"], serde_json::json!(["cosine", "squared_norm"]));
    let f1 = report["evaluation"]["metrics"]["all"]["f1"].as_f64().unwrap();
    assert!(f1 >= 90.0, "F1 {f1}");
    let keys = fs::read_to_string(p.join("pred.key")).unwrap();
    assert_eq!(keys.lines().count(), 24);
    assert!(keys.lines().all(|l| l.starts_with("se.d0.t")));
    assert_eq!(common::json(&p.join("model.json")), report["model"]);
}

fn write_wic_split(p: &Path, prefix: &str, n: usize) {
    let mut ctx = ContextStore::<f64>::new(DIM).unwrap();
    let mut pairs = String::new();
    let mut gold = String::new();
    for k in 0..n {
        let (w, a, b) = (k % 4, (k / 4) % 2, (k / 8) % 2);
        pairs.push_str(&format!("w{w}\tN\t1-0\tthe w{w} here\tw{w} again\n"));
        gold.push_str(if a == b { "T\n" } else { "F\n" });
        ctx.insert(format!("{prefix}:{k}:1"), &context(2 * w + a, k)).unwrap();
        ctx.insert(format!("{prefix}:{k}:2"), &context(2 * w + b, k + 1)).unwrap();
    }
    fs::write(p.join(format!("{prefix}.pairs")), pairs).unwrap();
    fs::write(p.join(format!("{prefix}.gold")), gold).unwrap();
    ctx.write(fs::File::create(p.join(format!("{prefix}.ctx"))).unwrap()).unwrap();
}

#[test]
fn wic_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write_senses(p);
    write_wic_split(p, "train", 48);
    write_wic_split(p, "eval", 16);
    ok(
        &[
            "wic",
            "--train-pairs",
            "train.pairs",
            "--train-gold",
            "train.gold",
            "--train-contexts",
            "train.ctx",
            "--eval-pairs",
            "eval.pairs",
            "--eval-gold",
            "eval.gold",
            "--eval-contexts",
            "eval.ctx",
            "--model-emb",
            "model.vec",
            "--norm-emb",
            "norms.vec",
            "--norm-mode",
            "mean",
            "--predictions",
            "pred.txt",
            "--out",
            "wic.json",
        ],
        p,
    );
    let report = common::json(&p.join("wic.json"));
    assert_eq!(report["training"]["rows"], 48);
    assert_eq!(report["evaluation"]["pairs"], 16);
    assert_eq!(report["evaluation"]["unfeaturised"], 0);
    assert_eq!(report["model"]["feature_names"].as_array().unwrap().len(), 5);
    let acc = report["evaluation"]["accuracy"].as_f64().unwrap();
    assert!(acc >= 90.0, "accuracy {acc}");
    let preds = fs::read_to_string(p.join("pred.txt")).unwrap();
    assert_eq!(preds.lines().count(), 16);
    assert!(preds.lines().all(|l| l == "T" || l == "F"));
}
