mod common;

use std::fs;

use common::{ok, sensenorm};
use sensenorm::Corpus;

#[test]
fn single_sense_generator_repeats_one_token() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", "--senses", "1", "--steps", "5", "--seed", "7"], dir.path());
    let corpus = Corpus::parse(fs::read(dir.path().join("synth/corpus.tsv")).unwrap().as_slice()).unwrap();
    let senses: Vec<_> = corpus.tokens().map(|t| t.sense_id().unwrap().to_owned()).collect();
    assert_eq!(senses.len(), 5);
    assert!(senses.iter().all(|s| s == &senses[0]));
    let manifest = common::json(&dir.path().join("synth/manifest.json"));
    assert_eq!(manifest["subcommand"], "gen");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["steps"], 5);
}

#[test]
fn identical_invocations_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for out in ["a", "b"] {
        ok(&["gen", "--senses", "50", "--steps", "3000", "--dim", "5", "--out-dir", out], p);
        let corpus = format!("{out}/corpus.tsv");
        let vec = format!("{out}/sgns.vec");
        ok(&["train-sgns", "--corpus", &corpus, "--dim", "8", "--epochs", "2", "--out", &vec], p);
        let glove = format!("{out}/glove.vec");
        ok(&["train-glove", "--corpus", &corpus, "--dim", "8", "--epochs", "3", "--out", &glove], p);
    }
    for f in ["corpus.tsv", "truth.vec", "mapping.tsv", "sgns.vec", "glove.vec"] {
        assert_eq!(fs::read(p.join("a").join(f)).unwrap(), fs::read(p.join("b").join(f)).unwrap(), "{f}");
    }
    let a = common::json(&p.join("a/sgns.vec.manifest.json"));
    let b = common::json(&p.join("b/sgns.vec.manifest.json"));
    assert_ne!(a["inputs"], serde_json::Value::Null);
    assert_eq!(a["inputs"]["a/corpus.tsv"], b["inputs"]["b/corpus.tsv"]);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("gen.cfg"), "# small run\nsenses = 1\nsteps = 20\nout_dir = cfg\n").unwrap();
    ok(&["gen", "--config", "gen.cfg"], p);
    ok(&["gen", "--config", "gen.cfg", "--steps", "4", "--out-dir", "flag"], p);
    let count =
        |d: &str| Corpus::parse(fs::read(p.join(d).join("corpus.tsv")).unwrap().as_slice()).unwrap().num_tokens();
    assert_eq!(count("cfg"), 20);
    assert_eq!(count("flag"), 4);
    let m = common::json(&p.join("flag/manifest.json"));
    assert_eq!(m["config"]["steps"], 4);
    assert_eq!(m["config"]["senses"], 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let code = |args: &[&str]| sensenorm(args, p).status.code();
    assert_eq!(code(&["gen", "--no-such-flag"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["train-sgns", "--corpus", "missing.tsv", "--out", "x.vec"]), Some(2));
    assert_eq!(code(&["gen", "--config", "missing.cfg"]), Some(2));
    fs::write(p.join("bad.cfg"), "unknown_key = 3\n").unwrap();
    assert_eq!(code(&["gen", "--config", "bad.cfg"]), Some(2));
    fs::write(p.join("bad.tsv"), "only\ttwo\n").unwrap();
    assert_eq!(code(&["train-sgns", "--corpus", "bad.tsv", "--out", "x.vec"]), Some(1));
    assert_eq!(code(&["gen", "--senses", "0", "--steps", "5"]), Some(1));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn help_lists_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["train-glove", "--help"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["--seed", "--workers", "--config", "--manifest", "--x-max", "[default: 100]", "[default: 10]"] {
        assert!(text.contains(needle), "help lacks {needle}:\n{text}");
    }
}

#[test]
fn converts_xml_and_headerless_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("d.xml"),
        r#"<corpus><text id="d0"><sentence id="d0.s0">
<wf lemma="the" pos="DET">The</wf><instance id="d0.s0.t0" lemma="bank" pos="NOUN">bank</instance>
</sentence></text></corpus>"#,
    )
    .unwrap();
    fs::write(p.join("d.key"), "d0.s0.t0 bank%1:14:00::\n").unwrap();
    ok(&["convert", "--kind", "xml", "--input", "d.xml", "--gold-keys", "d.key", "--out", "d.tsv"], p);
    let c = Corpus::parse(fs::read(p.join("d.tsv")).unwrap().as_slice()).unwrap();
    let bank = &c.sentences()[0][1];
    assert_eq!(bank.sense_id(), Some("bank%1:14:00::"));
    assert_eq!(bank.instance_id(), Some("d0.s0.t0"));

    fs::write(p.join("g.txt"), "a 1 2\nb 3 4\n").unwrap();
    ok(&["convert", "--kind", "embeddings", "--input", "g.txt", "--out", "g.vec"], p);
    assert_eq!(fs::read_to_string(p.join("g.vec")).unwrap(), "2 2\na 1 2\nb 3 4\n");
    assert!(p.join("g.vec.manifest.json").exists());
}
