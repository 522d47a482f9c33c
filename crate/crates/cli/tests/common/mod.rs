#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn sensenorm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sensenorm"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

pub fn ok(args: &[&str], cwd: &Path) -> Output {
    let out = sensenorm(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed with {:?}\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

pub fn keys(v: &serde_json::Value) -> String {
    v.as_object().unwrap().keys().cloned().collect::<Vec<_>>().join(",")
}
