use std::ffi::OsString;
use std::path::Path;

use anyhow::{Context, Result};

use crate::io::usage;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected key=value", n + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(usage(format!("config line {}: empty key", n + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Inserts the flags of a `--config` file right after the subcommand, so any
/// flag given on the command line overrides them.
pub fn inject_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let path = Path::new(&path);
    if !path.is_file() {
        return Err(usage(format!("config file not found: {}", path.display())));
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut flags = Vec::new();
    for (key, value) in parse_config(&text)? {
        if key == "config" {
            return Err(usage("config files cannot include other config files"));
        }
        match value.as_str() {
            "true" => flags.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => {
                flags.push(OsString::from(format!("--{key}")));
                flags.push(OsString::from(value));
            }
        }
    }
    let mut out = args;
    let at = 2.min(out.len());
    out.splice(at..at, flags);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let pairs = parse_config("# defaults\nsteps = 10\nvector_scale=2 # inline\n\n").unwrap();
        assert_eq!(pairs, vec![("steps".into(), "10".into()), ("vector-scale".into(), "2".into())]);
        assert!(parse_config("novalue").is_err());
    }
}
