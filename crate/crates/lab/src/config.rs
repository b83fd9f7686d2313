//! `key = value` run files merged underneath command-line flags.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// keys may use `_` or `-`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", n + 1);
        };
        let key = k.trim().replace('_', "-");
        let value = v.trim().trim_matches('"').to_string();
        if key.is_empty() || key.starts_with('-') {
            bail!("config line {}: bad key `{}`", n + 1, k.trim());
        }
        out.push((key, value));
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config(&text)
}

/// Pulls a leading `--config FILE` out of `args` and splices the file's
/// entries in right after the subcommand, skipping keys the command line
/// already sets. `true`/`false` values toggle bare flags.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest: Vec<OsString> = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    if let Some(bin) = it.next() {
        rest.push(bin);
    }
    let mut sub_at = None;
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if sub_at.is_none() {
            if s == "--config" {
                config = Some(it.next().context("--config needs a file")?);
                continue;
            }
            if let Some(p) = s.strip_prefix("--config=") {
                config = Some(OsString::from(p));
                continue;
            }
            if !s.starts_with('-') {
                sub_at = Some(rest.len());
            }
        }
        rest.push(a);
    }
    let (Some(path), Some(at)) = (config, sub_at) else {
        return Ok(rest);
    };
    let given: Vec<String> = rest[at + 1..]
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut inject: Vec<OsString> = Vec::new();
    for (k, v) in load_config(Path::new(&path))? {
        if given.contains(&k) {
            continue;
        }
        match v.as_str() {
            "true" => inject.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                inject.push(format!("--{k}").into());
                inject.push(v.into());
            }
        }
    }
    rest.splice(at + 1..at + 1, inject);
    Ok(rest)
}
