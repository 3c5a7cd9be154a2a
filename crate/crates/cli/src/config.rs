//! `key=value` configuration files and the matching provenance line.
//!
//! Keys are flag names without the leading dashes. A file may hold one pair
//! per line or several whitespace-separated pairs on a line; a line starting
//! with `# provenance:` is read as pairs, other `#` lines are comments.

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::Value;
use std::ffi::OsString;
use std::path::Path;

pub const PROVENANCE_PREFIX: &str = "# provenance:";
const TOOL: &str = "golay-dfcw";

pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = vec![];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        let body = if let Some(rest) = line.strip_prefix(PROVENANCE_PREFIX) {
            rest
        } else if line.is_empty() || line.starts_with('#') {
            continue;
        } else {
            line
        };
        for tok in body.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| {
                anyhow!(
                    "config line {}: expected key=value, got {tok:?}",
                    lineno + 1
                )
            })?;
            if k.is_empty() {
                bail!("config line {}: empty key", lineno + 1);
            }
            pairs.push((k.to_string(), v.to_string()));
        }
    }
    Ok(pairs)
}

fn long_flags(args: &[OsString]) -> Vec<String> {
    args.iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect()
}

/// Rewrites `argv` so that a `--config FILE` becomes the flags it holds,
/// inserted right after the subcommand. Flags already on the command line
/// win over the file. Unknown keys surface as unknown-flag errors.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = vec![];
    let mut config = None;
    let mut it = argv.into_iter();
    let program = it.next().unwrap_or_else(|| TOOL.into());
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => {
                config = Some(it.next().ok_or_else(|| anyhow!("--config needs a file"))?);
            }
            Some(s) if s.starts_with("--config=") => config = Some(s["--config=".len()..].into()),
            _ => rest.push(a),
        }
    }
    let Some(path) = config else {
        let mut out = vec![program];
        out.extend(rest);
        return Ok(out);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let pairs = parse_pairs(&text)?;

    let sub_pos = rest
        .iter()
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .ok_or_else(|| anyhow!("--config needs a subcommand"))?;
    let subcommand = rest[sub_pos].to_string_lossy().into_owned();
    let given = long_flags(&rest);

    let mut injected: Vec<OsString> = vec![];
    for (k, v) in pairs {
        match k.as_str() {
            "tool" if v != TOOL => bail!("config was written by {v:?}, not {TOOL}"),
            "command" if v != subcommand => {
                bail!("config is for command {v:?} but {subcommand:?} was requested")
            }
            "version" if v != env!("CARGO_PKG_VERSION") => {
                log::warn!("config was written by version {v}");
            }
            "tool" | "command" | "version" => {}
            "config" => bail!("config files cannot include other config files"),
            _ if given.contains(&k) => {}
            _ => match v.as_str() {
                "true" => injected.push(format!("--{k}").into()),
                "false" => {}
                _ => injected.push(format!("--{k}={v}").into()),
            },
        }
    }
    let mut out = vec![program];
    out.extend(rest.drain(..=sub_pos));
    out.extend(injected);
    out.extend(rest);
    Ok(out)
}

fn push_flat(value: &Value, prefix: Option<&str>, out: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                push_flat(v, Some(&k.replace('_', "-")), out);
            }
        }
        Value::Null => {}
        v => {
            let key = prefix.unwrap_or("value");
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Array(items) => items
                    .iter()
                    .map(|i| i.to_string().trim_matches('"').to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                other => other.to_string(),
            };
            out.push(format!("{key}={text}"));
        }
    }
}

/// `# provenance: tool=… version=… command=… key=value …`, readable back
/// through `--config`.
pub fn provenance<T: Serialize>(command: &str, args: &T) -> Result<String> {
    let mut parts = vec![
        format!("tool={TOOL}"),
        format!("version={}", env!("CARGO_PKG_VERSION")),
        format!("command={command}"),
    ];
    push_flat(&serde_json::to_value(args)?, None, &mut parts);
    Ok(format!("{PROVENANCE_PREFIX} {}", parts.join(" ")))
}
