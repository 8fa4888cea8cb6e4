//! `--config` replay and recording of the effective arguments.
//!
//! A config is either a `key = value` file (one long option per line, `#`
//! starts a comment) or a JSON document produced by `--format json`, whose
//! `meta.config` map is replayed. Entries are inserted right after the
//! subcommand, so options given on the command line override them.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::{ArgAction, ArgMatches, CommandFactory};
use serde_json::Value;

use crate::cli::Cli;
use crate::CliError;

/// Options never recorded or replayed.
const SKIPPED: [&str; 4] = ["config", "output", "help", "version"];

fn find_config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

fn parse_key_values(text: &str, path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected key = value", path.display(), n + 1))
        })?;
        out.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    Ok(out)
}

fn parse_json(text: &str, path: &Path, command: &str) -> Result<Vec<(String, String)>, CliError> {
    let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let (config, recorded_command) = match doc.get("meta") {
        Some(meta) => (meta.get("config"), meta.get("command").and_then(Value::as_str)),
        None => (Some(&doc), None),
    };
    if let Some(c) = recorded_command {
        if c != command {
            return Err(bad(format!("recorded for `{c}`, not `{command}`")));
        }
    }
    let map = config.and_then(Value::as_object).ok_or_else(|| bad("no config object".into()))?;
    map.iter()
        .map(|(k, v)| {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                other => return Err(bad(format!("unsupported value for {k}: {other}"))),
            };
            Ok((k.clone(), v))
        })
        .collect()
}

/// Returns `args` with the entries of any `--config` file spliced in after
/// the subcommand.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(sub_pos) = args.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')).map(|p| p + 1)
    else {
        return Ok(args);
    };
    let Some(path) = find_config_path(&args[sub_pos + 1..]) else {
        return Ok(args);
    };
    let command = args[sub_pos].to_string_lossy().into_owned();
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(&command) else {
        // let clap report the unknown subcommand
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let entries = if text.trim_start().starts_with('{') {
        parse_json(&text, path, &command)?
    } else {
        parse_key_values(&text, path)?
    };

    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        let long = key.replace('_', "-");
        if SKIPPED.contains(&long.as_str()) {
            continue;
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .ok_or_else(|| CliError::Usage(format!("config key `{key}` is not an option of `{command}`")))?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => injected.push(format!("--{long}").into()),
                "false" => {}
                _ => return Err(CliError::Usage(format!("config key `{key}` expects true or false"))),
            }
        } else {
            injected.push(format!("--{long}={value}").into());
        }
    }
    let mut out = args[..=sub_pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[sub_pos + 1..]);
    Ok(out)
}

/// Effective value of every option of the subcommand, defaults included,
/// keyed by long name.
pub fn record(command: &str, matches: &ArgMatches) -> BTreeMap<String, String> {
    let root = Cli::command();
    let sub = root.find_subcommand(command).expect("subcommand exists");
    let mut out = BTreeMap::new();
    for arg in sub.get_arguments() {
        let Some(long) = arg.get_long() else { continue };
        if SKIPPED.contains(&long) {
            continue;
        }
        let id = arg.get_id().as_str();
        if let Ok(Some(mut raw)) = matches.try_get_raw(id) {
            if let Some(v) = raw.next() {
                out.insert(long.to_owned(), v.to_string_lossy().into_owned());
            }
        }
    }
    out
}
