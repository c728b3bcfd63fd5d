//! Splices a JSON config into the argument list so clap sees one command
//! line. Keys are long flag names; flags given explicitly are left alone.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;

const SUBCOMMANDS: [&str; 9] = [
    "generate",
    "percolate",
    "components",
    "visit",
    "epidemic",
    "gw",
    "threshold",
    "scaling",
    "equivalence",
];
const VALUED_GLOBALS: [&str; 4] = ["--seed", "--out", "--jobs", "--config"];

/// Path given to `--config`, if any.
fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if VALUED_GLOBALS.contains(&a) {
            i += 2;
            continue;
        }
        if SUBCOMMANDS.contains(&a) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn given(args: &[String], flag: &str) -> bool {
    args.iter().any(|a| a == flag || a.starts_with(&format!("{flag}=")))
}

fn tokens(key: &str, value: &Value) -> Result<Vec<String>> {
    let flag = format!("--{key}");
    Ok(match value {
        Value::Null | Value::Bool(false) => vec![],
        Value::Bool(true) => vec![flag],
        Value::Number(x) => vec![flag, x.to_string()],
        Value::String(s) => vec![flag, s.clone()],
        Value::Array(items) if items.is_empty() => vec![],
        Value::Array(items) => {
            let parts: Result<Vec<String>> = items
                .iter()
                .map(|v| match v {
                    Value::Number(x) => Ok(x.to_string()),
                    Value::String(s) => Ok(s.clone()),
                    _ => bail!("config key `{key}` holds a nested value"),
                })
                .collect();
            vec![flag, parts?.join(",")]
        }
        Value::Object(_) => bail!("config key `{key}` holds an object"),
    })
}

/// Reads the config (a flat object, or a manifest whose `params` and
/// `seed` are replayed) and returns the merged argument list.
pub fn merge(args: Vec<String>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args.into_iter().map(OsString::from).collect());
    };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config {path}"))?;
    let json: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {path}"))?;
    let Value::Object(mut map) = json else {
        bail!("config {path} is not a JSON object");
    };
    if let Some(Value::Object(params)) = map.remove("params") {
        let seed = map.remove("seed");
        map = params;
        if let Some(seed) = seed {
            map.insert("seed".into(), seed);
        }
    }
    let mut extra = Vec::new();
    for (key, value) in &map {
        if key == "command" || key == "config" || given(&args, &format!("--{key}")) {
            continue;
        }
        extra.extend(tokens(key, value)?);
    }
    let at = subcommand_index(&args).map_or(args.len(), |i| i + 1);
    let mut merged = args;
    merged.splice(at..at, extra);
    Ok(merged.into_iter().map(OsString::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn flags_win_over_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"n": 500, "c": 2.0, "seed": 9, "n-list": [1, 2], "no-linear-stop": true}"#).unwrap();
        let args = strings(&["percolab", "--config", path.to_str().unwrap(), "--seed", "3", "gw", "--n", "7"]);
        let merged: Vec<String> = merge(args).unwrap().into_iter().map(|s| s.into_string().unwrap()).collect();
        let tail = &merged[6..];
        assert_eq!(tail[0], "--c");
        assert!(tail.windows(2).any(|w| w == ["--n-list", "1,2"]));
        assert!(tail.contains(&"--no-linear-stop".to_string()));
        assert!(!tail.contains(&"500".to_string()));
        assert!(!tail.contains(&"9".to_string()));
        assert_eq!(&merged[merged.len() - 2..], ["--n", "7"]);
    }

    #[test]
    fn manifest_params_are_replayed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        std::fs::write(&path, r#"{"command": "gw", "seed": 4, "params": {"b0": 2}, "wall_time_secs": 1.0}"#).unwrap();
        let args = strings(&["percolab", "gw", "--config", path.to_str().unwrap()]);
        let merged: Vec<String> = merge(args).unwrap().into_iter().map(|s| s.into_string().unwrap()).collect();
        assert_eq!(merged[2..6], ["--b0", "2", "--seed", "4"]);
    }
}
