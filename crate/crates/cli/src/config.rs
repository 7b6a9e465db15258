//! `--config file.json` support.
//!
//! The file is a JSON object whose keys are flag names. Its entries are
//! spliced into the argument list right after the subcommand, ahead of every
//! flag given on the command line, so explicit flags win (later occurrences
//! override earlier ones).

use serde_json::Value;

use gfdiv::{Error, Result};

use crate::cli::Command;

const VALUE_GLOBALS: [&str; 7] = ["--format", "--output", "--seed", "--config", "--restarts", "--max-iters", "--tol"];

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(1);
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

fn subcommand_index(argv: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let a = argv[i].as_str();
        if Command::NAMES.contains(&a) {
            return Some(i);
        }
        i += if VALUE_GLOBALS.contains(&a) { 2 } else { 1 };
    }
    None
}

fn render(v: &Value) -> Option<String> {
    match v {
        Value::Null | Value::Bool(_) => None,
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(a) if a.iter().all(Value::is_number) => {
            Some(a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        }
        other => Some(other.to_string()),
    }
}

/// Converts config entries to flag tokens, in file order.
fn tokens(cfg: &serde_json::Map<String, Value>) -> Vec<String> {
    let mut out = Vec::new();
    for (k, v) in cfg {
        if k == "command" || k == "config" {
            continue;
        }
        let flag = format!("--{}", k.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            _ => {
                out.push(flag);
                out.extend(render(v));
            }
        }
    }
    out
}

/// Returns the argument list with config entries merged in.
pub fn merge(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let body = std::fs::read_to_string(&path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))?;
    let cfg: Value = serde_json::from_str(&body)?;
    let Value::Object(cfg) = cfg else {
        return Err(Error::InvalidInput("config must be a JSON object".into()));
    };
    let (sub, pre, post) = match subcommand_index(&argv) {
        Some(i) => (argv[i].clone(), argv[1..i].to_vec(), argv[i + 1..].to_vec()),
        None => match cfg.get("command").and_then(Value::as_str) {
            Some(c) => (c.to_string(), argv[1..].to_vec(), Vec::new()),
            None => return Ok(argv),
        },
    };
    let mut out = vec![argv[0].clone(), sub];
    out.extend(tokens(&cfg));
    out.extend(pre);
    out.extend(post);
    Ok(out)
}
