//! Scenario files: a command line stored as JSON, with paths resolved
//! relative to the scenario file.

use crate::args::Cli;
use crate::failure::Failure;
use crate::input::read_json;
use clap::Parser;
use serde::Deserialize;
use serde_json::json;
use std::path::{Path, PathBuf};

pub const COMMANDS: [&str; 8] = ["decompose", "source", "channel", "detect", "degauss", "metrology", "cluster", "sweep"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Command words, e.g. `"source pdc"`.
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub rank_tol: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<String>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// The argument vector the scenario stands for.
pub fn argv(s: &Scenario, base: &Path) -> Result<Vec<String>, Failure> {
    let words: Vec<&str> = s.command.split_whitespace().collect();
    match words.first() {
        Some(w) if COMMANDS.contains(w) => {}
        _ => {
            return Err(Failure::usage(
                "UnknownCommand",
                format!("scenario command `{}` is not one of {}", s.command, COMMANDS.join(", ")),
                json!({ "command": s.command }),
            ))
        }
    }
    let mut out: Vec<String> = vec!["mmqo".into()];
    out.extend(words.iter().map(|w| w.to_string()));
    out.extend(s.args.iter().cloned());
    if let Some(p) = &s.input {
        let p = resolve(base, p);
        if !p.is_file() {
            return Err(Failure::usage("InputUnreadable", format!("scenario input {} does not exist", p.display()), json!({ "path": p.display().to_string() })));
        }
        out.extend(["--in".to_string(), p.display().to_string()]);
    }
    if let Some(p) = &s.output {
        out.extend(["--out".to_string(), resolve(base, p).display().to_string()]);
    }
    if let Some(t) = s.tolerance {
        out.extend(["--tolerance".to_string(), t.to_string()]);
    }
    if let Some(t) = s.rank_tol {
        out.extend(["--rank-tol".to_string(), t.to_string()]);
    }
    if let Some(seed) = s.seed {
        out.extend(["--seed".to_string(), seed.to_string()]);
    }
    if let Some(f) = &s.format {
        out.extend(["--format".to_string(), f.clone()]);
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Cli, Failure> {
    let s: Scenario = serde_json::from_value(read_json(path)?).map_err(|e| {
        Failure::usage("InvalidInput", format!("{}: not a valid scenario: {e}", path.display()), json!({ "path": path.display().to_string() }))
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let args = argv(&s, base)?;
    log::debug!("scenario {} expands to {:?}", path.display(), args);
    Cli::try_parse_from(&args).map_err(|e| {
        Failure::usage("UsageError", format!("scenario {}: {}", path.display(), e.render()), json!({ "argv": args }))
    })
}
