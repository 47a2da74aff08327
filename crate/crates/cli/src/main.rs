mod args;
mod commands;
mod failure;
mod input;
mod render;
mod scenario;
mod sweep;

use args::{Cli, Command, Format};
use clap::error::ErrorKind;
use clap::Parser;
use commands::Ctx;
use failure::Failure;
use render::{json_text, Output};
use serde_json::json;
use std::ffi::OsString;

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    let ctx = Ctx { tolerance: cli.tolerance, rank_tol: cli.rank_tol, seed: cli.seed };
    match &cli.command {
        Command::Decompose(a) => commands::decompose(ctx, a),
        Command::Source(c) => commands::source(ctx, c),
        Command::Channel(a) => commands::channel(ctx, a),
        Command::Detect(c) => commands::detect(ctx, c),
        Command::Degauss(a) => commands::degauss(ctx, a),
        Command::Metrology(a) => commands::metrology(ctx, a),
        Command::Cluster(a) => commands::cluster(ctx, a),
        Command::Sweep(c) => sweep::run(c),
        Command::Scenario(_) => unreachable!("scenarios are expanded before dispatch"),
    }
}

fn render(out: &Output, format: Option<Format>) -> Result<String, Failure> {
    match (out, format) {
        (Output::Json(v), None | Some(Format::Json)) => Ok(json_text(v)),
        (Output::Json(_), Some(Format::Csv)) => {
            Err(Failure::usage("CsvUnavailable", "this command produces structured output; use --format json", json!({})))
        }
        (Output::Table(t), None | Some(Format::Csv)) => Ok(t.to_csv()),
        (Output::Table(t), Some(Format::Json)) => Ok(json_text(&t.to_json())),
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let cli = match &cli.command {
        Command::Scenario(a) => scenario::load(&a.input)?,
        _ => cli,
    };
    let text = render(&dispatch(&cli)?, cli.format)?;
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            Failure::usage("OutputUnwritable", format!("cannot write {}: {e}", p.display()), json!({ "path": p.display().to_string() }))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(argv: Vec<OsString>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{}", e.render());
            return 0;
        }
        Err(e) => {
            let f = Failure::usage("UsageError", e.render().to_string().trim_end(), json!({ "kind": e.kind().to_string() }));
            eprint!("{}", json_text(&f.to_json()));
            return f.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprint!("{}", json_text(&f.to_json()));
            f.exit_code()
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("MMQO_LOG")).init();
    std::process::exit(run(std::env::args_os().collect()));
}
