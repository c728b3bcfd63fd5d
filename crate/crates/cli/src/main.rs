mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use commands::{ParamError, Verdict};
use output::Output;
use percolab::Seed;

const EXIT_FAILURE: u8 = 1;
const EXIT_PARAMETER: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;

fn fail(code: u8, kind: &str, message: impl std::fmt::Display) -> ExitCode {
    let err = json!({ "error": kind, "message": message.to_string(), "exit_code": code });
    eprintln!("{err}");
    ExitCode::from(code)
}

/// Exit code and error kind for a failed run.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    if err.downcast_ref::<ParamError>().is_some() {
        return (EXIT_PARAMETER, "parameter");
    }
    match err.downcast_ref::<percolab::Error>() {
        Some(percolab::Error::Parameter(_)) => (EXIT_PARAMETER, "parameter"),
        Some(percolab::Error::Contract(_)) => (EXIT_PARAMETER, "contract"),
        Some(percolab::Error::Domain(_)) => (EXIT_PARAMETER, "domain"),
        Some(percolab::Error::Parse { .. }) => (EXIT_PARAMETER, "parse"),
        _ => (EXIT_FAILURE, "runtime"),
    }
}

fn run(cli: &Cli, seed: u64) -> anyhow::Result<Verdict> {
    let started = Instant::now();
    let mut out = Output::new(&cli.out, seed)?;
    let verdict = match &cli.command {
        Command::Generate(a) => commands::generate(a, &mut out),
        Command::Percolate(a) => commands::percolate_cmd(a, &mut out),
        Command::Components(a) => commands::components(a, &mut out),
        Command::Visit(a) => commands::visit(a, &mut out),
        Command::Epidemic(a) => commands::epidemic(a, &mut out),
        Command::Gw(a) => commands::gw(a, &mut out),
        Command::Threshold(a) => commands::threshold(a, &mut out),
        Command::Scaling(a) => commands::scaling(a, &mut out),
        Command::Equivalence(a) => commands::equivalence(a, &mut out),
    }?;
    out.finish(cli.command.name(), cli.command.params(), started)?;
    Ok(verdict)
}

fn main() -> ExitCode {
    let raw: Vec<String> = match std::env::args_os().map(|a| a.into_string()).collect() {
        Ok(v) => v,
        Err(bad) => return fail(EXIT_PARAMETER, "usage", format!("argument {bad:?} is not UTF-8")),
    };
    let merged = match config::merge(raw) {
        Ok(m) => m,
        Err(e) => return fail(EXIT_PARAMETER, "config", format!("{e:#}")),
    };
    let cli = match Cli::try_parse_from(merged) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(EXIT_PARAMETER, "usage", e.to_string().trim_end()),
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return fail(EXIT_PARAMETER, "parameter", "--jobs must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return fail(EXIT_FAILURE, "runtime", e);
        }
    }
    let seed = cli.seed.unwrap_or_else(|| Seed::from_entropy().master);
    match run(&cli, seed) {
        Ok(Verdict::Clean) => ExitCode::SUCCESS,
        Ok(Verdict::Ambiguous) => fail(
            EXIT_AMBIGUOUS,
            "ambiguous",
            "classification stayed ambiguous before the bracket reached the tolerance",
        ),
        Err(e) => {
            let (code, kind) = classify(&e);
            fail(code, kind, format!("{e:#}"))
        }
    }
}
