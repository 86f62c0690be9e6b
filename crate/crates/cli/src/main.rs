mod args;
mod bench;
mod check;
mod gen;
mod solve;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use args::{Cli, Command, CoresetCommand};

const EXIT_USAGE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

/// Writes pretty JSON with a trailing newline to `out`, or stdout.
pub(crate) fn emit(v: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let mut text = robustkz::io::canonical_pretty(v);
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Gen(a) => gen::run(&a).map(|()| 0),
        Command::Solve(a) => solve::run(&a),
        Command::Coreset {
            command: CoresetCommand::Build(a),
        } => solve::coreset_build(&a).map(|()| 0),
        Command::Check(a) => check::run(&a).map(|ok| if ok { 0 } else { EXIT_CHECK_FAILED }),
        Command::Bench(a) => bench::run(&a).map(|()| 0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let budget = e
                .downcast_ref::<robustkz::Error>()
                .is_some_and(robustkz::Error::is_budget);
            ExitCode::from(if budget { EXIT_BUDGET } else { EXIT_USAGE })
        }
    }
}
