use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use varlearn::cli::{self, Cli, Format, Invocation};

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .downcast_ref::<varlearn::Error>()
                .map_or(cli::EXIT_IO, cli::exit_code);
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let Invocation {
        config,
        out,
        dump_learners,
    } = cli::resolve(cli.command)?;
    let output = cli::execute(&config, dump_learners.is_some())?;

    match &out {
        Some(path) => {
            write_file(path, &output.body)?;
            if config.format == Format::Json {
                write_file(&sidecar(path), &cli::config_document(&config))?;
            }
        }
        None => std::io::stdout()
            .write_all(output.body.as_bytes())
            .context("writing to standard output")?,
    }
    if let (Some(path), Some(dump)) = (&dump_learners, &output.learner_dump) {
        write_file(path, dump)?;
    }
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    // Keep standard output clean when it carries the data.
    if out.is_some() {
        println!("{}", output.summary);
    } else {
        eprintln!("{}", output.summary);
    }
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".config.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
