use std::io::{IsTerminal, Write};
use std::process::ExitCode;

use clap::Parser;
use failure_sieve::cli::{run, Cli, RunResult};

fn styled(code: &str, text: &str) -> String {
    let plain =
        std::env::var_os("FAILURE_SIEVE_NO_COLOR").is_some() || !std::io::stderr().is_terminal();
    if plain {
        text.to_owned()
    } else {
        format!("\x1b[{code}m{text}\x1b[0m")
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are configuration errors; --help and --version are not errors.
            return if e.use_stderr() {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("{} {e}", styled("1;31", "error:"));
            return ExitCode::from(4);
        }
    }

    match run(&cli.command) {
        Ok(RunResult::Written {
            dir,
            files,
            summary,
        }) => {
            eprintln!(
                "{} {summary}; wrote {files} files to {}",
                styled("1;32", "ok:"),
                dir.display()
            );
            ExitCode::SUCCESS
        }
        Ok(RunResult::Printed { bytes, summary }) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            eprintln!("{} {summary}", styled("1;32", "ok:"));
            ExitCode::SUCCESS
        }
        Ok(RunResult::Replayed(outcome)) => {
            eprintln!(
                "{} replay matched all {} recorded outputs",
                styled("1;32", "ok:"),
                outcome.checked
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{} {e}", styled("1;31", "error:"));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
