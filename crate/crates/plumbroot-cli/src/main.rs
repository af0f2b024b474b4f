//! `plumbroot`: batch front end of the plumbroot library.
//!
//! Exit codes: 0 on success, 1 on input or I/O errors, 2 when the graph is
//! not certified almost rational, 3 when a verification suite fails.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command};
use commands::{Failure, Outcome};

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let outcome = match &cli.command {
        Command::Analyze(a) => commands::cmd_analyze(a)?,
        Command::Root(a) => commands::cmd_root(a)?,
        Command::Verify(a) => commands::cmd_verify(a)?,
        Command::Lens(a) => commands::cmd_lens(a)?,
        Command::Seifert(a) => commands::cmd_seifert(&a.data)?,
        Command::Oracle(a) => commands::cmd_oracle(a)?,
    };
    let text = match outcome {
        Outcome::Report(r) | Outcome::Written(r) => r.render(cli.format)?,
    };
    output::emit(cli.output.as_deref(), &text)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Failure>() {
        Some(Failure::NotAr(_)) => 2,
        Some(Failure::Mismatch(_)) => 3,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_failure_kind() {
        assert_eq!(exit_code(&Failure::Mismatch("x".into()).into()), 3);
        let not_ar = plumbroot::ar::ArError::NotAr { bound: 1 };
        assert_eq!(exit_code(&Failure::NotAr(not_ar).into()), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("bad input")), 1);
    }
}
