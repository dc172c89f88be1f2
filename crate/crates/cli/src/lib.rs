//! Command-line front end for the `ngforge` simulator.
//!
//! Every subcommand produces data only: CSV with a `#`-prefixed JSON
//! manifest line, or a single JSON document. Diagnostics go to stderr.

pub mod args;
pub mod commands;
pub mod figures;
pub mod output;

use commands::{Cli, Command};

/// Failure of a command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ngforge_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed")]
    VerifyFailed,
}

impl CliError {
    /// 1 for failed verification, 3 for degenerate cancellation, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Core(ngforge_core::Error::DegenerateCancellation { .. }) => 3,
            _ => 2,
        }
    }
}

/// Runs one parsed command.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::State { state, out } => {
            let r = commands::cmd_state(&state)?;
            output::emit(&r.render(out.format), out.output.as_deref())?;
        }
        Command::Wigner { state, grid, out } => {
            let r = commands::cmd_wigner(&state, &grid)?;
            output::emit(&r.render(out.format), out.output.as_deref())?;
        }
        Command::Jointwigner { state, section, out } => {
            let r = commands::cmd_jointwigner(&state, &section)?;
            output::emit(&r.render(out.format), out.output.as_deref())?;
        }
        Command::Sweep { sweep, out } => {
            let r = commands::cmd_sweep(&sweep)?;
            output::emit(&r.render(out.format), out.output.as_deref())?;
        }
        Command::Verify(args) => {
            let (text, passed) = commands::cmd_verify(&args)?;
            output::emit(&text, None)?;
            if !passed {
                return Err(CliError::VerifyFailed);
            }
        }
        Command::Figure(args) => {
            for path in figures::cmd_figure(&args)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
