//! Command-line front end for the `collapse-kit` library.
//!
//! The binary ties the analysis modules into reproducible batch runs:
//! every subcommand resolves its options against an optional TOML
//! configuration file (flags override the file), stamps its output
//! with a digest of the effective configuration, and writes
//! deterministic artifacts — identical configuration, identical bytes,
//! regardless of worker count.
//!
//! Exit codes: `0` success, `1` usage or validation error, `2`
//! verification failure (a failed `verify` suite or an unsound `sweep`
//! trial).

pub mod args;
pub mod commands;
pub mod error;
pub mod report;
pub mod verify;

pub use error::CliError;

use clap::Parser;

/// Cap the rayon worker pool from `COLLAPSE_KIT_THREADS`. Defaults to
/// the machine parallelism when unset. Must run before any parallel
/// work; repeated calls are harmless.
pub fn init_thread_pool() -> Result<(), CliError> {
    match std::env::var("COLLAPSE_KIT_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(CliError::Usage("COLLAPSE_KIT_THREADS is not valid UTF-8".into()))
        }
        Ok(raw) => {
            let threads: usize = raw.trim().parse().map_err(|_| {
                CliError::Usage(format!(
                    "COLLAPSE_KIT_THREADS must be a positive integer, got {raw:?}"
                ))
            })?;
            if threads == 0 {
                return Err(CliError::Usage(
                    "COLLAPSE_KIT_THREADS must be a positive integer, got 0".into(),
                ));
            }
            // A second build_global in the same process (e.g. in tests)
            // fails; the pool that exists keeps its size, so ignore it.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            Ok(())
        }
    }
}

/// Parse the command line and run it; the process exit code is the
/// returned value.
pub fn run_main() -> u8 {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            return 0;
        }
        Err(err) => {
            eprint!("{err}");
            return 1;
        }
    };
    match init_thread_pool().and_then(|()| commands::run(cli)) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
