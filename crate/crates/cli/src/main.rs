mod args;
mod commands;
mod config;

use clap::Parser;

use args::{Cli, Command};

/// Exit codes: 0 success, 1 usage error, 2 verification failure,
/// 3 numerical failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(rydgate_core::Error),
    VerificationFailed,
}

impl From<rydgate_core::Error> for CliError {
    fn from(e: rydgate_core::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::VerificationFailed => write!(f, "verification failed"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::VerificationFailed => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn thread_count(cli: &Cli) -> Option<usize> {
    cli.threads.or_else(|| {
        std::env::var("RYDGATE_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fidelity(args) => commands::cmd_fidelity(args),
        Command::Map(args) => commands::cmd_map(args),
        Command::Optimize(args) => commands::cmd_optimize(args),
        Command::Beams(args) => commands::cmd_beams(args),
        Command::Noise(args) => commands::cmd_noise(args, cli.seed),
        Command::Verify(args) => commands::cmd_verify(args, cli.seed),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    if let Some(n) = thread_count(&cli) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the thread pool: {e}");
            std::process::exit(1);
        }
    }

    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
