// `!(x > a)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;
mod table;

use std::io::Write;
use std::process::ExitCode;

use args::{Cli, Command};
use error::CliError;

fn init_threads(threads: Option<usize>) -> Result<usize, CliError> {
    let n = config::resolve_threads(threads)?;
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = n {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| error::argument(format!("cannot size the thread pool: {e}")))?;
        }
        Ok(n.unwrap_or_else(rayon::current_num_threads))
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(n.unwrap_or(1))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = init_threads(cli.threads)?;
    let outcome = match &cli.command {
        Command::Kernel(a) => commands::kernel(a, cli.out, threads)?,
        Command::Density(a) => commands::density(a)?,
        Command::Check(a) => commands::check(a)?,
        Command::Study(a) => commands::study(a)?,
        Command::Limit(a) => commands::limit(a)?,
    };
    let mut stdout = std::io::stdout().lock();
    outcome.table.write(cli.out, outcome.meta, &mut stdout)?;
    stdout.flush()?;
    outcome.status
}

fn main() -> ExitCode {
    let cli = match args::parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
