use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod run;

#[derive(Parser, Debug)]
#[command(
    name = "icatt",
    version,
    about = "Checker for CaTT with invertibility structures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    /// Print the number of neutral categorical terms of dimension N over E^1.
    #[arg(long, value_name = "N")]
    pub neutral_count: Option<usize>,
    /// Print the truncation E^{1,N} in concrete syntax.
    #[arg(long, value_name = "N")]
    pub equiv_trunc: Option<usize>,
    /// Check the variable-to-neutral correspondence up to dimension N.
    #[arg(long, value_name = "N")]
    pub check_gamma: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse, elaborate and check declaration files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Print the normal form of the named declaration.
        #[arg(long, value_name = "NAME")]
        dump_nf: Vec<String>,
        /// Print the judgments being checked when a declaration fails, and
        /// the elaborated form of accepted ones.
        #[arg(long)]
        verbose: bool,
        /// Keep checking after a failed declaration.
        #[arg(long)]
        keep_going: bool,
        /// Check up to N files concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match run::run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
